use bidim_web::{run_decompose, run_exact, run_separator};

const GRID3_COL1: &str = "p agr 9 12 3\ne 1 2\ne 2 3\ne 4 5\ne 5 6\ne 7 8\ne 8 9\ne 1 4\ne 4 7\ne 2 5\ne 5 8\ne 3 6\ne 6 9\nr 1\nr 4\nr 7\n";

#[test]
fn exact_on_a_grid_with_a_red_column() {
    let out = run_exact(GRID3_COL1, 3).unwrap();
    assert!(out.contains("\"value\": 1"), "{out}");
}

#[test]
fn separator_ids_accept_commas_and_spaces() {
    let out = run_separator(GRID3_COL1, "1, 3 7,9", 2).unwrap();
    assert!(out.contains("\"kind\": \"separator\""));
    assert!(run_separator(GRID3_COL1, "1,x", 2).unwrap_err().contains("\"x\""));
}

#[test]
fn decompose_appends_a_dot_drawing() {
    let out = run_decompose(GRID3_COL1, 2).unwrap();
    assert!(out.contains("\"kind\": \"decomposition\""));
    assert!(out.contains("graph td {"));
}

#[test]
fn parse_errors_surface_with_line_numbers() {
    assert_eq!(run_exact("p agr 2 1 0\ne 1 1\n", 2).unwrap_err(), "line 2: self-loop at 1");
}
