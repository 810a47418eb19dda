mod common;

use std::fs;

/// Set `BIDIM_REGEN=1` to rewrite the corpus.
#[test]
fn fixture_corpus_is_current() {
    let dir = common::fixture_dir();
    let regen = std::env::var_os("BIDIM_REGEN").is_some();
    if regen {
        fs::create_dir_all(&dir).unwrap();
    }
    let mut stale = Vec::new();
    for (name, text) in common::corpus() {
        let path = dir.join(&name);
        if regen {
            fs::write(&path, &text).unwrap();
        } else if fs::read_to_string(&path).ok().as_deref() != Some(text.as_str()) {
            stale.push(name);
        }
    }
    assert!(stale.is_empty(), "stale fixtures (rerun with BIDIM_REGEN=1): {stale:?}");
}
