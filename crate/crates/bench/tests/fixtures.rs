use principar::{LexiconStore, Parser};
use principar_bench::{ambiguous, english, synthetic_lexicon, ENGLISH_SENTENCES};

#[test]
fn english_fixtures_parse() {
    let (net, lex) = english();
    let p = Parser::new(&net, &lex);
    for s in &ENGLISH_SENTENCES[..4] {
        assert!(!p.parse(s).unwrap().forest(&net).is_empty(), "{s}");
    }
}

#[test]
fn ambiguous_fixture_counts_bracketings() {
    let (g, net, s) = ambiguous(6);
    assert_eq!(g.parse(&net, &s).forest(&net).tree_count(), 42);
}

#[test]
fn synthetic_lexicon_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let keys = synthetic_lexicon(dir.path(), 300, 5);
    let (net, _) = english();
    let store = LexiconStore::open(dir.path(), net.registry.clone()).unwrap();
    assert_eq!(keys.len(), 300);
    assert!(keys.iter().all(|k| store.get(k).unwrap().is_some()));
}
