use principar::lexicon::{compile_text, LexicalEntry, ENGLISH_LEXICON};
use principar::{GrammarNetwork, LexiconStore, Parser};

fn bracketed(net: &GrammarNetwork, lex: &LexiconStore, s: &str) -> Vec<String> {
    let o = Parser::new(net, lex).parse(s).unwrap();
    o.forest(net).enumerate().map(|t| t.to_bracketed()).collect()
}

#[test]
fn compiled_lexicon_parses_like_the_bundled_one() {
    let net = GrammarNetwork::english();
    let dir = tempfile::tempdir().unwrap();
    let stats = compile_text(ENGLISH_LEXICON, &net.registry, &dir.path().join("secondary.plex")).unwrap();
    assert!(stats.entries > 30);
    let disk = LexiconStore::open(dir.path(), net.registry.clone()).unwrap();
    let mem = LexiconStore::english(net.registry.clone()).unwrap();
    for s in ["John read the story about Kim", "Who did Kim love?", "Kim left", "Kim to leave"] {
        assert_eq!(bracketed(&net, &disk, s), bracketed(&net, &mem, s), "{s}");
    }
    assert!(disk.stats().secondary_hits > 0);
}

#[test]
fn override_changes_parses_and_persists() {
    let net = GrammarNetwork::english();
    let dir = tempfile::tempdir().unwrap();
    compile_text(ENGLISH_LEXICON, &net.registry, &dir.path().join("secondary.plex")).unwrap();
    let lex = LexiconStore::open(dir.path(), net.registry.clone()).unwrap();
    assert!(bracketed(&net, &lex, "Kim smiled").is_empty());

    let e = LexicalEntry::parse("(smiled (subcat ((cat v) (tense past))))", &net.registry).unwrap();
    lex.put(e).unwrap();
    let expected = ["(IP (NP (Nbar (N Kim))) (Ibar (VP (Vbar (V smiled)))))"];
    assert_eq!(bracketed(&net, &lex, "Kim smiled"), expected);
    drop(lex);

    let reopened = LexiconStore::open(dir.path(), net.registry.clone()).unwrap();
    assert_eq!(bracketed(&net, &reopened, "Kim smiled"), expected);
    std::fs::remove_file(dir.path().join("primary.lex")).unwrap();
    let restored = LexiconStore::open(dir.path(), net.registry.clone()).unwrap();
    assert!(bracketed(&net, &restored, "Kim smiled").is_empty());
}

#[test]
fn custom_grammar_text_round_trips() {
    let net = GrammarNetwork::english();
    let text = principar::network::render_network(&net);
    let again = GrammarNetwork::load(&text).unwrap();
    let lex = LexiconStore::english(again.registry.clone()).unwrap();
    let lex0 = LexiconStore::english(net.registry.clone()).unwrap();
    assert_eq!(
        bracketed(&again, &lex, "John read the story about Kim"),
        bracketed(&net, &lex0, "John read the story about Kim")
    );
}
