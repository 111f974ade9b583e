use super::*;
use crate::avm::av;

const MINIMAL: &str = "\
node S
node NP
node VP
dom S -> NP id=1 obligatory
dom S -> VP id=2 obligatory role=head
top S
";

fn english() -> GrammarNetwork {
    GrammarNetwork::english()
}

#[test]
fn loads_minimal_network() {
    let net = GrammarNetwork::load(MINIMAL).unwrap();
    assert_eq!(net.nodes.len(), 3);
    assert_eq!(net.dominance.len(), 2);
    assert_eq!(net.big_weight, Weight::from_tenths(200));
}

#[test]
fn english_grammar_has_the_expected_nodes() {
    let net = english();
    for name in [
        "CP", "Cbar", "C", "IP", "Ibar", "I", "NP", "Nbar", "N", "VP", "Vbar", "V", "PP", "Pbar",
        "P", "V:NP", "V:CP", "V:IP", "V:NP:NP", "AUX",
    ] {
        assert!(net.node_id(name).is_some(), "missing {name}");
    }
    assert!(net.validate().is_empty());
}

#[test]
fn adjunct_links_carry_bigweight() {
    let net = english();
    for l in &net.dominance {
        let expected = if l.role == Role::Adjunct {
            net.big_weight
        } else {
            Weight::ONE
        };
        assert_eq!(l.weight, expected);
    }
}

#[test]
fn duplicate_dominance_id_is_an_error() {
    let text = "\
node Nbar kind=bar
node N kind=lexical
node PP
dom Nbar -> N id=1 role=head
dom Nbar -> PP id=3 optional
dom Nbar -> PP id=3 optional
top Nbar
";
    let err = GrammarNetwork::load(text).unwrap_err();
    assert!(err.diagnostics().iter().any(|d| matches!(
        &d.kind,
        DiagnosticKind::DuplicateLinkId { parent, id: 3 } if parent == "Nbar"
    )));
}

#[test]
fn subsumption_cycle_is_diagnosed() {
    let text = "\
node V kind=lexical
node V:NP kind=subcategory
subsume V -> V:NP
subsume V:NP -> V
top V
";
    let net = GrammarNetwork::parse_unchecked(text).unwrap();
    let diags = net.validate();
    assert!(diags
        .iter()
        .any(|d| matches!(d.kind, DiagnosticKind::SubsumptionCycle { .. })));
    assert!(GrammarNetwork::load(text).is_err());
}

#[test]
fn two_heads_are_diagnosed() {
    let text = "\
node Vbar kind=bar
node V kind=lexical
node NP
dom Vbar -> V id=1 role=head
dom Vbar -> NP id=2 role=head
top Vbar
";
    let diags = GrammarNetwork::parse_unchecked(text).unwrap().validate();
    assert_eq!(
        diags,
        vec![Diagnostic {
            kind: DiagnosticKind::HeadMultiplicity {
                node: "Vbar".into(),
                heads: 2
            }
        }]
    );
}

#[test]
fn orphan_subcategory_and_missing_top_are_diagnosed() {
    let text = "node V:NP kind=subcategory\n";
    let diags = GrammarNetwork::parse_unchecked(text).unwrap().validate();
    assert_eq!(diags.len(), 2);
}

#[test]
fn load_errors_carry_positions() {
    match GrammarNetwork::load("node S\ndom S -> X id=1\n") {
        Err(NetworkError::UndeclaredNode { line: 2, name }) => assert_eq!(name, "X"),
        other => panic!("unexpected {other:?}"),
    }
    match GrammarNetwork::load("node S\nfrobnicate S\n") {
        Err(NetworkError::Syntax { line: 2, col: 1, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    match GrammarNetwork::load("node S\nlocal S: assign {+nosuch}\n") {
        Err(NetworkError::Feature { line: 2, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    match GrammarNetwork::load("node S\nnode S\n") {
        Err(NetworkError::DuplicateNode { line: 2, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn verb_assigns_case_when_active() {
    let net = english();
    let v = net.node_id("V").unwrap();
    let out = net.apply_local(v, &av(&["(cat v)", "-passive"])).unwrap();
    assert!(out.has(&Literal::plus("ca")));
    assert!(out.has(&Literal::plus("govern")));
}

#[test]
fn local_case_filter_rejects_governor_without_case() {
    let text = "\
feature flag ca govern cm
feature valued cat {v, n}
node X
local X: reject {+govern -cm -ca}
top X
";
    let net = GrammarNetwork::load(text).unwrap();
    let x = net.node_id("X").unwrap();
    let err = net
        .apply_local(x, &av(&["+govern", "-cm", "-ca", "(cat v)"]))
        .unwrap_err();
    assert!(matches!(err.primitive, Constraint::Reject(_)));
}

#[test]
fn local_case_marking_clears_cm() {
    let text = "\
feature flag ca govern cm
node X
local X: clear {cm} when {+govern +ca -cm}
local X: reject {+govern -cm -ca}
top X
";
    let net = GrammarNetwork::load(text).unwrap();
    let x = net.node_id("X").unwrap();
    assert_eq!(
        net.apply_local(x, &av(&["+govern", "+ca", "-cm"])).unwrap(),
        av(&["+govern", "+ca"])
    );
}

#[test]
fn assignments_run_before_clears() {
    // the clear only fires if +ca was assigned first at the same node
    let text = "\
feature flag ca govern cm
node X
local X: clear {cm} when {+govern +ca -cm}
local X: assign {+ca +govern}
top X
";
    let net = GrammarNetwork::load(text).unwrap();
    let x = net.node_id("X").unwrap();
    assert_eq!(
        net.apply_local(x, &av(&["-cm"])).unwrap(),
        av(&["+govern", "+ca"])
    );
}

fn barrier_net() -> (GrammarNetwork, LinkIdx, LinkIdx) {
    let text = "\
feature flag whbarrier cm
feature valued cat {c, n}
node A
node B
node C
dom A -> B id=1 role=head barrier
dom A -> C id=2 optional
top A
";
    let net = GrammarNetwork::load(text).unwrap();
    let barrier = net.find_link("A", "B", 1).unwrap();
    let plain = net.find_link("A", "C", 2).unwrap();
    (net, barrier, plain)
}

#[test]
fn barrier_blocks_crossed_movement() {
    let (net, barrier, _) = barrier_net();
    assert!(net
        .apply_percolation(barrier, &av(&["+whbarrier", "(cat c)"]))
        .is_err());
}

#[test]
fn barrier_flips_uncrossed_movement() {
    let (net, barrier, _) = barrier_net();
    assert_eq!(
        net.apply_percolation(barrier, &av(&["-whbarrier"])).unwrap(),
        av(&["+whbarrier"])
    );
}

#[test]
fn barrier_blocks_unmarked_case() {
    let (net, barrier, _) = barrier_net();
    let err = net
        .apply_percolation(barrier, &av(&["-cm", "(cat n)"]))
        .unwrap_err();
    assert_eq!(
        err.primitive,
        Constraint::Block(Condition::Is(Literal::minus("cm")))
    );
}

#[test]
fn plain_link_is_identity() {
    let (net, _, plain) = barrier_net();
    let a = av(&["-cm", "+whbarrier", "(cat n)"]);
    assert_eq!(net.apply_percolation(plain, &a).unwrap(), a);
}

#[test]
fn render_then_load_is_a_fixpoint() {
    let net = english();
    let text = render_network(&net);
    let again = GrammarNetwork::load(&text).unwrap();
    assert_eq!(again, net);
    assert_eq!(render_network(&again), text);
}

#[test]
fn lexical_categories_pick_subcategory_nodes() {
    let net = english();
    let name = |s: &[&str], c: &[&[&str]]| {
        let comps: Vec<_> = c.iter().map(|x| av(x)).collect();
        net.lexical_node(&av(s), &comps)
            .map(|n| net.node_name(n).to_owned())
    };
    assert_eq!(name(&["(cat v)"], &[&["(cat n)", "(case acc)"]]).as_deref(), Some("V:NP"));
    assert_eq!(
        name(&["(cat v)"], &[&["(cat n)"], &["(cat n)"]]).as_deref(),
        Some("V:NP:NP")
    );
    assert_eq!(name(&["(cat v)"], &[]).as_deref(), Some("V"));
    assert_eq!(name(&["(cat i)", "(auxform do)"], &[]).as_deref(), Some("AUX"));
    assert_eq!(name(&["(cat n)"], &[&["(cat p)"]]).as_deref(), Some("N"));
    assert_eq!(name(&["(cat v)"], &[&["(cat p)"]]), None);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_att() -> impl Strategy<Value = AttributeVector> {
        let flags = ["ca", "govern", "cm", "passive", "whbarrier", "wh"];
        let per_flag = flags.map(|f| {
            prop_oneof![
                Just(None),
                Just(Some(Literal::plus(f))),
                Just(Some(Literal::minus(f)))
            ]
        });
        let tense = prop_oneof![
            Just(None),
            Just(Some(Literal::atom("tense", "past"))),
            Just(Some(Literal::atom("tense", "present")))
        ];
        let cat = prop::sample::select(vec!["v", "n", "p", "i", "c"]);
        (per_flag, tense, cat).prop_map(|(fs, t, c)| {
            AttributeVector::from_literals(
                fs.into_iter()
                    .flatten()
                    .chain(t)
                    .chain(Some(Literal::atom("cat", c))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn local_constraints_are_idempotent(att in arb_att(), node in 0usize..21) {
            let net = GrammarNetwork::english();
            let n = NodeId(node as u32);
            if let Ok(once) = net.apply_local(n, &att) {
                prop_assert_eq!(net.apply_local(n, &once), Ok(once.clone()));
                for c in &net.node(n).local {
                    if let Constraint::Reject(conds) = c {
                        prop_assert!(!all_hold(conds, &once));
                    }
                }
            }
        }

        #[test]
        fn undeclared_percolation_is_identity(att in arb_att()) {
            let net = GrammarNetwork::english();
            for (i, l) in net.dominance.iter().enumerate() {
                if !l.barrier && l.percolation.is_empty() {
                    let out = net.apply_percolation(LinkIdx(i as u32), &att);
                    prop_assert_eq!(out, Ok(att.clone()));
                }
            }
        }
    }
}
