//! Interpreter fidelity against the reference tasks: ground-truth and
//! predicted programs must reproduce every listed IO pair exactly, and the
//! canonical renderer must round-trip all of them.

mod common;

use common::REFERENCE_ROWS;
use lasynth_core::lang::{
    classify_control_flow, interpret, parse, pretty_print, tokenize, ControlFlowClass, Vocab,
    DEFAULT_STEP_BUDGET,
};

fn parse_src(src: &str, vocab: &Vocab) -> lasynth_core::lang::Program {
    let toks = tokenize(src, vocab).expect("reference program lexes");
    parse(&toks, vocab, 5).expect("reference program parses")
}

#[test]
fn reference_programs_reproduce_all_listed_pairs() {
    let vocab = Vocab::default_vocab();
    for (row_idx, row) in REFERENCE_ROWS.iter().enumerate() {
        let mut programs = vec![parse_src(row.ground_truth, &vocab)];
        for p in row.predicted {
            programs.push(parse_src(p, &vocab));
        }
        for (prog_idx, prog) in programs.iter().enumerate() {
            for (input, expected) in row.pairs {
                let got = interpret(prog, input, DEFAULT_STEP_BUDGET).unwrap();
                assert_eq!(
                    got, expected,
                    "row {row_idx} program {prog_idx} on input {input:?}"
                );
            }
        }
    }
}

#[test]
fn reference_programs_round_trip_through_the_printer() {
    let vocab = Vocab::default_vocab();
    for row in REFERENCE_ROWS {
        for src in std::iter::once(row.ground_truth).chain(row.predicted.iter().copied()) {
            let ast = parse_src(src, &vocab);
            let printed = pretty_print(&ast);
            assert_eq!(printed, src, "canonical layout matches the reference layout");
            let again = parse_src(&printed, &vocab);
            assert_eq!(again, ast);
        }
    }
}

#[test]
fn reference_programs_classify_as_expected() {
    let vocab = Vocab::default_vocab();
    let class = |src: &str| classify_control_flow(&parse_src(src, &vocab));

    // ground truths: assignments only / for+if / for+if / nested for / for+if
    let gt: Vec<_> = REFERENCE_ROWS.iter().map(|r| class(r.ground_truth)).collect();
    assert_eq!(
        gt,
        vec![
            ControlFlowClass::SeqOnly,
            ControlFlowClass::Mixture,
            ControlFlowClass::Mixture,
            ControlFlowClass::ForOnly,
            ControlFlowClass::Mixture,
        ]
    );

    assert_eq!(class(REFERENCE_ROWS[0].predicted[0]), ControlFlowClass::SeqOnly);
    assert_eq!(class(REFERENCE_ROWS[3].predicted[0]), ControlFlowClass::ForOnly);
}
