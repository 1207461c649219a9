//! Program correctness against IO pairs.

use crate::datagen::IoPair;
use crate::lang::{interpret, parse, Vocab, BOS, EOS, PAD};

/// Drop a leading BOS, a trailing EOS, and any padding.
pub fn strip_specials(tokens: &[u32]) -> Vec<u32> {
    tokens
        .iter()
        .copied()
        .skip_while(|&t| t == BOS)
        .take_while(|&t| t != EOS)
        .filter(|&t| t != PAD)
        .collect()
}

/// True iff the tokens parse as a program that reproduces every pair.
/// Anything that fails to lex/parse or errors at runtime is simply `false`.
pub fn check_program(
    tokens: &[u32],
    pairs: &[IoPair],
    vocab: &Vocab,
    list_len: usize,
    budget: u64,
) -> bool {
    let clean = strip_specials(tokens);
    if clean.iter().any(|&t| !vocab.contains_id(t)) {
        return false;
    }
    let Ok(ast) = parse(&clean, vocab, list_len) else {
        return false;
    };
    pairs.iter().all(|(input, output)| {
        matches!(interpret(&ast, input, budget), Ok(got) if got == *output)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{tokenize, DEFAULT_STEP_BUDGET};

    #[test]
    fn correct_program_passes_its_pairs() {
        let v = Vocab::default_vocab();
        let toks =
            tokenize("int * func_1(int a[]) { int p_0 = 2; a[p_0] = 3; return a; }", &v).unwrap();
        let pairs = vec![
            (vec![2, 4, 1, 2, -3], vec![2, 4, 3, 2, -3]),
            (vec![0, -2, 3, 1, 3], vec![0, -2, 3, 1, 3]),
        ];
        assert!(check_program(&toks, &pairs, &v, 5, DEFAULT_STEP_BUDGET));
    }

    #[test]
    fn wrong_output_fails() {
        let v = Vocab::default_vocab();
        let toks =
            tokenize("int * func_1(int a[]) { int p_0 = 2; a[p_0] = 3; return a; }", &v).unwrap();
        let pairs = vec![(vec![0, 0, 0, 0, 0], vec![0, 0, 4, 0, 0])];
        assert!(!check_program(&toks, &pairs, &v, 5, DEFAULT_STEP_BUDGET));
    }

    #[test]
    fn token_soup_fails_instead_of_erroring() {
        let v = Vocab::default_vocab();
        let soup: Vec<u32> = (0..20).map(|i| (i * 3) % v.len() as u32).collect();
        let pairs = vec![(vec![0, 0, 0, 0, 0], vec![0, 0, 0, 0, 0])];
        assert!(!check_program(&soup, &pairs, &v, 5, DEFAULT_STEP_BUDGET));
    }

    #[test]
    fn specials_are_stripped_before_parsing() {
        let v = Vocab::default_vocab();
        let mut toks = vec![BOS];
        toks.extend(tokenize("int * func_1(int a[]) { return a; }", &v).unwrap());
        toks.push(EOS);
        // identity program: passes exactly the identity pairs
        let pairs = vec![(vec![1, 2, 3, 4, 0], vec![1, 2, 3, 4, 0])];
        assert!(check_program(&toks, &pairs, &v, 5, DEFAULT_STEP_BUDGET));
    }
}
