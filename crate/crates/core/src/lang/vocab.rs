//! Fixed token vocabulary: strings <-> dense integer ids.

use std::collections::HashMap;

use super::ast::VarId;

/// Padding token id.
pub const PAD: u32 = 0;
/// Beginning-of-sequence token id.
pub const BOS: u32 = 1;
/// End-of-sequence token id.
pub const EOS: u32 = 2;

pub const N_P_VARS: u8 = 4;
pub const N_L_VARS: u8 = 32;

/// The fixed, ordered token set of the dialect.
///
/// Layout: specials, keywords, identifiers (`func_1`, `a`, `p_*`, `l_*`),
/// integer literals (single tokens, negative included), then punctuation and
/// operators. The literal span covers both the IO value range and every legal
/// `for` limit, so any pretty-printed program tokenizes within the vocabulary.
#[derive(Debug, Clone)]
pub struct Vocab {
    tokens: Vec<String>,
    by_text: HashMap<String, u32>,
    lit_lo: i64,
    lit_hi: i64,
    first_literal: u32,
}

impl Vocab {
    /// Build the vocabulary for a value range and list length.
    pub fn new(vmin: i64, vmax: i64, list_len: usize) -> Vocab {
        assert!(vmin < 0 && vmax > 0, "value range must straddle zero");
        let lit_lo = vmin;
        let lit_hi = vmax.max(list_len as i64 - 1);

        let mut tokens: Vec<String> = Vec::new();
        let push = |tokens: &mut Vec<String>, s: &str| tokens.push(s.to_string());

        push(&mut tokens, "<pad>");
        push(&mut tokens, "<bos>");
        push(&mut tokens, "<eos>");
        for kw in ["int", "for", "if", "else", "break", "continue", "return"] {
            push(&mut tokens, kw);
        }
        push(&mut tokens, "func_1");
        push(&mut tokens, "a");
        for k in 0..N_P_VARS {
            tokens.push(format!("p_{k}"));
        }
        for k in 0..N_L_VARS {
            tokens.push(format!("l_{k}"));
        }
        let first_literal = tokens.len() as u32;
        for v in lit_lo..=lit_hi {
            tokens.push(v.to_string());
        }
        for op in [
            "(", ")", "{", "}", "[", "]", ";", ",", "=", "==", "!=", "<", ">", "<=", ">=", "+",
            "-", "++", "--", "*",
        ] {
            push(&mut tokens, op);
        }

        let by_text = tokens
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Vocab { tokens, by_text, lit_lo, lit_hi, first_literal }
    }

    /// The default build: values in `[-4, 4]`, lists of length 5.
    pub fn default_vocab() -> Vocab {
        Vocab::new(-4, 4, 5)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, text: &str) -> Option<u32> {
        self.by_text.get(text).copied()
    }

    pub fn text(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn contains_id(&self, id: u32) -> bool {
        (id as usize) < self.tokens.len()
    }

    /// Id of an integer literal token, if the value is in the literal span.
    pub fn literal_id(&self, v: i64) -> Option<u32> {
        if v >= self.lit_lo && v <= self.lit_hi {
            Some(self.first_literal + (v - self.lit_lo) as u32)
        } else {
            None
        }
    }

    /// Integer value of a literal token id, if it is one.
    pub fn literal_value(&self, id: u32) -> Option<i64> {
        let span = (self.lit_hi - self.lit_lo + 1) as u32;
        if id >= self.first_literal && id < self.first_literal + span {
            Some(self.lit_lo + (id - self.first_literal) as i64)
        } else {
            None
        }
    }

    pub fn var_token(&self, var: VarId) -> u32 {
        self.id(&var.name()).expect("variable pool is in the vocabulary")
    }

    /// Variable for an identifier token id, if it is one.
    pub fn token_var(&self, id: u32) -> Option<VarId> {
        VarId::from_name(self.text(id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_size_is_fixed() {
        let v = Vocab::default_vocab();
        // 3 specials + 7 keywords + 38 identifiers + 9 literals + 20 operators
        assert_eq!(v.len(), 77);
    }

    #[test]
    fn string_id_mapping_is_bijective() {
        let v = Vocab::default_vocab();
        for id in 0..v.len() as u32 {
            assert_eq!(v.id(v.text(id)), Some(id));
        }
    }

    #[test]
    fn literal_tokens_round_trip() {
        let v = Vocab::default_vocab();
        for x in -4..=4 {
            let id = v.literal_id(x).unwrap();
            assert_eq!(v.literal_value(id), Some(x));
            assert_eq!(v.text(id), x.to_string());
        }
        assert_eq!(v.literal_id(5), None);
        assert_eq!(v.literal_id(-5), None);
    }

    #[test]
    fn longer_lists_extend_the_literal_span() {
        let v = Vocab::new(-4, 4, 8);
        assert_eq!(v.literal_id(7).map(|id| v.text(id).to_string()), Some("7".into()));
        assert_eq!(v.len(), 77 + 3);
    }
}
