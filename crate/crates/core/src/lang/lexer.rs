//! Text to token ids and back.

use std::fmt;

use super::vocab::Vocab;

/// Lexing failure: the source contains something outside the dialect's
/// lexeme set (unknown word, out-of-range number, stray character).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    /// Byte offset of the offending lexeme.
    pub position: usize,
    pub lexeme: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown lexeme {:?} at byte {}", self.lexeme, self.position)
    }
}

impl std::error::Error for LexError {}

fn is_word_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_word_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

/// True if a `-digit...` after this token reads as a negative literal rather
/// than binary minus. Anything that ends a value (identifier, literal, `)`,
/// `]`, `++`, `--`) forces the binary reading.
fn allows_negative_literal(prev: Option<&str>, vocab: &Vocab) -> bool {
    match prev {
        None => true,
        Some(p) => {
            if matches!(p, ")" | "]" | "++" | "--") {
                return false;
            }
            if let Some(id) = vocab.id(p) {
                if vocab.literal_value(id).is_some() {
                    return false;
                }
            }
            // identifiers end a value; keywords and operators do not
            !(is_word_start(p.as_bytes()[0])
                && !matches!(p, "int" | "for" | "if" | "else" | "break" | "continue" | "return"))
        }
    }
}

/// Tokenize dialect source text into vocabulary ids.
///
/// Deterministic maximal-munch scan; negative integers lex as single tokens
/// in value position (`= -3`) and as minus-then-literal after a value
/// (`a[0] - 3`).
pub fn tokenize(source: &str, vocab: &Vocab) -> Result<Vec<u32>, LexError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut prev: Option<String> = None;
    let mut i = 0usize;

    let err = |position: usize, lexeme: &str| LexError { position, lexeme: to_owned(lexeme) };
    fn to_owned(s: &str) -> String {
        s.to_string()
    }

    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }

        let start = i;
        let lexeme: String = if is_word_start(c) {
            let mut j = i + 1;
            while j < bytes.len() && is_word_char(bytes[j]) {
                j += 1;
            }
            i = j;
            source[start..j].to_string()
        } else if c.is_ascii_digit()
            || (c == b'-'
                && i + 1 < bytes.len()
                && bytes[i + 1].is_ascii_digit()
                && allows_negative_literal(prev.as_deref(), vocab))
        {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
            source[start..j].to_string()
        } else {
            // operators: try two characters, then one
            let two = if i + 1 < bytes.len() { &source[i..i + 2] } else { "" };
            if matches!(two, "==" | "!=" | "<=" | ">=" | "++" | "--") {
                i += 2;
                two.to_string()
            } else {
                let one = &source[i..i + 1];
                i += 1;
                one.to_string()
            }
        };

        match vocab.id(&lexeme) {
            Some(id) => {
                out.push(id);
                prev = Some(lexeme);
            }
            None => return Err(err(start, &lexeme)),
        }
    }
    Ok(out)
}

/// Render token ids back to parseable text (single spaces between tokens).
/// Inverse of [`tokenize`] up to whitespace.
pub fn detokenize(tokens: &[u32], vocab: &Vocab) -> String {
    let mut out = String::new();
    for (i, &t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(vocab.text(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(src: &str) -> Vec<String> {
        let v = Vocab::default_vocab();
        tokenize(src, &v).unwrap().iter().map(|&t| v.text(t).to_string()).collect()
    }

    #[test]
    fn simple_assignment() {
        assert_eq!(ids("a[p_0] = 3 ;"), vec!["a", "[", "p_0", "]", "=", "3", ";"]);
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        let v = Vocab::default_vocab();
        let e = tokenize("a[q_9]", &v).unwrap_err();
        assert_eq!(e.lexeme, "q_9");
        assert_eq!(e.position, 2);
    }

    #[test]
    fn out_of_range_number_is_rejected() {
        let v = Vocab::default_vocab();
        let e = tokenize("a[0] = 7;", &v).unwrap_err();
        assert_eq!(e.lexeme, "7");
    }

    #[test]
    fn negative_literal_in_value_position() {
        assert_eq!(ids("int l_0 = -3 ;"), vec!["int", "l_0", "=", "-3", ";"]);
        assert_eq!(ids("if (a[0] == -4)"), vec!["if", "(", "a", "[", "0", "]", "==", "-4", ")"]);
    }

    #[test]
    fn minus_after_value_is_binary() {
        assert_eq!(ids("a[0] = a[1] - 3;")[8..], ["]", "-", "3", ";"]);
        assert_eq!(ids("a[0] = 1 - -3;")[5..8], ["1", "-", "-3"]);
    }

    #[test]
    fn prefix_decrement_lexes_as_one_token() {
        assert_eq!(ids("--a[l_25];"), vec!["--", "a", "[", "l_25", "]", ";"]);
    }

    #[test]
    fn detokenize_round_trips() {
        let v = Vocab::default_vocab();
        let toks = tokenize("int p_0 = -2 ; a [ p_0 ] ++ ;", &v).unwrap();
        let text = detokenize(&toks, &v);
        assert_eq!(tokenize(&text, &v).unwrap(), toks);
    }

    /// Token count fixed by hand before the tokenizer existed:
    /// `int * func_1 ( int a [ ] ) {` = 10, `int p_0 = 2 ;` = 5,
    /// `a [ p_0 ] = 3 ;` = 7, `return a ;` = 3, `}` = 1 -> 26.
    #[test]
    fn hand_counted_full_program() {
        let src = "int * func_1(int a[])\n{\n    int p_0 = 2;\n    a[p_0] = 3;\n    return a;\n}";
        let v = Vocab::default_vocab();
        assert_eq!(tokenize(src, &v).unwrap().len(), 26);
    }
}
