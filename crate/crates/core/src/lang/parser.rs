//! Recursive-descent parser over token ids.
//!
//! Beyond shape, the parser enforces the dialect's static rules, so that a
//! successful parse means the program would compile as C within the subset:
//! at most two arithmetic operations per expression, `for` limits inside
//! `[0, L-1]` with a `p_*` counter, declaration before use, no duplicate or
//! shadowing declarations, and `break`/`continue` only inside loops.

use std::fmt;

use super::ast::*;
use super::vocab::Vocab;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Unexpected token; `position` is the token index.
    Syntax { position: usize, expected: Vec<String>, found: String },
    /// Structured like the grammar but outside the dialect's invariants.
    Invariant { position: usize, reason: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { position, expected, found } => write!(
                f,
                "syntax error at token {}: expected one of [{}], found {:?}",
                position,
                expected.join(", "),
                found
            ),
            ParseError::Invariant { position, reason } => {
                write!(f, "invariant violation at token {position}: {reason}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    toks: &'a [u32],
    vocab: &'a Vocab,
    list_len: usize,
    pos: usize,
    scopes: Vec<Vec<VarId>>,
    loop_depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek_text(&self) -> &str {
        if self.pos < self.toks.len() {
            self.vocab.text(self.toks[self.pos])
        } else {
            "<end>"
        }
    }

    fn peek_id(&self) -> Option<u32> {
        self.toks.get(self.pos).copied()
    }

    fn at(&self, text: &str) -> bool {
        self.peek_id() == self.vocab.id(text)
    }

    fn bump(&mut self) -> Option<u32> {
        let t = self.peek_id();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::Syntax {
            position: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek_text().to_string(),
        })
    }

    fn invariant<T>(&self, reason: impl Into<String>) -> PResult<T> {
        Err(ParseError::Invariant { position: self.pos, reason: reason.into() })
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.at(text) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(&[text])
        }
    }

    fn declared(&self, var: VarId) -> bool {
        self.scopes.iter().any(|frame| frame.contains(&var))
    }

    fn literal(&mut self) -> PResult<i64> {
        match self.peek_id().and_then(|id| self.vocab.literal_value(id)) {
            Some(v) => {
                self.pos += 1;
                Ok(v)
            }
            None => self.syntax(&["integer literal"]),
        }
    }

    fn var(&mut self) -> PResult<VarId> {
        match self.peek_id().and_then(|id| self.vocab.token_var(id)) {
            Some(v) => {
                self.pos += 1;
                Ok(v)
            }
            None => self.syntax(&["variable"]),
        }
    }

    fn used_var(&mut self) -> PResult<VarId> {
        let at = self.pos;
        let v = self.var()?;
        if !self.declared(v) {
            return Err(ParseError::Syntax {
                position: at,
                expected: vec!["declared variable".into()],
                found: v.name(),
            });
        }
        Ok(v)
    }

    fn index(&mut self) -> PResult<Index> {
        if self.peek_id().and_then(|id| self.vocab.literal_value(id)).is_some() {
            Ok(Index::Lit(self.literal()?))
        } else {
            Ok(Index::Var(self.used_var()?))
        }
    }

    /// `a [ index ]` after the `a` has been seen, or a scalar variable.
    fn lvalue(&mut self) -> PResult<LValue> {
        if self.at("a") {
            self.pos += 1;
            self.expect("[")?;
            let idx = self.index()?;
            self.expect("]")?;
            Ok(LValue::Elem(idx))
        } else {
            Ok(LValue::Scalar(self.used_var()?))
        }
    }

    fn term(&mut self) -> PResult<Term> {
        if self.peek_id().and_then(|id| self.vocab.literal_value(id)).is_some() {
            return Ok(Term::Lit(self.literal()?));
        }
        if self.at("a") {
            self.pos += 1;
            self.expect("[")?;
            let idx = self.index()?;
            self.expect("]")?;
            return Ok(Term::Elem(idx));
        }
        if self.peek_id().and_then(|id| self.vocab.token_var(id)).is_some() {
            return Ok(Term::Scalar(self.used_var()?));
        }
        self.syntax(&["literal", "a[...]", "variable"])
    }

    fn expr(&mut self) -> PResult<Expr> {
        if self.at("(") {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let first = self.term()?;
        let mut rest = Vec::new();
        loop {
            let op = if self.at("+") {
                AddOp::Add
            } else if self.at("-") {
                AddOp::Sub
            } else {
                break;
            };
            if rest.len() == 2 {
                return self.invariant("expression has more than 2 arithmetic operations");
            }
            self.pos += 1;
            rest.push((op, self.term()?));
        }
        Ok(Expr { first, rest })
    }

    fn rel_op(&mut self) -> Option<RelOp> {
        let op = match self.peek_text() {
            "==" => RelOp::Eq,
            "!=" => RelOp::Ne,
            "<" => RelOp::Lt,
            ">" => RelOp::Gt,
            "<=" => RelOp::Le,
            ">=" => RelOp::Ge,
            _ => return None,
        };
        self.pos += 1;
        Some(op)
    }

    fn cond(&mut self) -> PResult<Cond> {
        let lhs = self.expr()?;
        match self.rel_op() {
            Some(op) => Ok(Cond::Rel(lhs, op, self.expr()?)),
            None => Ok(Cond::Truthy(lhs)),
        }
    }

    /// A braced block or a single statement.
    fn body(&mut self) -> PResult<Vec<Stmt>> {
        if self.at("{") {
            self.pos += 1;
            let mut stmts = Vec::new();
            while !self.at("}") {
                stmts.push(self.stmt()?);
            }
            self.pos += 1;
            Ok(stmts)
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn for_loop(&mut self) -> PResult<Stmt> {
        self.expect("for")?;
        self.expect("(")?;
        let declares = self.at("int");
        if declares {
            self.pos += 1;
        }
        let var_pos = self.pos;
        let var = self.var()?;
        if !matches!(var, VarId::P(_)) {
            return Err(ParseError::Syntax {
                position: var_pos,
                expected: vec!["loop counter p_*".into()],
                found: var.name(),
            });
        }
        if declares {
            if self.declared(var) {
                return self.invariant(format!("duplicate declaration of {}", var.name()));
            }
        } else if !self.declared(var) {
            return Err(ParseError::Syntax {
                position: var_pos,
                expected: vec!["declared variable".into()],
                found: var.name(),
            });
        }
        self.expect("=")?;
        let init = self.literal()?;
        self.expect(";")?;

        let again = self.var()?;
        if again != var {
            return self.invariant("for-loop test must use the loop counter");
        }
        let cmp = if self.at("<=") {
            ForCmp::Le
        } else if self.at(">=") {
            ForCmp::Ge
        } else {
            return self.syntax(&["<=", ">="]);
        };
        self.pos += 1;
        let bound = self.literal()?;
        self.expect(";")?;

        let third = self.var()?;
        if third != var {
            return self.invariant("for-loop step must use the loop counter");
        }
        let step = if self.at("++") {
            ForStep::Inc
        } else if self.at("--") {
            ForStep::Dec
        } else {
            return self.syntax(&["++", "--"]);
        };
        self.pos += 1;
        self.expect(")")?;

        let limit = self.list_len as i64 - 1;
        for (what, v) in [("initializer", init), ("limit", bound)] {
            if v < 0 || v > limit {
                return self
                    .invariant(format!("for-loop {what} {v} outside [0, {limit}]"));
            }
        }

        self.scopes.push(if declares { vec![var] } else { Vec::new() });
        self.loop_depth += 1;
        let body = self.body();
        self.loop_depth -= 1;
        self.scopes.pop();
        Ok(Stmt::For(ForLoop { var, declares, init, cmp, bound, step, body: body? }))
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        self.expect("if")?;
        self.expect("(")?;
        let cond = self.cond()?;
        self.expect(")")?;
        self.scopes.push(Vec::new());
        let then_body = self.body()?;
        self.scopes.pop();
        let else_body = if self.at("else") {
            self.pos += 1;
            self.scopes.push(Vec::new());
            let b = self.body()?;
            self.scopes.pop();
            Some(b)
        } else {
            None
        };
        Ok(Stmt::If { cond, then_body, else_body })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek_text() {
            "for" => return self.for_loop(),
            "if" => return self.if_stmt(),
            "break" | "continue" => {
                let is_break = self.at("break");
                if self.loop_depth == 0 {
                    return self.invariant("break/continue outside of a loop");
                }
                self.pos += 1;
                self.expect(";")?;
                return Ok(if is_break { Stmt::Break } else { Stmt::Continue });
            }
            "--" => {
                self.pos += 1;
                let target = self.lvalue()?;
                self.expect(";")?;
                return Ok(Stmt::IncDec { target, op: IncDecOp::PreDec });
            }
            _ => {}
        }

        let target = self.lvalue()?;
        if self.at("=") {
            self.pos += 1;
            let value = self.expr()?;
            self.expect(";")?;
            Ok(Stmt::Assign { target, value })
        } else if self.at("++") || self.at("--") {
            let op = if self.at("++") { IncDecOp::PostInc } else { IncDecOp::PostDec };
            self.pos += 1;
            self.expect(";")?;
            Ok(Stmt::IncDec { target, op })
        } else {
            self.syntax(&["=", "++", "--"])
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        self.expect("int")?;
        let var_pos = self.pos;
        let var = self.var()?;
        if self.declared(var) {
            self.pos = var_pos;
            return self.invariant(format!("duplicate declaration of {}", var.name()));
        }
        self.expect("=")?;
        let init = self.literal()?;
        self.expect(";")?;
        self.scopes[0].push(var);
        Ok(Decl { var, init })
    }

    fn program(&mut self) -> PResult<Program> {
        for t in ["int", "*", "func_1", "(", "int", "a", "[", "]", ")", "{"] {
            self.expect(t)?;
        }
        let mut decls = Vec::new();
        let mut body = Vec::new();
        while !self.at("return") {
            if self.pos >= self.toks.len() {
                return self.syntax(&["return", "statement"]);
            }
            if self.at("int") {
                decls.push(self.decl()?);
            } else {
                body.push(self.stmt()?);
            }
        }
        for t in ["return", "a", ";", "}"] {
            self.expect(t)?;
        }
        if self.pos != self.toks.len() {
            return self.syntax(&["<end>"]);
        }
        Ok(Program { decls, body })
    }
}

/// Parse a full-program token sequence (no BOS/EOS) into an AST.
pub fn parse(tokens: &[u32], vocab: &Vocab, list_len: usize) -> Result<Program, ParseError> {
    let mut p = Parser {
        toks: tokens,
        vocab,
        list_len,
        pos: 0,
        scopes: vec![Vec::new()],
        loop_depth: 0,
    };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::super::lexer::tokenize;
    use super::*;

    fn parse_src(src: &str) -> Result<Program, ParseError> {
        let v = Vocab::default_vocab();
        let toks = tokenize(src, &v).expect("lexes");
        parse(&toks, &v, 5)
    }

    fn wrap(body: &str) -> String {
        format!("int * func_1(int a[]) {{ {body} return a; }}")
    }

    #[test]
    fn empty_body_parses_to_no_statements() {
        let p = parse_src(&wrap("")).unwrap();
        assert!(p.decls.is_empty());
        assert!(p.body.is_empty());
    }

    #[test]
    fn single_decl_single_assignment() {
        let p = parse_src(&wrap("int p_0 = 2; a[p_0] = 3;")).unwrap();
        assert_eq!(p.decls.len(), 1);
        assert_eq!(p.body.len(), 1);
    }

    #[test]
    fn two_decls_one_assignment() {
        let p = parse_src(&wrap("int p_0 = 2; int l_7 = 2; a[l_7] = 2;")).unwrap();
        assert_eq!(p.decls.len(), 2);
        assert_eq!(p.body.len(), 1);
    }

    #[test]
    fn three_op_expression_is_an_invariant_violation() {
        let e = parse_src(&wrap("int p_0 = 0; a[p_0] = 1 + 2 + 3 + 4;")).unwrap_err();
        assert!(matches!(e, ParseError::Invariant { .. }), "{e}");
    }

    #[test]
    fn for_bound_outside_list_is_an_invariant_violation() {
        // -1 lexes as a negative literal after `=`; bounds must be in [0, 4]
        let e = parse_src(&wrap("int p_0 = 0; for (p_0 = -1; p_0 <= 2; p_0++) { a[p_0] = 1; }"))
            .unwrap_err();
        assert!(matches!(e, ParseError::Invariant { .. }), "{e}");
    }

    #[test]
    fn undeclared_variable_is_a_syntax_error() {
        let e = parse_src(&wrap("a[p_1] = 3;")).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { .. }), "{e}");
    }

    #[test]
    fn duplicate_declaration_is_rejected() {
        let e = parse_src(&wrap("int l_0 = 1; int l_0 = 2;")).unwrap_err();
        assert!(matches!(e, ParseError::Invariant { .. }), "{e}");
    }

    #[test]
    fn loop_scoped_counter_is_not_visible_after_the_loop() {
        let src = wrap("int p_0 = 0; for (int p_1 = 0; p_1 <= 1; p_1++) { a[p_1] = 1; } a[p_1] = 2;");
        let e = parse_src(&src).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { .. }), "{e}");
    }

    #[test]
    fn break_outside_loop_is_rejected() {
        let e = parse_src(&wrap("break;")).unwrap_err();
        assert!(matches!(e, ParseError::Invariant { .. }), "{e}");
    }

    #[test]
    fn braceless_if_body_parses() {
        let p = parse_src(&wrap(
            "int p_0 = 2; for (p_0 = 2; p_0 >= 1; p_0--) { if (a[p_0]) break; }",
        ))
        .unwrap();
        assert_eq!(p.body.len(), 1);
    }

    #[test]
    fn parenthesized_rhs_parses_to_the_same_ast() {
        let a = parse_src(&wrap("int l_7 = 3; int l_8 = 1; a[l_8] = (a[l_7] - a[0]);")).unwrap();
        let b = parse_src(&wrap("int l_7 = 3; int l_8 = 1; a[l_8] = a[l_7] - a[0];")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trailing_tokens_after_function_are_rejected_syntactically() {
        let v = Vocab::default_vocab();
        let mut toks = tokenize(&wrap(""), &v).unwrap();
        toks.push(v.id(";").unwrap());
        assert!(parse(&toks, &v, 5).is_err());
    }
}
