//! Canonical source rendering: 4-space indent, one statement per line,
//! braced loop bodies, braceless single-statement `if` bodies.

use super::ast::*;
use super::lexer::tokenize;
use super::vocab::Vocab;

fn index_text(idx: &Index) -> String {
    match idx {
        Index::Var(v) => v.name(),
        Index::Lit(v) => v.to_string(),
    }
}

fn lvalue_text(lv: &LValue) -> String {
    match lv {
        LValue::Elem(idx) => format!("a[{}]", index_text(idx)),
        LValue::Scalar(v) => v.name(),
    }
}

fn term_text(t: &Term) -> String {
    match t {
        Term::Lit(v) => v.to_string(),
        Term::Scalar(v) => v.name(),
        Term::Elem(idx) => format!("a[{}]", index_text(idx)),
    }
}

fn expr_text(e: &Expr) -> String {
    let mut s = term_text(&e.first);
    for (op, t) in &e.rest {
        let op = match op {
            AddOp::Add => "+",
            AddOp::Sub => "-",
        };
        s.push_str(&format!(" {op} {}", term_text(t)));
    }
    s
}

fn rel_text(op: RelOp) -> &'static str {
    match op {
        RelOp::Eq => "==",
        RelOp::Ne => "!=",
        RelOp::Lt => "<",
        RelOp::Gt => ">",
        RelOp::Le => "<=",
        RelOp::Ge => ">=",
    }
}

fn cond_text(c: &Cond) -> String {
    match c {
        Cond::Truthy(e) => expr_text(e),
        Cond::Rel(l, op, r) => format!("{} {} {}", expr_text(l), rel_text(*op), expr_text(r)),
    }
}

fn is_simple(s: &Stmt) -> bool {
    matches!(s, Stmt::Assign { .. } | Stmt::IncDec { .. } | Stmt::Break | Stmt::Continue)
}

fn push_line(out: &mut String, depth: usize, line: &str) {
    for _ in 0..depth {
        out.push_str("    ");
    }
    out.push_str(line);
    out.push('\n');
}

fn print_block(out: &mut String, depth: usize, stmts: &[Stmt]) {
    push_line(out, depth, "{");
    for s in stmts {
        print_stmt(out, depth + 1, s);
    }
    push_line(out, depth, "}");
}

fn print_stmt(out: &mut String, depth: usize, stmt: &Stmt) {
    match stmt {
        Stmt::Assign { target, value } => {
            push_line(out, depth, &format!("{} = {};", lvalue_text(target), expr_text(value)));
        }
        Stmt::IncDec { target, op } => {
            let line = match op {
                IncDecOp::PostInc => format!("{}++;", lvalue_text(target)),
                IncDecOp::PostDec => format!("{}--;", lvalue_text(target)),
                IncDecOp::PreDec => format!("--{};", lvalue_text(target)),
            };
            push_line(out, depth, &line);
        }
        Stmt::For(f) => {
            let decl = if f.declares { "int " } else { "" };
            let name = f.var.name();
            let cmp = match f.cmp {
                ForCmp::Le => "<=",
                ForCmp::Ge => ">=",
            };
            let step = match f.step {
                ForStep::Inc => "++",
                ForStep::Dec => "--",
            };
            push_line(
                out,
                depth,
                &format!(
                    "for ({decl}{name} = {}; {name} {cmp} {}; {name}{step})",
                    f.init, f.bound
                ),
            );
            print_block(out, depth, &f.body);
        }
        Stmt::If { cond, then_body, else_body } => {
            push_line(out, depth, &format!("if ({})", cond_text(cond)));
            let braceless =
                else_body.is_none() && then_body.len() == 1 && is_simple(&then_body[0]);
            if braceless {
                print_stmt(out, depth + 1, &then_body[0]);
            } else {
                print_block(out, depth, then_body);
                if let Some(e) = else_body {
                    push_line(out, depth, "else");
                    print_block(out, depth, e);
                }
            }
        }
        Stmt::Break => push_line(out, depth, "break;"),
        Stmt::Continue => push_line(out, depth, "continue;"),
    }
}

/// Render a program in the canonical layout. Output always re-tokenizes and
/// re-parses to the same AST.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    out.push_str("int * func_1(int a[])\n{\n");
    for d in &program.decls {
        push_line(&mut out, 1, &format!("int {} = {};", d.var.name(), d.init));
    }
    for s in &program.body {
        print_stmt(&mut out, 1, s);
    }
    push_line(&mut out, 1, "return a;");
    out.push_str("}\n");
    out
}

/// The program's canonical token-id sequence (no BOS/EOS).
pub fn program_tokens(program: &Program, vocab: &Vocab) -> Vec<u32> {
    tokenize(&pretty_print(program), vocab)
        .expect("canonical rendering stays within the vocabulary")
}
