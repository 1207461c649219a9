//! Typed syntax tree for the dialect.

use serde::{Deserialize, Serialize};

/// A scalar variable: loop counters `p_0..p_3` or locals `l_0..l_31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarId {
    P(u8),
    L(u8),
}

impl VarId {
    pub fn name(&self) -> String {
        match self {
            VarId::P(k) => format!("p_{k}"),
            VarId::L(k) => format!("l_{k}"),
        }
    }

    pub fn from_name(name: &str) -> Option<VarId> {
        let parse_idx = |rest: &str, max: u8| rest.parse::<u8>().ok().filter(|&k| k < max);
        if let Some(rest) = name.strip_prefix("p_") {
            return parse_idx(rest, super::vocab::N_P_VARS).map(VarId::P);
        }
        if let Some(rest) = name.strip_prefix("l_") {
            return parse_idx(rest, super::vocab::N_L_VARS).map(VarId::L);
        }
        None
    }

    /// Dense slot index for environment storage.
    pub fn slot(&self) -> usize {
        match self {
            VarId::P(k) => *k as usize,
            VarId::L(k) => super::vocab::N_P_VARS as usize + *k as usize,
        }
    }

    pub const SLOTS: usize = (super::vocab::N_P_VARS + super::vocab::N_L_VARS) as usize;
}

/// A list subscript: `a[p_0]`, `a[l_7]`, or `a[2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Index {
    Var(VarId),
    Lit(i64),
}

/// Assignment target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LValue {
    Elem(Index),
    Scalar(VarId),
}

/// Atomic operand of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    Lit(i64),
    Scalar(VarId),
    Elem(Index),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AddOp {
    Add,
    Sub,
}

/// Flat left-associative sum of at most three terms (two operations).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expr {
    pub first: Term,
    pub rest: Vec<(AddOp, Term)>,
}

impl Expr {
    pub fn term(t: Term) -> Expr {
        Expr { first: t, rest: Vec::new() }
    }

    pub fn op_count(&self) -> usize {
        self.rest.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

/// An `if` condition: bare truthy expression or one relational comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cond {
    Truthy(Expr),
    Rel(Expr, RelOp, Expr),
}

/// `for` test operator; paired with the step direction by the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForCmp {
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForStep {
    Inc,
    Dec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncDecOp {
    PostInc,
    PostDec,
    PreDec,
}

/// `for (p_k = init; p_k <= bound; p_k++) { body }`; `declares` marks the
/// `for (int p_k = ...)` form that scopes the counter to the loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForLoop {
    pub var: VarId,
    pub declares: bool,
    pub init: i64,
    pub cmp: ForCmp,
    pub bound: i64,
    pub step: ForStep,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stmt {
    Assign { target: LValue, value: Expr },
    IncDec { target: LValue, op: IncDecOp },
    For(ForLoop),
    If { cond: Cond, then_body: Vec<Stmt>, else_body: Option<Vec<Stmt>> },
    Break,
    Continue,
}

/// Top-level declaration `int v = lit;`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decl {
    pub var: VarId,
    pub init: i64,
}

/// One function `int * func_1(int a[]) { decls; body; return a; }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Vec<Stmt>,
}

impl Program {
    pub fn empty() -> Program {
        Program { decls: Vec::new(), body: Vec::new() }
    }
}

/// Control-flow complexity classes used for dataset statistics and
/// per-class accuracy reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ControlFlowClass {
    SeqOnly,
    ForOnly,
    Mixture,
}

impl ControlFlowClass {
    pub const ALL: [ControlFlowClass; 3] =
        [ControlFlowClass::SeqOnly, ControlFlowClass::ForOnly, ControlFlowClass::Mixture];

    pub fn name(&self) -> &'static str {
        match self {
            ControlFlowClass::SeqOnly => "SeqOnly",
            ControlFlowClass::ForOnly => "ForOnly",
            ControlFlowClass::Mixture => "Mixture",
        }
    }

    pub fn from_name(s: &str) -> Option<ControlFlowClass> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }
}

fn scan_stmts(stmts: &[Stmt], has_for: &mut bool, has_if: &mut bool) {
    for s in stmts {
        match s {
            Stmt::For(f) => {
                *has_for = true;
                scan_stmts(&f.body, has_for, has_if);
            }
            Stmt::If { then_body, else_body, .. } => {
                *has_if = true;
                scan_stmts(then_body, has_for, has_if);
                if let Some(e) = else_body {
                    scan_stmts(e, has_for, has_if);
                }
            }
            _ => {}
        }
    }
}

/// `SeqOnly` iff no control flow at all; `ForOnly` iff loops but no `if`;
/// `Mixture` whenever any `if` is present.
pub fn classify_control_flow(program: &Program) -> ControlFlowClass {
    let (mut has_for, mut has_if) = (false, false);
    scan_stmts(&program.body, &mut has_for, &mut has_if);
    match (has_for, has_if) {
        (false, false) => ControlFlowClass::SeqOnly,
        (true, false) => ControlFlowClass::ForOnly,
        _ => ControlFlowClass::Mixture,
    }
}

/// True if any `for` loop occurs anywhere in the program.
pub fn contains_for(program: &Program) -> bool {
    let (mut has_for, mut has_if) = (false, false);
    scan_stmts(&program.body, &mut has_for, &mut has_if);
    has_for
}
