//! Deterministic interpreter with a step budget.
//!
//! Semantics are ordinary C over integers: conditions are truthy iff
//! nonzero, `for` runs init/test/step with the counter retained after the
//! loop (unless header-declared), `break`/`continue` act on the nearest
//! enclosing loop. Values are not clamped to the IO range — range
//! enforcement belongs to data generation — and arithmetic wraps on i64,
//! which is unreachable for generated programs (constant trip counts, two
//! operations per expression) and merely keeps execution total on
//! adversarial model output.

use std::fmt;

use super::ast::*;

/// Safety net for malformed programs; generated code with literal loop
/// limits finishes in far fewer steps.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    BudgetExceeded,
    UnboundVariable(String),
    IndexOutOfBounds { index: i64, len: usize },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::BudgetExceeded => write!(f, "step budget exceeded"),
            RunError::UnboundVariable(name) => write!(f, "unbound variable {name}"),
            RunError::IndexOutOfBounds { index, len } => {
                write!(f, "list index {index} out of bounds for length {len}")
            }
        }
    }
}

impl std::error::Error for RunError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Signal {
    Normal,
    Break,
    Continue,
}

/// Mutable execution state: the list, the scalar environment, the pending
/// control signal, and the consumed step count.
#[derive(Debug, Clone)]
pub struct MachineState {
    pub list: Vec<i64>,
    scalars: [Option<i64>; VarId::SLOTS],
    signal: Signal,
    steps: u64,
    budget: u64,
}

impl MachineState {
    pub fn new(input: &[i64], budget: u64) -> MachineState {
        MachineState {
            list: input.to_vec(),
            scalars: [None; VarId::SLOTS],
            signal: Signal::Normal,
            steps: 0,
            budget,
        }
    }

    pub fn steps_used(&self) -> u64 {
        self.steps
    }

    fn tick(&mut self) -> Result<(), RunError> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(RunError::BudgetExceeded)
        } else {
            Ok(())
        }
    }

    fn read(&self, var: VarId) -> Result<i64, RunError> {
        self.scalars[var.slot()].ok_or_else(|| RunError::UnboundVariable(var.name()))
    }

    fn write(&mut self, var: VarId, v: i64) {
        self.scalars[var.slot()] = Some(v);
    }

    fn elem_index(&self, idx: &Index) -> Result<usize, RunError> {
        let raw = match idx {
            Index::Var(v) => self.read(*v)?,
            Index::Lit(v) => *v,
        };
        if raw < 0 || raw as usize >= self.list.len() {
            Err(RunError::IndexOutOfBounds { index: raw, len: self.list.len() })
        } else {
            Ok(raw as usize)
        }
    }

    fn term(&self, t: &Term) -> Result<i64, RunError> {
        match t {
            Term::Lit(v) => Ok(*v),
            Term::Scalar(v) => self.read(*v),
            Term::Elem(idx) => Ok(self.list[self.elem_index(idx)?]),
        }
    }

    fn expr(&self, e: &Expr) -> Result<i64, RunError> {
        let mut acc = self.term(&e.first)?;
        for (op, t) in &e.rest {
            let rhs = self.term(t)?;
            acc = match op {
                AddOp::Add => acc.wrapping_add(rhs),
                AddOp::Sub => acc.wrapping_sub(rhs),
            };
        }
        Ok(acc)
    }

    fn cond(&self, c: &Cond) -> Result<bool, RunError> {
        match c {
            Cond::Truthy(e) => Ok(self.expr(e)? != 0),
            Cond::Rel(l, op, r) => {
                let (a, b) = (self.expr(l)?, self.expr(r)?);
                Ok(match op {
                    RelOp::Eq => a == b,
                    RelOp::Ne => a != b,
                    RelOp::Lt => a < b,
                    RelOp::Gt => a > b,
                    RelOp::Le => a <= b,
                    RelOp::Ge => a >= b,
                })
            }
        }
    }

    fn store(&mut self, target: &LValue, v: i64) -> Result<(), RunError> {
        match target {
            LValue::Scalar(var) => {
                // assignment requires the variable to exist already
                self.read(*var)?;
                self.write(*var, v);
                Ok(())
            }
            LValue::Elem(idx) => {
                let i = self.elem_index(idx)?;
                self.list[i] = v;
                Ok(())
            }
        }
    }

    fn load(&mut self, target: &LValue) -> Result<i64, RunError> {
        match target {
            LValue::Scalar(var) => self.read(*var),
            LValue::Elem(idx) => Ok(self.list[self.elem_index(idx)?]),
        }
    }

    fn run_block(&mut self, stmts: &[Stmt]) -> Result<(), RunError> {
        for s in stmts {
            self.run_stmt(s)?;
            if self.signal != Signal::Normal {
                break;
            }
        }
        Ok(())
    }

    fn run_for(&mut self, f: &ForLoop) -> Result<(), RunError> {
        let saved = self.scalars[f.var.slot()];
        if !f.declares {
            // non-declaring form requires a prior declaration
            self.read(f.var)?;
        }
        self.write(f.var, f.init);
        loop {
            self.tick()?;
            let counter = self.read(f.var)?;
            let keep_going = match f.cmp {
                ForCmp::Le => counter <= f.bound,
                ForCmp::Ge => counter >= f.bound,
            };
            if !keep_going {
                break;
            }
            self.run_block(&f.body)?;
            match self.signal {
                Signal::Break => {
                    self.signal = Signal::Normal;
                    break;
                }
                Signal::Continue => self.signal = Signal::Normal,
                Signal::Normal => {}
            }
            let stepped = match f.step {
                ForStep::Inc => self.read(f.var)?.wrapping_add(1),
                ForStep::Dec => self.read(f.var)?.wrapping_sub(1),
            };
            self.write(f.var, stepped);
        }
        if f.declares {
            // header-declared counters go out of scope at loop exit
            self.scalars[f.var.slot()] = saved;
        }
        Ok(())
    }

    fn run_stmt(&mut self, stmt: &Stmt) -> Result<(), RunError> {
        self.tick()?;
        match stmt {
            Stmt::Assign { target, value } => {
                let v = self.expr(value)?;
                self.store(target, v)
            }
            Stmt::IncDec { target, op } => {
                let old = self.load(target)?;
                let new = match op {
                    IncDecOp::PostInc => old.wrapping_add(1),
                    IncDecOp::PostDec | IncDecOp::PreDec => old.wrapping_sub(1),
                };
                self.store(target, new)
            }
            Stmt::For(f) => self.run_for(f),
            Stmt::If { cond, then_body, else_body } => {
                if self.cond(cond)? {
                    self.run_block(then_body)
                } else if let Some(e) = else_body {
                    self.run_block(e)
                } else {
                    Ok(())
                }
            }
            Stmt::Break => {
                self.signal = Signal::Break;
                Ok(())
            }
            Stmt::Continue => {
                self.signal = Signal::Continue;
                Ok(())
            }
        }
    }
}

/// Run a program on an input list; the input is copied, never mutated.
/// Pure in (program, input, budget).
pub fn interpret(program: &Program, input: &[i64], budget: u64) -> Result<Vec<i64>, RunError> {
    let mut st = MachineState::new(input, budget);
    for d in &program.decls {
        st.tick()?;
        st.write(d.var, d.init);
    }
    st.run_block(&program.body)?;
    Ok(st.list)
}

#[cfg(test)]
mod tests {
    use super::super::lexer::tokenize;
    use super::super::parser::parse;
    use super::super::vocab::Vocab;
    use super::*;

    fn run(src: &str, input: &[i64]) -> Result<Vec<i64>, RunError> {
        let v = Vocab::default_vocab();
        let toks = tokenize(src, &v).unwrap();
        let ast = parse(&toks, &v, input.len()).unwrap();
        interpret(&ast, input, DEFAULT_STEP_BUDGET)
    }

    fn wrap(body: &str) -> String {
        format!("int * func_1(int a[]) {{ {body} return a; }}")
    }

    #[test]
    fn simple_indexed_store() {
        let out = run(&wrap("int p_0 = 2; a[p_0] = 3;"), &[2, 4, 1, 2, -3]).unwrap();
        assert_eq!(out, vec![2, 4, 3, 2, -3]);
    }

    #[test]
    fn truthiness_takes_then_branch_iff_nonzero() {
        for (v, expected) in [(-3, 1), (1, 1), (0, 4)] {
            let body = format!("int l_0 = {v}; int p_0 = 0; if (l_0) a[p_0] = 1; if (l_0 == 0) a[p_0] = 4;");
            let out = run(&wrap(&body), &[0, 0, 0, 0, 0]).unwrap();
            assert_eq!(out[0], expected, "for guard value {v}");
        }
    }

    #[test]
    fn break_exits_nearest_loop_and_counter_retains_value() {
        let body = "int p_0 = 0; int l_0 = 0;
            for (p_0 = 2; p_0 >= 1; p_0--) { a[p_0] = 3; a[p_0] = 2; if (a[p_0]) break; }
            l_0 = 0; a[l_0] = p_0;";
        let out = run(&wrap(body), &[3, 1, 3, -2, -4]).unwrap();
        // break fires on the first iteration, so p_0 is still 2
        assert_eq!(out, vec![2, 1, 2, -2, -4]);
    }

    #[test]
    fn continue_still_steps_the_counter() {
        let body = "int p_0 = 0;
            for (p_0 = 0; p_0 <= 4; p_0++) { if (a[p_0] == 0) continue; a[p_0] = 1; }";
        let out = run(&wrap(body), &[0, 2, 0, -3, 0]).unwrap();
        assert_eq!(out, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn counter_runs_past_bound_after_normal_exit() {
        let body = "int p_0 = 0; int l_0 = 0;
            for (p_0 = 2; p_0 >= 1; p_0--) { a[p_0] = 4; }
            a[l_0] = p_0;";
        let out = run(&wrap(body), &[9, 9, 9, 9, 9]).unwrap();
        assert_eq!(out, vec![0, 4, 4, 9, 9]);
    }

    #[test]
    fn mismatched_direction_hits_the_budget() {
        let body = "int p_0 = 0; for (p_0 = 0; p_0 >= 0; p_0++) { a[0] = 1; }";
        assert_eq!(run(&wrap(body), &[0; 5]), Err(RunError::BudgetExceeded));
    }

    #[test]
    fn dynamic_index_out_of_bounds_is_an_error() {
        let body = "int l_0 = -3; a[l_0] = 1;";
        assert!(matches!(
            run(&wrap(body), &[0; 5]),
            Err(RunError::IndexOutOfBounds { index: -3, .. })
        ));
    }

    #[test]
    fn input_is_not_mutated() {
        let v = Vocab::default_vocab();
        let toks = tokenize(&wrap("a[0] = 1;"), &v).unwrap();
        let ast = parse(&toks, &v, 5).unwrap();
        let input = vec![0, 0, 0, 0, 0];
        let out = interpret(&ast, &input, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(out[0], 1);
        assert_eq!(input[0], 0);
    }

    #[test]
    fn interpret_is_deterministic() {
        let body = "int p_0 = 0; for (p_0 = 0; p_0 <= 4; p_0++) { a[p_0] = a[p_0] + 1; }";
        let a = run(&wrap(body), &[1, -1, 2, -2, 0]).unwrap();
        let b = run(&wrap(body), &[1, -1, 2, -2, 0]).unwrap();
        assert_eq!(a, b);
    }
}
