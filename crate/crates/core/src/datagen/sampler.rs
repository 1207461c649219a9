//! Grammar-directed random program sampling.
//!
//! Constraints hold by construction rather than by rejection: constants stay
//! in range, only `+`/`-` appear, loop limits are literals in `[0, L-1]`
//! paired direction-consistently with the step, and every subscript is
//! statically safe — a literal in range, a loop counter inside its own loop,
//! an `l_*` variable that only ever holds in-range literals, or `p_0` at
//! points where its value provably stays within the list.

use crate::lang::*;
use crate::rng::Prng;

use super::config::{GenConfig, SamplerProfile};

struct Sampler<'a> {
    rng: &'a mut Prng,
    cfg: &'a GenConfig,
    max_top_stmts: usize,
    max_loop_body_stmts: usize,
    max_loop_depth: usize,
    max_l_vars: usize,
    else_prob: f64,
    idx_lvars: Vec<VarId>,
    val_lvars: Vec<VarId>,
    /// p-vars usable as subscripts right now (loop counters in scope, plus
    /// p_0 whenever its value is known to be in range).
    safe_p: Vec<VarId>,
}

impl<'a> Sampler<'a> {
    fn lit_index(&mut self) -> i64 {
        self.rng.int_in(0, self.cfg.list_len as i64 - 1)
    }

    fn lit_value(&mut self) -> i64 {
        self.rng.int_in(self.cfg.vmin, self.cfg.vmax)
    }

    fn index(&mut self) -> Index {
        let n_named = self.idx_lvars.len() + self.safe_p.len();
        if n_named > 0 && self.rng.chance(0.65) {
            let k = self.rng.below(n_named as u64) as usize;
            let var = if k < self.safe_p.len() {
                self.safe_p[k]
            } else {
                self.idx_lvars[k - self.safe_p.len()]
            };
            Index::Var(var)
        } else {
            Index::Lit(self.lit_index())
        }
    }

    fn term(&mut self, first: bool) -> Term {
        let roll = self.rng.next_f64();
        if roll < 0.45 {
            Term::Elem(self.index())
        } else if roll < 0.75 || self.val_lvars.is_empty() {
            // additive identity as a trailing term is always dead code
            let mut v = self.lit_value();
            while !first && v == 0 {
                v = self.lit_value();
            }
            Term::Lit(v)
        } else {
            Term::Scalar(*self.rng.pick(&self.val_lvars))
        }
    }

    fn expr(&mut self) -> Expr {
        let n_ops = match self.rng.next_f64() {
            r if r < 0.50 => 0,
            r if r < 0.85 => 1,
            _ => 2,
        };
        let first = self.term(true);
        let rest = (0..n_ops)
            .map(|_| {
                let op = if self.rng.chance(0.5) { AddOp::Add } else { AddOp::Sub };
                (op, self.term(false))
            })
            .collect();
        Expr { first, rest }
    }

    fn assign(&mut self) -> Stmt {
        let roll = self.rng.next_f64();
        let target = if roll < 0.78 || (self.val_lvars.is_empty() && self.idx_lvars.is_empty()) {
            LValue::Elem(self.index())
        } else if roll < 0.93 && !self.val_lvars.is_empty() {
            LValue::Scalar(*self.rng.pick(&self.val_lvars))
        } else if !self.idx_lvars.is_empty() {
            // index-class variables only ever receive in-range literals
            let var = *self.rng.pick(&self.idx_lvars);
            let init = self.lit_index();
            return Stmt::Assign { target: LValue::Scalar(var), value: Expr::term(Term::Lit(init)) };
        } else {
            LValue::Elem(self.index())
        };
        if self.rng.chance(0.28) {
            let op = match self.rng.below(5) {
                0 | 1 => IncDecOp::PostInc,
                2 | 3 => IncDecOp::PostDec,
                _ => IncDecOp::PreDec,
            };
            Stmt::IncDec { target, op }
        } else {
            Stmt::Assign { target, value: self.expr() }
        }
    }

    fn cond(&mut self) -> Cond {
        let operand = |s: &mut Self| {
            if s.val_lvars.is_empty() || s.rng.chance(0.7) {
                Expr::term(Term::Elem(s.index()))
            } else {
                Expr::term(Term::Scalar(*s.rng.pick(&s.val_lvars)))
            }
        };
        if self.rng.chance(0.55) {
            Cond::Truthy(operand(self))
        } else {
            let ops = [RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Gt, RelOp::Le, RelOp::Ge];
            let rhs = if self.rng.chance(0.5) {
                Expr::term(Term::Lit(self.lit_value()))
            } else {
                operand(self)
            };
            Cond::Rel(operand(self), *self.rng.pick(&ops), rhs)
        }
    }

    fn if_stmt(&mut self, in_loop: bool) -> Stmt {
        let cond = self.cond();
        let then_body = if in_loop && self.rng.chance(0.45) {
            vec![if self.rng.chance(0.7) { Stmt::Break } else { Stmt::Continue }]
        } else {
            let n = 1 + self.rng.below(2) as usize;
            (0..n).map(|_| self.assign()).collect()
        };
        let else_body = if self.rng.chance(self.else_prob) {
            Some(vec![self.assign()])
        } else {
            None
        };
        Stmt::If { cond, then_body, else_body }
    }

    fn for_loop(&mut self, depth: usize) -> Stmt {
        let var = VarId::P(depth as u8);
        let declares = depth > 0;
        let step = if self.rng.chance(0.5) { ForStep::Inc } else { ForStep::Dec };
        let (x, y) = (self.lit_index(), self.lit_index());
        let (lo, hi) = (x.min(y), x.max(y));
        // direction-consistent limits: the loop always terminates
        let (init, cmp, bound) = match step {
            ForStep::Inc => (lo, ForCmp::Le, hi),
            ForStep::Dec => (hi, ForCmp::Ge, lo),
        };

        self.safe_p.push(var);
        let n = 1 + self.rng.below(self.max_loop_body_stmts as u64) as usize;
        let mut body = Vec::with_capacity(n);
        let mut has_if = false;
        for _ in 0..n {
            let roll = self.rng.next_f64();
            if roll < 0.22 && depth + 1 < self.max_loop_depth {
                body.push(self.for_loop(depth + 1));
            } else if roll < 0.45 && !has_if {
                has_if = true;
                body.push(self.if_stmt(true));
            } else {
                body.push(self.assign());
            }
        }
        self.safe_p.pop();

        if var == VarId::P(0) {
            // after a normal exit the counter sits one past the bound
            let post = match step {
                ForStep::Inc => bound + 1,
                ForStep::Dec => bound - 1,
            };
            let safe = post >= 0 && post < self.cfg.list_len as i64;
            let listed = self.safe_p.contains(&var);
            if safe && !listed {
                self.safe_p.push(var);
            } else if !safe && listed {
                self.safe_p.retain(|&v| v != var);
            }
        }
        Stmt::For(ForLoop { var, declares, init, cmp, bound, step, body })
    }

    fn program(&mut self, need_for: Option<bool>) -> Program {
        let mut decls = vec![Decl { var: VarId::P(0), init: self.lit_index() }];
        self.safe_p.push(VarId::P(0));

        let n_l = self.rng.below(self.max_l_vars as u64 + 1) as usize;
        let mut names: Vec<u8> = (0..32).collect();
        self.rng.shuffle(&mut names);
        for &k in names.iter().take(n_l) {
            let var = VarId::L(k);
            if self.rng.chance(0.5) {
                let init = self.lit_index();
                self.idx_lvars.push(var);
                decls.push(Decl { var, init });
            } else {
                let init = self.lit_value();
                self.val_lvars.push(var);
                decls.push(Decl { var, init });
            }
        }

        let n_top = 1 + self.rng.below(self.max_top_stmts as u64) as usize;
        let mut kinds: Vec<u8> = (0..n_top)
            .map(|_| {
                let roll = self.rng.next_f64();
                if roll < 0.38 && need_for != Some(false) {
                    1 // for
                } else if roll < 0.48 {
                    2 // if
                } else {
                    0 // assignment
                }
            })
            .collect();
        if need_for == Some(true) && !kinds.contains(&1) {
            let slot = self.rng.below(n_top as u64) as usize;
            kinds[slot] = 1;
        }

        let body = kinds
            .into_iter()
            .map(|kind| match kind {
                1 => self.for_loop(0),
                2 => self.if_stmt(false),
                _ => self.assign(),
            })
            .collect();
        Program { decls, body }
    }
}

fn tiny_program(rng: &mut Prng, cfg: &GenConfig) -> Program {
    let i = rng.int_in(0, cfg.list_len as i64 - 1);
    let target = LValue::Elem(Index::Lit(i));
    let stmt = match rng.next_f64() {
        r if r < 0.45 => Stmt::Assign {
            target,
            value: Expr::term(Term::Lit(rng.int_in(cfg.vmin, cfg.vmax))),
        },
        r if r < 0.80 => {
            let mut j = rng.int_in(0, cfg.list_len as i64 - 1);
            while j == i {
                j = rng.int_in(0, cfg.list_len as i64 - 1);
            }
            Stmt::Assign { target, value: Expr::term(Term::Elem(Index::Lit(j))) }
        }
        r if r < 0.90 => Stmt::IncDec { target, op: IncDecOp::PostInc },
        _ => Stmt::IncDec { target, op: IncDecOp::PostDec },
    };
    Program { decls: Vec::new(), body: vec![stmt] }
}

/// Sample one candidate program. All structural invariants hold by
/// construction; triviality and IO-range filtering happen downstream.
pub fn sample_candidate(rng: &mut Prng, cfg: &GenConfig) -> Program {
    sample_candidate_with(rng, cfg, None)
}

/// As [`sample_candidate`], optionally forcing the presence or absence of
/// `for` loops (used by the loop-fraction reweighting).
pub(crate) fn sample_candidate_with(
    rng: &mut Prng,
    cfg: &GenConfig,
    need_for: Option<bool>,
) -> Program {
    match cfg.profile {
        SamplerProfile::Tiny => tiny_program(rng, cfg),
        SamplerProfile::Standard {
            max_top_stmts,
            max_loop_body_stmts,
            max_loop_depth,
            max_l_vars,
            else_prob,
        } => {
            let mut s = Sampler {
                rng,
                cfg,
                max_top_stmts,
                max_loop_body_stmts,
                max_loop_depth,
                max_l_vars,
                else_prob,
                idx_lvars: Vec::new(),
                val_lvars: Vec::new(),
                safe_p: Vec::new(),
            };
            s.program(need_for)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{contains_for, parse, program_tokens, Vocab};

    #[test]
    fn forced_loops_are_present() {
        let cfg = GenConfig::desk(3);
        let mut rng = Prng::seed_from(&[9]);
        for _ in 0..200 {
            let ast = sample_candidate_with(&mut rng, &cfg, Some(true));
            assert!(contains_for(&ast));
        }
    }

    #[test]
    fn forbidden_loops_are_absent() {
        let cfg = GenConfig::desk(3);
        let mut rng = Prng::seed_from(&[10]);
        for _ in 0..200 {
            let ast = sample_candidate_with(&mut rng, &cfg, Some(false));
            assert!(!contains_for(&ast));
        }
    }

    #[test]
    fn samples_reparse_to_the_same_ast() {
        let cfg = GenConfig::desk(3);
        let vocab = Vocab::default_vocab();
        let mut rng = Prng::seed_from(&[11]);
        for _ in 0..500 {
            let ast = sample_candidate(&mut rng, &cfg);
            let toks = program_tokens(&ast, &vocab);
            let back = parse(&toks, &vocab, cfg.list_len).expect("generated programs parse");
            assert_eq!(back, ast);
        }
    }

    #[test]
    fn tiny_profile_fits_the_token_budget() {
        let cfg = GenConfig::tiny(0, 10);
        let vocab = Vocab::default_vocab();
        let mut rng = Prng::seed_from(&[12]);
        for _ in 0..200 {
            let ast = sample_candidate(&mut rng, &cfg);
            assert!(program_tokens(&ast, &vocab).len() <= 24);
        }
    }
}
