//! Exact feasibility of linear inequality systems over the rationals.
//!
//! Fourier–Motzkin elimination with strict/weak tracking decides whether a
//! conjunction of constraints `Σ c_i·x_i + d ≤ 0` (or `< 0`) has a rational
//! solution, and back-substitution produces an exact witness when it does.
//! Strictness is preserved through elimination (a combination is strict iff
//! either parent is), so open systems — ubiquitous here because auction
//! tie-breaks separate `≥` from `>` — are decided soundly.
//!
//! A small disjunctive extension ([`solve_with_disjunctions`]) searches over
//! systems of the form `base ∧ (A₁ ∨ A₂) ∧ (B₁ ∨ …)`, pruning any branch
//! whose conjunctive part is already infeasible. Equilibrium-blocking
//! conditions ("the deviation is unprofitable *or* unavailable") compile to
//! exactly this shape.
//!
//! Everything is deterministic: constraint sets are normalized and sorted at
//! every level, so identical inputs yield identical witnesses.

use crate::rational::Q;
use std::collections::HashMap;

/// Whether a constraint's comparison is `≤ 0` or `< 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strictness {
    /// `Σ c_i·x_i + d ≤ 0`.
    Weak,
    /// `Σ c_i·x_i + d < 0`.
    Strict,
}

/// One linear constraint `Σ coeffs[i]·x_i + constant (≤|<) 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    coeffs: Vec<Q>,
    constant: Q,
    strictness: Strictness,
}

impl Constraint {
    /// The comparison kind.
    pub fn strictness(&self) -> Strictness {
        self.strictness
    }

    /// True iff the constraint holds at the given point.
    pub fn holds_at(&self, x: &[Q]) -> bool {
        assert_eq!(x.len(), self.coeffs.len(), "dimension mismatch");
        let lhs: Q = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(c, xi)| c * xi)
            .sum::<Q>()
            + self.constant.clone();
        match self.strictness {
            Strictness::Weak => !lhs.is_positive(),
            Strictness::Strict => lhs.is_negative(),
        }
    }
}

/// An affine expression `Σ coeffs[i]·x_i + constant` used to build
/// constraints readably.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    coeffs: Vec<Q>,
    constant: Q,
}

impl Expr {
    /// The zero expression over `num_vars` variables.
    pub fn zero(num_vars: usize) -> Self {
        Expr {
            coeffs: vec![Q::zero(); num_vars],
            constant: Q::zero(),
        }
    }

    /// The single variable `x_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        Self::term(num_vars, i, Q::one())
    }

    /// The constant expression `c`.
    pub fn lit(num_vars: usize, c: Q) -> Self {
        Expr {
            coeffs: vec![Q::zero(); num_vars],
            constant: c,
        }
    }

    /// The scaled variable `c·x_i`.
    pub fn term(num_vars: usize, i: usize, c: Q) -> Self {
        assert!(i < num_vars, "variable index out of range");
        let mut coeffs = vec![Q::zero(); num_vars];
        coeffs[i] = c;
        Expr {
            coeffs,
            constant: Q::zero(),
        }
    }

    /// `self + other`.
    pub fn plus(&self, other: &Expr) -> Expr {
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "dimension mismatch");
        Expr {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            constant: &self.constant + &other.constant,
        }
    }

    /// `self − other`.
    pub fn minus(&self, other: &Expr) -> Expr {
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "dimension mismatch");
        Expr {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            constant: &self.constant - &other.constant,
        }
    }

    /// `c·self`.
    pub fn scaled(&self, c: &Q) -> Expr {
        Expr {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            constant: &self.constant * c,
        }
    }

    /// Constraint `self ≤ other`.
    pub fn le(&self, other: &Expr) -> Constraint {
        let d = self.minus(other);
        Constraint {
            coeffs: d.coeffs,
            constant: d.constant,
            strictness: Strictness::Weak,
        }
    }

    /// Constraint `self < other`.
    pub fn lt(&self, other: &Expr) -> Constraint {
        let d = self.minus(other);
        Constraint {
            coeffs: d.coeffs,
            constant: d.constant,
            strictness: Strictness::Strict,
        }
    }

    /// Constraint `self ≥ other`.
    pub fn ge(&self, other: &Expr) -> Constraint {
        other.le(self)
    }

    /// Constraint `self > other`.
    pub fn gt(&self, other: &Expr) -> Constraint {
        other.lt(self)
    }

    /// The pair of weak constraints equivalent to `self = other`.
    pub fn eq(&self, other: &Expr) -> [Constraint; 2] {
        [self.le(other), self.ge(other)]
    }

    /// Evaluate at a point.
    pub fn value_at(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.coeffs.len(), "dimension mismatch");
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, xi)| c * xi)
            .sum::<Q>()
            + self.constant.clone()
    }
}

/// A conjunction of linear constraints over a fixed variable count.
#[derive(Clone, Debug)]
pub struct System {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

/// One disjunction: at least one of the alternative conjunctions must hold.
#[derive(Clone, Debug)]
pub struct Disjunction {
    /// The alternatives, each a conjunction of constraints.
    pub cases: Vec<Vec<Constraint>>,
}

impl System {
    /// An empty (always satisfiable) system over `num_vars` variables.
    pub fn new(num_vars: usize) -> Self {
        System {
            num_vars,
            constraints: Vec::new(),
        }
    }

    /// Number of variables.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Add one constraint.
    pub fn push(&mut self, c: Constraint) {
        assert_eq!(c.coeffs.len(), self.num_vars, "dimension mismatch");
        self.constraints.push(c);
    }

    /// Add several constraints.
    pub fn extend(&mut self, cs: impl IntoIterator<Item = Constraint>) {
        for c in cs {
            self.push(c);
        }
    }

    /// A copy of this system with extra constraints appended.
    pub fn and(&self, cs: &[Constraint]) -> System {
        let mut out = self.clone();
        out.extend(cs.iter().cloned());
        out
    }

    /// True iff every constraint holds at the given point.
    pub fn holds_at(&self, x: &[Q]) -> bool {
        self.constraints.iter().all(|c| c.holds_at(x))
    }

    /// Decide feasibility; return an exact witness if satisfiable.
    ///
    /// Variables are eliminated highest-index first; the witness is rebuilt
    /// by back-substitution, taking midpoints of open intervals and the
    /// simplest admissible value elsewhere.
    pub fn solve(&self) -> Option<Vec<Q>> {
        // levels[t] holds the projection onto variables 0..num_vars−t.
        let mut levels: Vec<Vec<Constraint>> = Vec::with_capacity(self.num_vars + 1);
        let mut current = normalize(self.num_vars, self.constraints.clone())?;
        levels.push(current.clone());
        for width in (0..self.num_vars).rev() {
            current = eliminate_top_variable(width, &current)?;
            levels.push(current.clone());
        }

        let mut x: Vec<Q> = Vec::with_capacity(self.num_vars);
        for k in 0..self.num_vars {
            // Constraints whose top variable is x_k live at width k+1.
            let level = &levels[self.num_vars - (k + 1)];
            x.push(pick_value(level, k, &x));
        }
        debug_assert!(
            self.holds_at(&x),
            "back-substituted witness violates the system"
        );
        Some(x)
    }
}

/// Decide `base ∧ disjunctions`, depth-first over the alternatives with
/// feasibility pruning at every node. Returns the first witness found under
/// the deterministic branch order.
pub fn solve_with_disjunctions(base: &System, disjunctions: &[Disjunction]) -> Option<Vec<Q>> {
    let witness = base.solve()?;
    let Some((first, rest)) = disjunctions.split_first() else {
        return Some(witness);
    };
    for case in &first.cases {
        let extended = base.and(case);
        if let Some(w) = solve_with_disjunctions(&extended, rest) {
            return Some(w);
        }
    }
    None
}

/// Canonicalize a constraint set: scale each constraint so its leading
/// nonzero coefficient is ±1, discharge constant-only constraints (returning
/// `None` on a contradiction like `1 ≤ 0`), keep only the tightest constraint
/// per coefficient vector, and sort. The result is order-independent.
fn normalize(width: usize, constraints: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut tightest: HashMap<Vec<Q>, (Q, Strictness)> = HashMap::new();
    for c in constraints {
        debug_assert_eq!(c.coeffs.len(), width);
        match c.coeffs.iter().find(|q| !q.is_zero()) {
            None => {
                let violated = match c.strictness {
                    Strictness::Weak => c.constant.is_positive(),
                    Strictness::Strict => !c.constant.is_negative(),
                };
                if violated {
                    return None;
                }
            }
            Some(lead) => {
                let scale = lead.abs().recip().expect("leading coefficient is nonzero");
                let coeffs: Vec<Q> = c.coeffs.iter().map(|q| q * &scale).collect();
                let constant = &c.constant * &scale;
                let entry = tightest.entry(coeffs).or_insert_with(|| {
                    (constant.clone(), c.strictness)
                });
                // Larger constant is tighter; at equal constants strict wins.
                if constant > entry.0 {
                    *entry = (constant, c.strictness);
                } else if constant == entry.0 && c.strictness == Strictness::Strict {
                    entry.1 = Strictness::Strict;
                }
            }
        }
    }
    let mut out: Vec<Constraint> = tightest
        .into_iter()
        .map(|(coeffs, (constant, strictness))| Constraint {
            coeffs,
            constant,
            strictness,
        })
        .collect();
    out.sort();
    Some(out)
}

/// Project away variable `width` (the top variable of `width+1`-wide
/// constraints), returning the normalized `width`-wide projection, or `None`
/// if a contradiction among constants appears.
fn eliminate_top_variable(width: usize, constraints: &[Constraint]) -> Option<Vec<Constraint>> {
    let mut kept: Vec<Constraint> = Vec::new();
    // (remaining coeffs, constant, strictness, top coefficient)
    let mut uppers: Vec<(Vec<Q>, Q, Strictness, Q)> = Vec::new();
    let mut lowers: Vec<(Vec<Q>, Q, Strictness, Q)> = Vec::new();
    for c in constraints {
        let top = c.coeffs[width].clone();
        let rest: Vec<Q> = c.coeffs[..width].to_vec();
        if top.is_zero() {
            kept.push(Constraint {
                coeffs: rest,
                constant: c.constant.clone(),
                strictness: c.strictness,
            });
        } else if top.is_positive() {
            uppers.push((rest, c.constant.clone(), c.strictness, top));
        } else {
            lowers.push((rest, c.constant.clone(), c.strictness, top));
        }
    }
    // From b·x + e (≤|<) 0 with b > 0 and a·x + f (≤|<) 0 with a < 0:
    // (−a)·(b·x + e) + b·(a·x + f) = (−a)·e + b·f (≤|<) 0, strict iff either.
    for (ue, uconst, ustrict, b) in &uppers {
        for (lf, lconst, lstrict, a) in &lowers {
            let neg_a = -a;
            let coeffs: Vec<Q> = ue
                .iter()
                .zip(lf)
                .map(|(e, f)| &(&neg_a * e) + &(b * f))
                .collect();
            let constant = &(&neg_a * uconst) + &(b * lconst);
            let strictness =
                if *ustrict == Strictness::Strict || *lstrict == Strictness::Strict {
                    Strictness::Strict
                } else {
                    Strictness::Weak
                };
            kept.push(Constraint {
                coeffs,
                constant,
                strictness,
            });
        }
    }
    normalize(width, kept)
}

/// Given the level whose top variable is `x_k` and values for `x_0..x_{k−1}`,
/// pick an admissible value for `x_k`. The level is a faithful projection,
/// so the induced interval is nonempty.
fn pick_value(level: &[Constraint], k: usize, prefix: &[Q]) -> Q {
    let mut lower: Option<(Q, Strictness)> = None;
    let mut upper: Option<(Q, Strictness)> = None;
    for c in level {
        let top = &c.coeffs[k];
        if top.is_zero() {
            continue;
        }
        let rest: Q = c.coeffs[..k]
            .iter()
            .zip(prefix)
            .map(|(ci, xi)| ci * xi)
            .sum::<Q>()
            + c.constant.clone();
        // top·x_k + rest (≤|<) 0  ⇒  x_k bound at −rest/top.
        let bound = -&rest / top;
        if top.is_positive() {
            if upper
                .as_ref()
                .is_none_or(|(b, s)| bound < *b || (bound == *b && *s == Strictness::Weak))
            {
                upper = Some((bound, c.strictness));
            }
        } else if lower
            .as_ref()
            .is_none_or(|(b, s)| bound > *b || (bound == *b && *s == Strictness::Weak))
        {
            lower = Some((bound, c.strictness));
        }
    }
    match (lower, upper) {
        (None, None) => Q::zero(),
        (Some((lo, s)), None) => match s {
            Strictness::Weak => lo,
            Strictness::Strict => lo + Q::one(),
        },
        (None, Some((hi, s))) => match s {
            Strictness::Weak => hi,
            Strictness::Strict => hi - Q::one(),
        },
        (Some((lo, ls)), Some((hi, us))) => {
            if lo == hi {
                debug_assert!(
                    ls == Strictness::Weak && us == Strictness::Weak,
                    "projection guaranteed a nonempty interval"
                );
                lo
            } else {
                debug_assert!(lo < hi, "projection guaranteed a nonempty interval");
                (lo + hi) / Q::from_int(2)
            }
        }
    }
}
