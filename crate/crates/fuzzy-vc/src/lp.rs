//! Exact rational linear programming.
//!
//! A dense two-phase simplex over `BigRational` with Bland's smallest-
//! index pivot rule, which guarantees termination under exact arithmetic
//! where degenerate cycling is a real hazard. Optimal solutions carry the
//! dual vector of the constraint rows and are re-verified against the
//! KKT conditions before being returned, so a returned `Optimal` is a
//! certificate, not a claim.

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Clone, Debug, Default)]
pub struct VarBounds {
    pub lower: Option<Rat>,
    pub upper: Option<Rat>,
}

impl VarBounds {
    pub fn nonnegative() -> Self {
        VarBounds { lower: Some(Rat::zero()), upper: None }
    }

    pub fn free() -> Self {
        VarBounds { lower: None, upper: None }
    }
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

impl LpProblem {
    /// A problem over nonnegative variables with the given objective.
    pub fn new(sense: Sense, objective: Vec<Rat>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBounds::nonnegative(); n],
        }
    }

    pub fn push_constraint(&mut self, coeffs: Vec<Rat>, relation: Relation, rhs: Rat) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. For `Optimal`, `primal` and `dual` certify optimality
/// jointly (KKT); `dual` has one multiplier per constraint, in the
/// convention of the problem's own sense (for `Min`, multipliers are
/// nonnegative on `Ge` rows and nonpositive on `Le` rows; for `Max`,
/// flipped).
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub optimum: Rat,
    pub primal: Vec<Rat>,
    pub dual: Vec<Rat>,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        LpSolution { status, optimum: Rat::zero(), primal: Vec::new(), dual: Vec::new() }
    }
}

/// Internal row bookkeeping: original constraint index (with negation
/// flag) or a variable upper-bound row.
#[derive(Clone, Copy, Debug)]
enum RowOrigin {
    Constraint { index: usize, negated: bool },
    Bound,
}

/// How an original variable maps onto internal nonnegative columns.
#[derive(Clone, Debug)]
enum VarMap {
    /// x = lower + u
    Shifted { col: usize, lower: Rat },
    /// x = upper - u
    Flipped { col: usize, upper: Rat },
    /// x = u - v
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let factor = self.rows[row][col].clone();
        debug_assert!(!factor.is_zero());
        for v in self.rows[row].iter_mut() {
            *v /= &factor;
        }
        self.rhs[row] /= &factor;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let scale = self.rows[i][col].clone();
            if scale.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let delta = &self.rows[row][j] * &scale;
                self.rows[i][j] -= delta;
            }
            let delta = &self.rhs[row] * &scale;
            self.rhs[i] -= delta;
        }
        self.basis[row] = col;
    }

    /// Reduced cost of column `col` under cost vector `cost`.
    fn reduced_cost(&self, cost: &[Rat], col: usize) -> Rat {
        let mut r = cost[col].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[i][col].is_zero() {
                r -= &cost[b] * &self.rows[i][col];
            }
        }
        r
    }

    fn objective_value(&self, cost: &[Rat]) -> Rat {
        self.basis
            .iter()
            .enumerate()
            .fold(Rat::zero(), |acc, (i, &b)| acc + &cost[b] * &self.rhs[i])
    }

    /// Bland's rule: entering column is the smallest allowed index with a
    /// negative reduced cost; the leaving row minimizes the ratio, with
    /// ties broken by the smallest basic variable index.
    fn simplex(&mut self, cost: &[Rat], allowed: &[bool]) -> PhaseOutcome {
        loop {
            let mut entering = None;
            for col in 0..self.cols {
                if !allowed[col] || self.basis.contains(&col) {
                    continue;
                }
                if self.reduced_cost(cost, col).is_negative() {
                    entering = Some(col);
                    break;
                }
            }
            let Some(col) = entering else {
                return PhaseOutcome::Optimal;
            };
            let mut leaving: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    let better = match &leaving {
                        None => true,
                        Some((best_i, best)) => {
                            ratio < *best
                                || (ratio == *best && self.basis[i] < self.basis[*best_i])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return PhaseOutcome::Unbounded;
            };
            self.pivot(row, col);
        }
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    let n = problem.objective.len();
    if problem.bounds.len() != n {
        return Err(Error::domain(format!(
            "{} bounds for {n} variables",
            problem.bounds.len()
        )));
    }
    for (i, c) in problem.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::domain(format!(
                "constraint {i} has {} coefficients for {n} variables",
                c.coeffs.len()
            )));
        }
    }

    // Minimization cost over original variables.
    let min_cost: Vec<Rat> = match problem.sense {
        Sense::Min => problem.objective.clone(),
        Sense::Max => problem.objective.iter().map(|c| -c).collect(),
    };

    // Map variables onto nonnegative internal columns.
    let mut var_maps = Vec::with_capacity(n);
    let mut next_col = 0usize;
    let mut bound_rows: Vec<(usize, Rat)> = Vec::new(); // (internal col, rhs)
    for (j, b) in problem.bounds.iter().enumerate() {
        match (&b.lower, &b.upper) {
            (Some(l), Some(u)) if l > u => {
                return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
            }
            (Some(l), upper) => {
                let col = next_col;
                next_col += 1;
                if let Some(u) = upper {
                    bound_rows.push((col, u - l));
                }
                var_maps.push(VarMap::Shifted { col, lower: l.clone() });
            }
            (None, Some(u)) => {
                let col = next_col;
                next_col += 1;
                var_maps.push(VarMap::Flipped { col, upper: u.clone() });
            }
            (None, None) => {
                let pos = next_col;
                let neg = next_col + 1;
                next_col += 2;
                var_maps.push(VarMap::Split { pos, neg });
            }
        }
        let _ = j;
    }
    let structurals = next_col;

    // Internal column coefficients and rhs shift for one original row.
    let internal_row = |coeffs: &[Rat], rhs: &Rat| -> (Vec<Rat>, Rat) {
        let mut row = vec![Rat::zero(); structurals];
        let mut b = rhs.clone();
        for (j, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match &var_maps[j] {
                VarMap::Shifted { col, lower } => {
                    row[*col] += a;
                    b -= a * lower;
                }
                VarMap::Flipped { col, upper } => {
                    row[*col] -= a;
                    b -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    row[*pos] += a;
                    row[*neg] -= a;
                }
            }
        }
        (row, b)
    };

    struct PendingRow {
        coeffs: Vec<Rat>,
        relation: Relation,
        rhs: Rat,
        origin: RowOrigin,
    }
    let mut pending: Vec<PendingRow> = Vec::new();
    for (i, c) in problem.constraints.iter().enumerate() {
        let (coeffs, rhs) = internal_row(&c.coeffs, &c.rhs);
        let (coeffs, relation, rhs, negated) = if rhs.is_negative() {
            let flipped = match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            (coeffs.iter().map(|a| -a).collect(), flipped, -rhs, true)
        } else {
            (coeffs, c.relation, rhs, false)
        };
        pending.push(PendingRow {
            coeffs,
            relation,
            rhs,
            origin: RowOrigin::Constraint { index: i, negated },
        });
    }
    for (col, ub) in bound_rows {
        let mut coeffs = vec![Rat::zero(); structurals];
        coeffs[col] = Rat::one();
        // ub = upper - lower >= 0 here, or bounds were inconsistent above.
        pending.push(PendingRow {
            coeffs,
            relation: Relation::Le,
            rhs: ub,
            origin: RowOrigin::Bound,
        });
    }

    let m = pending.len();
    let slack_count = pending
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let cols = structurals + slack_count + m;
    let slack_base = structurals;
    let art_base = structurals + slack_count;

    let mut tableau = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cols,
    };
    let mut slack_cursor = 0usize;
    for (i, row) in pending.iter().enumerate() {
        let mut full = vec![Rat::zero(); cols];
        full[..structurals].clone_from_slice(&row.coeffs);
        match row.relation {
            Relation::Le => {
                full[slack_base + slack_cursor] = Rat::one();
                slack_cursor += 1;
            }
            Relation::Ge => {
                full[slack_base + slack_cursor] = -Rat::one();
                slack_cursor += 1;
            }
            Relation::Eq => {}
        }
        full[art_base + i] = Rat::one();
        tableau.rows.push(full);
        tableau.rhs.push(row.rhs.clone());
        tableau.basis.push(art_base + i);
    }

    // Phase 1: drive artificial mass to zero.
    let mut phase1_cost = vec![Rat::zero(); cols];
    for c in phase1_cost.iter_mut().skip(art_base) {
        *c = Rat::one();
    }
    let all_allowed = vec![true; cols];
    match tableau.simplex(&phase1_cost, &all_allowed) {
        PhaseOutcome::Unbounded => {
            return Err(Error::Internal("phase 1 objective is bounded below".into()))
        }
        PhaseOutcome::Optimal => {}
    }
    if !tableau.objective_value(&phase1_cost).is_zero() {
        return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
    }
    // Pivot residual artificials out where possible; rows that cannot be
    // pivoted are redundant and keep a zero-valued artificial basis.
    for i in 0..m {
        if tableau.basis[i] >= art_base {
            if let Some(col) = (0..art_base).find(|&c| !tableau.rows[i][c].is_zero()) {
                tableau.pivot(i, col);
            }
        }
    }

    // Phase 2 cost: minimization cost mapped onto internal columns.
    let mut phase2_cost = vec![Rat::zero(); cols];
    for (j, c) in min_cost.iter().enumerate() {
        match &var_maps[j] {
            VarMap::Shifted { col, .. } => phase2_cost[*col] += c,
            VarMap::Flipped { col, .. } => phase2_cost[*col] -= c,
            VarMap::Split { pos, neg } => {
                phase2_cost[*pos] += c;
                phase2_cost[*neg] -= c;
            }
        }
    }
    let mut allowed = vec![true; cols];
    for a in allowed.iter_mut().skip(art_base) {
        *a = false;
    }
    match tableau.simplex(&phase2_cost, &allowed) {
        PhaseOutcome::Unbounded => return Ok(LpSolution::non_optimal(LpStatus::Unbounded)),
        PhaseOutcome::Optimal => {}
    }

    // Recover the original primal point.
    let mut internal = vec![Rat::zero(); cols];
    for (i, &b) in tableau.basis.iter().enumerate() {
        internal[b] = tableau.rhs[i].clone();
    }
    let primal: Vec<Rat> = var_maps
        .iter()
        .map(|vm| match vm {
            VarMap::Shifted { col, lower } => lower + &internal[*col],
            VarMap::Flipped { col, upper } => upper - &internal[*col],
            VarMap::Split { pos, neg } => &internal[*pos] - &internal[*neg],
        })
        .collect();
    let optimum = problem
        .objective
        .iter()
        .zip(&primal)
        .fold(Rat::zero(), |acc, (c, x)| acc + c * x);

    // Duals of the minimization form from the artificial columns, then
    // sign-adjusted back to original row orientation and problem sense.
    let mut dual = vec![Rat::zero(); problem.constraints.len()];
    for (i, row) in pending.iter().enumerate() {
        if let RowOrigin::Constraint { index, negated } = row.origin {
            let y = tableau
                .basis
                .iter()
                .enumerate()
                .fold(Rat::zero(), |acc, (k, &b)| {
                    acc + &phase2_cost[b] * &tableau.rows[k][art_base + i]
                });
            let y = if negated { -y } else { y };
            dual[index] = match problem.sense {
                Sense::Min => y,
                Sense::Max => -y,
            };
        }
    }

    let solution = LpSolution { status: LpStatus::Optimal, optimum, primal, dual };
    verify_optimal(problem, &solution)?;
    Ok(solution)
}

/// KKT re-verification of a claimed optimal solution, exactly.
pub fn verify_optimal(problem: &LpProblem, solution: &LpSolution) -> Result<()> {
    if solution.status != LpStatus::Optimal {
        return Err(Error::Internal("verify_optimal on a non-optimal solution".into()));
    }
    let n = problem.objective.len();
    let x = &solution.primal;
    if x.len() != n || solution.dual.len() != problem.constraints.len() {
        return Err(Error::Internal("solution dimensions do not match problem".into()));
    }
    let fail = |msg: String| Err(Error::Internal(format!("kkt: {msg}")));

    // Normalize to minimization.
    let (cmin, ymin): (Vec<Rat>, Vec<Rat>) = match problem.sense {
        Sense::Min => (problem.objective.clone(), solution.dual.clone()),
        Sense::Max => (
            problem.objective.iter().map(|c| -c).collect(),
            solution.dual.iter().map(|y| -y).collect(),
        ),
    };

    // Primal feasibility: bounds.
    for (j, b) in problem.bounds.iter().enumerate() {
        if let Some(l) = &b.lower {
            if &x[j] < l {
                return fail(format!("variable {j} below lower bound"));
            }
        }
        if let Some(u) = &b.upper {
            if &x[j] > u {
                return fail(format!("variable {j} above upper bound"));
            }
        }
    }
    // Primal feasibility and complementary slackness: rows.
    for (i, c) in problem.constraints.iter().enumerate() {
        let lhs = c
            .coeffs
            .iter()
            .zip(x)
            .fold(Rat::zero(), |acc, (a, v)| acc + a * v);
        let slack = &lhs - &c.rhs;
        let feasible = match c.relation {
            Relation::Le => !slack.is_positive(),
            Relation::Ge => !slack.is_negative(),
            Relation::Eq => slack.is_zero(),
        };
        if !feasible {
            return fail(format!("constraint {i} violated"));
        }
        let y = &ymin[i];
        let sign_ok = match c.relation {
            Relation::Le => !y.is_positive(),
            Relation::Ge => !y.is_negative(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return fail(format!("dual sign on constraint {i}"));
        }
        if !y.is_zero() && !slack.is_zero() {
            return fail(format!("complementary slackness on constraint {i}"));
        }
    }
    // Stationarity with bound multipliers folded in by sign.
    for j in 0..n {
        let mut z = cmin[j].clone();
        for (i, c) in problem.constraints.iter().enumerate() {
            if !c.coeffs[j].is_zero() && !ymin[i].is_zero() {
                z -= &c.coeffs[j] * &ymin[i];
            }
        }
        let b = &problem.bounds[j];
        let at_lower = b.lower.as_ref().is_some_and(|l| &x[j] == l);
        let at_upper = b.upper.as_ref().is_some_and(|u| &x[j] == u);
        let ok = match (at_lower, at_upper) {
            (true, true) => true,
            (true, false) => !z.is_negative(),
            (false, true) => !z.is_positive(),
            (false, false) => z.is_zero(),
        };
        if !ok {
            return fail(format!("stationarity at variable {j}"));
        }
    }
    // Objective value consistency.
    let value = problem
        .objective
        .iter()
        .zip(x)
        .fold(Rat::zero(), |acc, (c, v)| acc + c * v);
    if value != solution.optimum {
        return fail("claimed optimum differs from objective at primal".into());
    }
    Ok(())
}
