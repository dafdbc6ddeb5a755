//! Exact rational linear programming: two-phase primal simplex with
//! Bland's anti-cycling rule. All pivots and comparisons are exact, and
//! every outcome carries a certificate that re-verifies by substitution.

use num_traits::{One, Signed, Zero};

use crate::{Error, Rat, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintOp {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSign {
    NonNeg,
    Free,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub op: ConstraintOp,
    pub rhs: Rat,
}

/// Minimize `objective · x` subject to the constraints and variable signs.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
    pub signs: Vec<VarSign>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rat>, constraints: Vec<Constraint>, signs: Vec<VarSign>) -> Self {
        Self {
            objective,
            constraints,
            signs,
        }
    }

    /// Feasibility program: Σ λᵢ colsᵢ = target with λ ≥ 0.
    pub fn nonneg_combination(columns: &[Vec<Rat>], target: &[Rat]) -> Self {
        let nvars = columns.len();
        let constraints = target
            .iter()
            .enumerate()
            .map(|(r, t)| Constraint {
                coeffs: columns.iter().map(|c| c[r].clone()).collect(),
                op: ConstraintOp::Eq,
                rhs: t.clone(),
            })
            .collect();
        Self {
            objective: vec![Rat::zero(); nvars],
            constraints,
            signs: vec![VarSign::NonNeg; nvars],
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.signs.len() != n {
            return Err(Error::MalformedProgram(format!(
                "{} signs for {} variables",
                self.signs.len(),
                n
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { point: Vec<Rat>, value: Rat },
    /// Row multipliers y with yᵀb > 0, yᵀA ≤ 0 on nonnegative variables,
    /// yᵀA = 0 on free variables, y ≤ 0 on ≤-rows and y ≥ 0 on ≥-rows.
    Infeasible { certificate: Vec<Rat> },
    Unbounded { point: Vec<Rat>, ray: Vec<Rat> },
}

/// Checks that `point` satisfies every constraint and sign exactly.
pub fn verify_feasible_point(lp: &LinearProgram, point: &[Rat]) -> bool {
    if point.len() != lp.objective.len() {
        return false;
    }
    for (s, x) in lp.signs.iter().zip(point) {
        if *s == VarSign::NonNeg && x.is_negative() {
            return false;
        }
    }
    lp.constraints.iter().all(|c| {
        let lhs: Rat = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
        match c.op {
            ConstraintOp::Eq => lhs == c.rhs,
            ConstraintOp::Ge => lhs >= c.rhs,
            ConstraintOp::Le => lhs <= c.rhs,
        }
    })
}

/// Farkas check: y proves that no feasible point exists.
pub fn verify_infeasibility_certificate(lp: &LinearProgram, y: &[Rat]) -> bool {
    if y.len() != lp.constraints.len() {
        return false;
    }
    for (c, yi) in lp.constraints.iter().zip(y) {
        match c.op {
            ConstraintOp::Eq => {}
            ConstraintOp::Le => {
                if yi.is_positive() {
                    return false;
                }
            }
            ConstraintOp::Ge => {
                if yi.is_negative() {
                    return false;
                }
            }
        }
    }
    let ytb: Rat = lp.constraints.iter().zip(y).map(|(c, yi)| &c.rhs * yi).sum();
    if !ytb.is_positive() {
        return false;
    }
    for (j, s) in lp.signs.iter().enumerate() {
        let yta: Rat = lp
            .constraints
            .iter()
            .zip(y)
            .map(|(c, yi)| &c.coeffs[j] * yi)
            .sum();
        match s {
            VarSign::NonNeg => {
                if yta.is_positive() {
                    return false;
                }
            }
            VarSign::Free => {
                if !yta.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Ray check: point feasible, point + t·ray feasible for all t ≥ 0, and
/// the objective strictly decreases along the ray.
pub fn verify_unbounded_ray(lp: &LinearProgram, point: &[Rat], ray: &[Rat]) -> bool {
    if !verify_feasible_point(lp, point) || ray.len() != lp.objective.len() {
        return false;
    }
    for (s, d) in lp.signs.iter().zip(ray) {
        if *s == VarSign::NonNeg && d.is_negative() {
            return false;
        }
    }
    for c in &lp.constraints {
        let along: Rat = c.coeffs.iter().zip(ray).map(|(a, d)| a * d).sum();
        let ok = match c.op {
            ConstraintOp::Eq => along.is_zero(),
            ConstraintOp::Ge => !along.is_negative(),
            ConstraintOp::Le => !along.is_positive(),
        };
        if !ok {
            return false;
        }
    }
    let drop: Rat = lp.objective.iter().zip(ray).map(|(c, d)| c * d).sum();
    drop.is_negative()
}

/// Standard-form tableau data shared by both simplex phases.
struct Tableau {
    m: usize,
    ncols: usize, // structural + artificial
    rows: Vec<Vec<Rat>>, // m rows of length ncols + 1 (rhs last)
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone().recip();
        for v in self.rows[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..self.m {
            if i != row && !self.rows[i][col].is_zero() {
                let f = self.rows[i][col].clone();
                for j in 0..=self.ncols {
                    let sub = &self.rows[row][j] * &f;
                    self.rows[i][j] -= sub;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs and objective value for cost vector c (length ncols).
    fn reduced_costs(&self, cost: &[Rat]) -> (Vec<Rat>, Rat) {
        let mut red = cost.to_vec();
        let mut val = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            val += cb * self.rhs(i);
            for j in 0..self.ncols {
                let sub = cb * &self.rows[i][j];
                red[j] -= sub;
            }
        }
        (red, val)
    }

    /// One phase of Bland-rule simplex for cost vector `cost`; columns in
    /// `banned` never enter. Returns `Some(entering)` if unbounded.
    fn run(&mut self, cost: &[Rat], banned: &[bool]) -> Option<usize> {
        loop {
            let (red, _) = self.reduced_costs(cost);
            let entering = (0..self.ncols)
                .find(|&j| !banned[j] && red[j].is_negative() && !self.basis.contains(&j));
            let Some(e) = entering else {
                return None; // optimal
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.m {
                if self.rows[i][e].is_positive() {
                    let ratio = self.rhs(i).clone() / &self.rows[i][e];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, e),
                None => return Some(e), // unbounded in direction e
            }
        }
    }
}

/// Exact LP solve. Outcomes are re-verified internally before being
/// returned; a verification failure is a hard internal error.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n_user = lp.objective.len();
    let m = lp.constraints.len();

    // standardization: free variables split, slack per inequality
    // column map: for user var j, col_pos[j] (+ col_neg[j] when free)
    let mut col_pos = vec![0usize; n_user];
    let mut col_neg = vec![usize::MAX; n_user];
    let mut nstruct = 0usize;
    for j in 0..n_user {
        col_pos[j] = nstruct;
        nstruct += 1;
        if lp.signs[j] == VarSign::Free {
            col_neg[j] = nstruct;
            nstruct += 1;
        }
    }
    let mut slack_col = vec![usize::MAX; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.op != ConstraintOp::Eq {
            slack_col[i] = nstruct;
            nstruct += 1;
        }
    }

    let ncols = nstruct + m; // artificials appended
    let mut rows = Vec::with_capacity(m);
    let mut row_sign = vec![false; m]; // true when the row was negated
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols + 1];
        for j in 0..n_user {
            row[col_pos[j]] = c.coeffs[j].clone();
            if col_neg[j] != usize::MAX {
                row[col_neg[j]] = -c.coeffs[j].clone();
            }
        }
        match c.op {
            ConstraintOp::Eq => {}
            ConstraintOp::Le => row[slack_col[i]] = Rat::one(),
            ConstraintOp::Ge => row[slack_col[i]] = -Rat::one(),
        }
        row[ncols] = c.rhs.clone();
        if row[ncols].is_negative() {
            row_sign[i] = true;
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[nstruct + i] = Rat::one(); // artificial
        rows.push(row);
    }

    let mut t = Tableau {
        m,
        ncols,
        rows,
        basis: (0..m).map(|i| nstruct + i).collect(),
    };

    // Phase 1: minimize the artificial sum.
    let mut phase1_cost = vec![Rat::zero(); ncols];
    for j in nstruct..ncols {
        phase1_cost[j] = Rat::one();
    }
    let banned_none = vec![false; ncols];
    let unb = t.run(&phase1_cost, &banned_none);
    debug_assert!(unb.is_none(), "phase 1 is bounded below by zero");
    let (red1, val1) = t.reduced_costs(&phase1_cost);
    if val1.is_positive() {
        // Farkas multipliers from the artificial reduced costs
        let mut y_user = Vec::with_capacity(m);
        for i in 0..m {
            let yi = Rat::one() - red1[nstruct + i].clone();
            y_user.push(if row_sign[i] { -yi } else { yi });
        }
        if !verify_infeasibility_certificate(lp, &y_user) {
            return Err(Error::Certification(
                "infeasibility certificate failed substitution".into(),
            ));
        }
        return Ok(LpOutcome::Infeasible {
            certificate: y_user,
        });
    }

    // Drive remaining artificials out of the basis (or drop their rows).
    let mut live_rows = vec![true; t.m];
    for i in 0..t.m {
        if t.basis[i] >= nstruct {
            debug_assert!(t.rhs(i).is_zero());
            if let Some(j) = (0..nstruct).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            } else {
                live_rows[i] = false; // redundant constraint
            }
        }
    }
    // compactify dropped rows
    if live_rows.iter().any(|&l| !l) {
        let mut rows = Vec::new();
        let mut basis = Vec::new();
        for i in 0..t.m {
            if live_rows[i] {
                rows.push(t.rows[i].clone());
                basis.push(t.basis[i]);
            }
        }
        t.m = rows.len();
        t.rows = rows;
        t.basis = basis;
    }

    // Phase 2 with the real objective; artificial columns never re-enter.
    let mut cost = vec![Rat::zero(); ncols];
    for j in 0..n_user {
        cost[col_pos[j]] = lp.objective[j].clone();
        if col_neg[j] != usize::MAX {
            cost[col_neg[j]] = -lp.objective[j].clone();
        }
    }
    let mut banned = vec![false; ncols];
    for b in banned.iter_mut().skip(nstruct) {
        *b = true;
    }

    let recover_point = |t: &Tableau| -> Vec<Rat> {
        let mut std_x = vec![Rat::zero(); ncols];
        for (i, &b) in t.basis.iter().enumerate() {
            std_x[b] = t.rhs(i).clone();
        }
        (0..n_user)
            .map(|j| {
                let mut v = std_x[col_pos[j]].clone();
                if col_neg[j] != usize::MAX {
                    v -= &std_x[col_neg[j]];
                }
                v
            })
            .collect()
    };

    match t.run(&cost, &banned) {
        None => {
            let point = recover_point(&t);
            if !verify_feasible_point(lp, &point) {
                return Err(Error::Certification(
                    "optimal point failed substitution".into(),
                ));
            }
            let value: Rat = lp.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
            Ok(LpOutcome::Optimal { point, value })
        }
        Some(e) => {
            let point = recover_point(&t);
            // standard-form ray: entering column direction
            let mut std_d = vec![Rat::zero(); ncols];
            std_d[e] = Rat::one();
            for (i, &b) in t.basis.iter().enumerate() {
                std_d[b] = -t.rows[i][e].clone();
            }
            let ray: Vec<Rat> = (0..n_user)
                .map(|j| {
                    let mut v = std_d[col_pos[j]].clone();
                    if col_neg[j] != usize::MAX {
                        v -= &std_d[col_neg[j]];
                    }
                    v
                })
                .collect();
            if !verify_unbounded_ray(lp, &point, &ray) {
                return Err(Error::Certification(
                    "unbounded ray failed substitution".into(),
                ));
            }
            Ok(LpOutcome::Unbounded { point, ray })
        }
    }
}
