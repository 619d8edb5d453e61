//! Dense two-phase primal simplex.
//!
//! Every higher module (projection scalarizations, function evaluation, dual
//! feasibility checks) funnels through [`solve`]. The implementation favors
//! determinism over speed: a dense tableau, Bland's anti-cycling rule with
//! lowest-index pivot selection throughout, and no randomization. Identical
//! inputs produce bitwise-identical answers.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Row residual tolerance for accepting a basic solution as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Reduced-cost threshold below which a column may enter the basis.
pub const OPTIMALITY_TOL: f64 = 1e-8;
/// Smallest admissible pivot magnitude; anything below is a numeric failure.
pub const PIVOT_TOL: f64 = 1e-11;

const MAX_PIVOTS: usize = 200_000;

/// Row sense of a linear constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Eq,
    Le,
}

/// `min objective . x` subject to `a x (sense) rhs` and `lower <= x <= upper`.
///
/// Bounds may be infinite in either direction; variables default to free.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: DVector<f64>,
    pub a: DMatrix<f64>,
    pub senses: Vec<Sense>,
    pub rhs: DVector<f64>,
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl LpProblem {
    /// Problem with free variables.
    pub fn new(
        objective: DVector<f64>,
        a: DMatrix<f64>,
        senses: Vec<Sense>,
        rhs: DVector<f64>,
    ) -> Result<Self> {
        let n = objective.len();
        let lower = DVector::from_element(n, f64::NEG_INFINITY);
        let upper = DVector::from_element(n, f64::INFINITY);
        Self::with_bounds(objective, a, senses, rhs, lower, upper)
    }

    pub fn with_bounds(
        objective: DVector<f64>,
        a: DMatrix<f64>,
        senses: Vec<Sense>,
        rhs: DVector<f64>,
        lower: DVector<f64>,
        upper: DVector<f64>,
    ) -> Result<Self> {
        let n = objective.len();
        let m = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint matrix has {} columns for {} variables",
                a.ncols(),
                n
            )));
        }
        if senses.len() != m || rhs.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} senses and {} rhs entries",
                m,
                senses.len(),
                rhs.len()
            )));
        }
        if lower.len() != n || upper.len() != n {
            return Err(Error::DimensionMismatch(
                "bound vectors do not match variable count".into(),
            ));
        }
        for j in 0..n {
            if lower[j] > upper[j] {
                return Err(Error::DimensionMismatch(format!(
                    "variable {j} has lower bound above upper bound"
                )));
            }
        }
        Ok(Self {
            objective,
            a,
            senses,
            rhs,
            lower,
            upper,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// A pivot below [`PIVOT_TOL`] or an iteration blow-up. Reported rather
    /// than risking a wrong answer.
    NumericError,
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal point (when `Optimal`).
    pub x: Option<DVector<f64>>,
    /// Objective value: finite when `Optimal`, `-inf` when `Unbounded`,
    /// `+inf` when `Infeasible`, NaN on numeric failure.
    pub objective: f64,
    /// Feasible recession direction with negative objective slope (when
    /// `Unbounded`).
    pub ray: Option<DVector<f64>>,
    /// One multiplier per original constraint row (when `Optimal`), signed
    /// so that `>=` rows carry nonnegative and `<=` rows nonpositive duals.
    pub duals: Option<DVector<f64>>,
}

impl LpResult {
    fn of_status(status: LpStatus) -> Self {
        let objective = match status {
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        LpResult {
            status,
            x: None,
            objective,
            ray: None,
            duals: None,
        }
    }
}

/// How an original variable maps into standard-form columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = offset + t[col]`
    Shift { col: usize, offset: f64 },
    /// `x = offset - t[col]`
    Mirror { col: usize, offset: f64 },
    /// `x = t[pos] - t[neg]`
    Split { pos: usize, neg: usize },
    /// `x = value`
    Fixed { value: f64 },
}

struct Standard {
    /// Row-major constraint matrix over structural + slack columns.
    a: DMatrix<f64>,
    b: DVector<f64>,
    cost: DVector<f64>,
    cost_offset: f64,
    maps: Vec<VarMap>,
    n_structural: usize,
    /// Per original row: (standard row index, sign flip applied).
    row_map: Vec<(usize, f64)>,
}

/// Rewrite into `min c.t  s.t.  A t = b, t >= 0` with nonnegative rhs.
fn standardize(p: &LpProblem) -> std::result::Result<Standard, LpStatus> {
    let n = p.objective.len();
    let m = p.a.nrows();

    let mut maps = Vec::with_capacity(n);
    let mut cols = 0usize;
    // Extra `x <= u` rows produced by two-sided bounds.
    let mut range_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (p.lower[j], p.upper[j]);
        if l.is_finite() && u.is_finite() {
            if l == u {
                maps.push(VarMap::Fixed { value: l });
                continue;
            }
            maps.push(VarMap::Shift {
                col: cols,
                offset: l,
            });
            range_rows.push((cols, u - l));
            cols += 1;
        } else if l.is_finite() {
            maps.push(VarMap::Shift {
                col: cols,
                offset: l,
            });
            cols += 1;
        } else if u.is_finite() {
            maps.push(VarMap::Mirror {
                col: cols,
                offset: u,
            });
            cols += 1;
        } else {
            maps.push(VarMap::Split {
                pos: cols,
                neg: cols + 1,
            });
            cols += 2;
        }
    }

    let total_rows = m + range_rows.len();
    let n_slacks = p
        .senses
        .iter()
        .filter(|s| !matches!(s, Sense::Eq))
        .count()
        + range_rows.len();
    let total_cols = cols + n_slacks;

    let mut a = DMatrix::zeros(total_rows, total_cols);
    let mut b = DVector::zeros(total_rows);
    let mut cost = DVector::zeros(total_cols);
    let mut cost_offset = 0.0;

    for j in 0..n {
        let cj = p.objective[j];
        match maps[j] {
            VarMap::Shift { col, offset } => {
                cost[col] += cj;
                cost_offset += cj * offset;
            }
            VarMap::Mirror { col, offset } => {
                cost[col] -= cj;
                cost_offset += cj * offset;
            }
            VarMap::Split { pos, neg } => {
                cost[pos] += cj;
                cost[neg] -= cj;
            }
            VarMap::Fixed { value } => cost_offset += cj * value,
        }
    }

    let mut slack = cols;
    let mut row_map = Vec::with_capacity(m);
    for i in 0..m {
        let mut rhs = p.rhs[i];
        for j in 0..n {
            let aij = p.a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, offset } => {
                    a[(i, col)] += aij;
                    rhs -= aij * offset;
                }
                VarMap::Mirror { col, offset } => {
                    a[(i, col)] -= aij;
                    rhs -= aij * offset;
                }
                VarMap::Split { pos, neg } => {
                    a[(i, pos)] += aij;
                    a[(i, neg)] -= aij;
                }
                VarMap::Fixed { value } => rhs -= aij * value,
            }
        }
        match p.senses[i] {
            Sense::Ge => {
                a[(i, slack)] = -1.0;
                slack += 1;
            }
            Sense::Le => {
                a[(i, slack)] = 1.0;
                slack += 1;
            }
            Sense::Eq => {}
        }
        b[i] = rhs;
        row_map.push((i, 1.0));
    }
    for (k, &(col, ub)) in range_rows.iter().enumerate() {
        let i = m + k;
        if ub < 0.0 {
            return Err(LpStatus::Infeasible);
        }
        a[(i, col)] = 1.0;
        a[(i, slack)] = 1.0;
        slack += 1;
        b[i] = ub;
    }
    debug_assert_eq!(slack, total_cols);

    for i in 0..total_rows {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for j in 0..total_cols {
                a[(i, j)] = -a[(i, j)];
            }
            if i < m {
                row_map[i].1 = -1.0;
            }
        }
    }

    Ok(Standard {
        a,
        b,
        cost,
        cost_offset,
        maps,
        n_structural: cols,
        row_map,
    })
}

struct Tableau {
    /// `B^{-1} A` over structural + slack + artificial columns.
    t: DMatrix<f64>,
    b: DVector<f64>,
    basis: Vec<usize>,
    n_real: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded { entering: usize },
    Numeric,
}

impl Tableau {
    fn new(std: &Standard) -> Self {
        let m = std.a.nrows();
        let n_real = std.a.ncols();
        let mut t = DMatrix::zeros(m, n_real + m);
        t.view_mut((0, 0), (m, n_real)).copy_from(&std.a);
        for i in 0..m {
            t[(i, n_real + i)] = 1.0;
        }
        let basis = (n_real..n_real + m).collect();
        Tableau {
            t,
            b: std.b.clone(),
            basis,
            n_real,
        }
    }

    fn reduced_costs(&self, cost: &DVector<f64>) -> DVector<f64> {
        let m = self.t.nrows();
        let total = self.t.ncols();
        let mut r = cost.clone();
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..total {
                r[j] -= cb * self.t[(i, j)];
            }
        }
        r
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        let piv = self.t[(row, col)];
        if piv.abs() < PIVOT_TOL {
            return Err(Error::Numeric(format!("pivot {piv:e} below tolerance")));
        }
        let total = self.t.ncols();
        let inv = 1.0 / piv;
        for j in 0..total {
            self.t[(row, j)] *= inv;
        }
        self.b[row] *= inv;
        for i in 0..self.t.nrows() {
            if i == row {
                continue;
            }
            let factor = self.t[(i, col)];
            if factor == 0.0 {
                continue;
            }
            for j in 0..total {
                let delta = factor * self.t[(row, j)];
                self.t[(i, j)] -= delta;
            }
            self.b[i] -= factor * self.b[row];
            self.t[(i, col)] = 0.0;
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Bland's rule: first eligible column with negative reduced cost enters;
    /// ties in the ratio test break toward the lowest basic variable index.
    fn run(&mut self, cost: &DVector<f64>, allow_artificial: bool) -> Result<PivotOutcome> {
        let m = self.t.nrows();
        for _ in 0..MAX_PIVOTS {
            let r = self.reduced_costs(cost);
            let limit = if allow_artificial {
                self.t.ncols()
            } else {
                self.n_real
            };
            let entering = (0..limit).find(|&j| r[j] < -OPTIMALITY_TOL);
            let Some(col) = entering else {
                return Ok(PivotOutcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let coef = self.t[(i, col)];
                if coef > PIVOT_TOL {
                    let ratio = self.b[i] / coef;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((best_i, best)) => {
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[best_i])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col)?,
                None => return Ok(PivotOutcome::Unbounded { entering: col }),
            }
        }
        Ok(PivotOutcome::Numeric)
    }

    fn solution(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.n_real);
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n_real {
                x[j] = self.b[i];
            }
        }
        x
    }
}

fn recover_point(std: &Standard, t: &DVector<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(std.maps.len());
    for (j, map) in std.maps.iter().enumerate() {
        x[j] = match *map {
            VarMap::Shift { col, offset } => offset + t[col],
            VarMap::Mirror { col, offset } => offset - t[col],
            VarMap::Split { pos, neg } => t[pos] - t[neg],
            VarMap::Fixed { value } => value,
        };
    }
    x
}

fn recover_direction(std: &Standard, d: &DVector<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(std.maps.len());
    for (j, map) in std.maps.iter().enumerate() {
        x[j] = match *map {
            VarMap::Shift { col, .. } => d[col],
            VarMap::Mirror { col, .. } => -d[col],
            VarMap::Split { pos, neg } => d[pos] - d[neg],
            VarMap::Fixed { .. } => 0.0,
        };
    }
    x
}

/// Solve with the two-phase primal simplex.
pub fn solve(p: &LpProblem) -> LpResult {
    let std = match standardize(p) {
        Ok(s) => s,
        Err(status) => return LpResult::of_status(status),
    };
    let m = std.a.nrows();
    let n_real = std.a.ncols();
    let mut tab = Tableau::new(&std);

    // Phase 1: minimize the artificial sum.
    let mut phase1_cost = DVector::zeros(n_real + m);
    for j in n_real..n_real + m {
        phase1_cost[j] = 1.0;
    }
    match tab.run(&phase1_cost, true) {
        Ok(PivotOutcome::Optimal) => {}
        Ok(PivotOutcome::Unbounded { .. }) | Ok(PivotOutcome::Numeric) | Err(_) => {
            return LpResult::of_status(LpStatus::NumericError)
        }
    }
    let infeas: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n_real)
        .map(|(i, _)| tab.b[i])
        .sum();
    if infeas > FEASIBILITY_TOL {
        return LpResult::of_status(LpStatus::Infeasible);
    }
    // Drive zero-level artificials out where a real pivot exists; redundant
    // rows keep their artificial basic at zero.
    for row in 0..m {
        if tab.basis[row] >= n_real {
            let col = (0..n_real).find(|&j| tab.t[(row, j)].abs() > 1e-9);
            if let Some(col) = col {
                if tab.pivot(row, col).is_err() {
                    return LpResult::of_status(LpStatus::NumericError);
                }
            }
        }
    }

    // Phase 2: original objective; artificials may not re-enter.
    let mut phase2_cost = DVector::zeros(n_real + m);
    phase2_cost.rows_mut(0, n_real).copy_from(&std.cost);
    let outcome = match tab.run(&phase2_cost, false) {
        Ok(o) => o,
        Err(_) => return LpResult::of_status(LpStatus::NumericError),
    };
    match outcome {
        PivotOutcome::Numeric => LpResult::of_status(LpStatus::NumericError),
        PivotOutcome::Unbounded { entering } => {
            let mut d = DVector::zeros(n_real);
            d[entering] = 1.0;
            for (i, &j) in tab.basis.iter().enumerate() {
                if j < n_real {
                    d[j] = -tab.t[(i, entering)];
                }
            }
            let ray = recover_direction(&std, &d);
            LpResult {
                status: LpStatus::Unbounded,
                x: None,
                objective: f64::NEG_INFINITY,
                ray: Some(ray),
                duals: None,
            }
        }
        PivotOutcome::Optimal => {
            let t = tab.solution();
            let x = recover_point(&std, &t);
            let objective = std.cost.dot(&t) + std.cost_offset;
            // The artificial column for standard row i is e_i, so its phase-2
            // reduced cost equals -y_i.
            let r = tab.reduced_costs(&phase2_cost);
            let mut duals = DVector::zeros(p.a.nrows());
            for (orig, &(std_row, flip)) in std.row_map.iter().enumerate() {
                duals[orig] = -r[n_real + std_row] * flip;
            }
            LpResult {
                status: LpStatus::Optimal,
                x: Some(x),
                objective,
                ray: None,
                duals: Some(duals),
            }
        }
    }
}

/// Feasibility probe: [`solve`] with a zero objective and free variables.
pub fn solve_feasibility(a: &DMatrix<f64>, senses: &[Sense], rhs: &DVector<f64>) -> LpResult {
    let n = a.ncols();
    match LpProblem::new(
        DVector::zeros(n),
        a.clone(),
        senses.to_vec(),
        rhs.clone(),
    ) {
        Ok(p) => solve(&p),
        Err(_) => LpResult::of_status(LpStatus::NumericError),
    }
}
