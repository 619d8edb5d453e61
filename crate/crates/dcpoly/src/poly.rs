//! Polyhedron encodings and small-scale brute-force oracles.
//!
//! Three encodings of the same geometry: an [`HRep`] lists inequalities, a
//! [`VRep`] lists generating points and directions, and a [`PRep`] describes
//! the shadow of a lifted inequality system. The brute-force enumerators here
//! are deliberately naive; they exist to validate the projection engine on
//! small inputs, with hard guards against combinatorial blow-up.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Vertices closer than this (Euclidean) are merged as duplicates.
pub const DEDUP_TOL: f64 = 1e-7;
/// Activity threshold for rows at a candidate vertex.
const ACTIVE_TOL: f64 = 1e-9;

const BRUTE_MAX_DIM: usize = 8;
const BRUTE_MAX_ROWS: usize = 24;

/// `{x : B x >= c}`
#[derive(Clone, Debug, PartialEq)]
pub struct HRep {
    pub b: DMatrix<f64>,
    pub c: DVector<f64>,
}

/// Generalized convex hull: points `v^i` plus recession directions `d^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct VRep {
    pub points: Vec<DVector<f64>>,
    pub directions: Vec<DVector<f64>>,
}

/// `{x : exists u, B x + C u >= c}` — the shadow of a lifted system.
#[derive(Clone, Debug, PartialEq)]
pub struct PRep {
    pub b: DMatrix<f64>,
    pub cu: DMatrix<f64>,
    pub c: DVector<f64>,
}

impl HRep {
    pub fn new(b: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        if b.nrows() != c.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} right-hand sides",
                b.nrows(),
                c.len()
            )));
        }
        if b.ncols() == 0 {
            return Err(Error::DimensionMismatch("ambient dimension is zero".into()));
        }
        Ok(HRep { b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.ncols()
    }

    /// Componentwise test `B x >= c - tol`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {}, polyhedron {}",
                x.len(),
                self.dim()
            )));
        }
        let residual = &self.b * x - &self.c;
        Ok(residual.iter().all(|&r| r >= -tol))
    }

    /// `{x : B x >= 0}`.
    pub fn recession_cone(&self) -> HRep {
        HRep {
            b: self.b.clone(),
            c: DVector::zeros(self.b.nrows()),
        }
    }

    /// All vertices, by solving every n-by-n row subsystem and keeping the
    /// feasible, duplicate-free solutions. Output is sorted lexicographically.
    pub fn brute_vertices(&self) -> Result<Vec<DVector<f64>>> {
        let n = self.dim();
        let m = self.b.nrows();
        guard(n, m)?;
        let mut found: Vec<DVector<f64>> = Vec::new();
        for rows in combinations(m, n) {
            let mut square = DMatrix::zeros(n, n);
            let mut rhs = DVector::zeros(n);
            for (k, &i) in rows.iter().enumerate() {
                square.row_mut(k).copy_from(&self.b.row(i));
                rhs[k] = self.c[i];
            }
            let Some(x) = solve_square(&square, &rhs) else {
                continue;
            };
            if !self.contains(&x, ACTIVE_TOL)? {
                continue;
            }
            if found.iter().all(|v| (v - &x).norm() > DEDUP_TOL) {
                found.push(x);
            }
        }
        sort_points(&mut found);
        Ok(found)
    }

    /// Extreme rays of the recession cone, normalized to max-norm 1.
    ///
    /// Candidates come from (n-1)-row subsystems of rank n-1; the sign is
    /// fixed by feasibility. Directions whose negation is also feasible lie
    /// in a lineality space and are skipped (not extreme).
    pub fn brute_extreme_directions(&self) -> Result<Vec<DVector<f64>>> {
        let n = self.dim();
        let m = self.b.nrows();
        guard(n, m)?;
        let cone = self.recession_cone();
        if n == 1 {
            // Rays of a 1-d cone: +-1 when feasible and not a line.
            let mut out = Vec::new();
            for s in [1.0, -1.0] {
                let d = DVector::from_element(1, s);
                if cone.contains(&d, ACTIVE_TOL)? && !cone.contains(&(-&d), ACTIVE_TOL)? {
                    out.push(d);
                }
            }
            sort_points(&mut out);
            return Ok(out);
        }
        let mut found: Vec<DVector<f64>> = Vec::new();
        for rows in combinations(m, n - 1) {
            let mut sub = DMatrix::zeros(n - 1, n);
            for (k, &i) in rows.iter().enumerate() {
                sub.row_mut(k).copy_from(&self.b.row(i));
            }
            let Some(mut d) = null_direction(&sub) else {
                continue;
            };
            normalize_max(&mut d);
            let pos = cone.contains(&d, ACTIVE_TOL)?;
            let neg = cone.contains(&(-&d), ACTIVE_TOL)?;
            let ray = match (pos, neg) {
                (true, false) => d,
                (false, true) => -d,
                // Both feasible means lineality; neither means infeasible.
                _ => continue,
            };
            if found.iter().all(|v| (v - &ray).norm() > DEDUP_TOL) {
                found.push(ray);
            }
        }
        sort_points(&mut found);
        Ok(found)
    }
}

impl PRep {
    pub fn new(b: DMatrix<f64>, cu: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        if b.nrows() != c.len() || cu.nrows() != c.len() {
            return Err(Error::DimensionMismatch(format!(
                "row counts differ: B has {}, C has {}, c has {}",
                b.nrows(),
                cu.nrows(),
                c.len()
            )));
        }
        Ok(PRep { b, cu, c })
    }

    /// Projected (visible) dimension.
    pub fn dim(&self) -> usize {
        self.b.ncols()
    }

    /// Auxiliary (eliminated) dimension.
    pub fn aux_dim(&self) -> usize {
        self.cu.ncols()
    }

    pub fn rows(&self) -> usize {
        self.c.len()
    }

    /// Lift of an inequality system: no auxiliaries.
    pub fn from_hrep(h: &HRep) -> PRep {
        PRep {
            b: h.b.clone(),
            cu: DMatrix::zeros(h.b.nrows(), 0),
            c: h.c.clone(),
        }
    }
}

impl VRep {
    pub fn dim(&self) -> usize {
        self.points
            .first()
            .map(|p| p.len())
            .or_else(|| self.directions.first().map(|d| d.len()))
            .unwrap_or(0)
    }
}

fn guard(n: usize, m: usize) -> Result<()> {
    if n > BRUTE_MAX_DIM || m > BRUTE_MAX_ROWS {
        return Err(Error::GuardViolation(format!(
            "brute-force enumeration limited to dimension {BRUTE_MAX_DIM} and {BRUTE_MAX_ROWS} rows, got {n} and {m}"
        )));
    }
    Ok(())
}

/// All k-subsets of 0..m in lexicographic order.
fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Advance.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when near-singular.
fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut rhs = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (piv_row, piv_val) = (col..n)
            .map(|r| (r, m[(r, col)].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if piv_val < 1e-10 {
            return None;
        }
        if piv_row != col {
            m.swap_rows(piv_row, col);
            rhs.swap_rows(piv_row, col);
            perm.swap(piv_row, col);
        }
        let inv = 1.0 / m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] * inv;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                let delta = f * m[(col, c)];
                m[(r, c)] -= delta;
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = DVector::zeros(n);
    for row in (0..n).rev() {
        let mut v = rhs[row];
        for c in row + 1..n {
            v -= m[(row, c)] * x[c];
        }
        x[row] = v / m[(row, row)];
    }
    Some(x)
}

/// A spanning vector of the null space of a (n-1) x n matrix, when the matrix
/// has full row rank; `None` otherwise.
fn null_direction(a: &DMatrix<f64>) -> Option<DVector<f64>> {
    let rows = a.nrows();
    let n = a.ncols();
    debug_assert_eq!(rows + 1, n);
    let mut m = a.clone();
    let mut pivot_cols = Vec::with_capacity(rows);
    let mut row = 0usize;
    for col in 0..n {
        if row == rows {
            break;
        }
        let (piv_row, piv_val) = (row..rows)
            .map(|r| (r, m[(r, col)].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if piv_val < 1e-10 {
            continue;
        }
        m.swap_rows(piv_row, row);
        let inv = 1.0 / m[(row, col)];
        for c in col..n {
            m[(row, c)] *= inv;
        }
        for r in 0..rows {
            if r == row {
                continue;
            }
            let f = m[(r, col)];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                let delta = f * m[(row, c)];
                m[(r, c)] -= delta;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if row < rows {
        return None; // rank deficient: null space is not one-dimensional
    }
    let free_col = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut d = DVector::zeros(n);
    d[free_col] = 1.0;
    for (k, &pc) in pivot_cols.iter().enumerate() {
        d[pc] = -m[(k, free_col)];
    }
    Some(d)
}

/// Divide by the max-norm.
pub(crate) fn normalize_max(v: &mut DVector<f64>) {
    let norm = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if norm > 0.0 {
        *v /= norm;
    }
}

/// Deterministic lexicographic order for reproducible output. Negative zeros
/// compare equal to zeros.
pub(crate) fn sort_points(points: &mut [DVector<f64>]) {
    let key = |x: f64| if x == 0.0 { 0.0 } else { x };
    points.sort_by(|a, b| {
        for i in 0..a.len() {
            match key(a[i]).total_cmp(&key(b[i])) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vec(data: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(data)
    }

    /// Unit square {x : +-x1 >= -1, +-x2 >= -1}.
    fn unit_square() -> HRep {
        HRep::new(
            DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]),
            vec(&[-1.0, -1.0, -1.0, -1.0]),
        )
        .unwrap()
    }

    /// Epigraph of |x| in R^2: r >= x and r >= -x.
    fn abs_epigraph() -> HRep {
        HRep::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, 1.0]),
            vec(&[0.0, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn contains_interior_boundary_exterior() {
        let sq = unit_square();
        assert!(sq.contains(&vec(&[0.0, 0.0]), 1e-9).unwrap());
        assert!(!sq.contains(&vec(&[2.0, 0.0]), 1e-9).unwrap());
        assert!(sq.contains(&vec(&[1.0, 1.0]), 1e-9).unwrap());
    }

    #[test]
    fn contains_rejects_dimension_mismatch() {
        let sq = unit_square();
        assert!(sq.contains(&vec(&[0.0]), 1e-9).is_err());
    }

    #[test]
    fn recession_cone_of_bounded_set_is_origin() {
        let cone = unit_square().recession_cone();
        // Only the origin satisfies all four homogeneous rows.
        assert!(cone.contains(&vec(&[0.0, 0.0]), 1e-12).unwrap());
        assert!(!cone.contains(&vec(&[0.1, 0.0]), 1e-12).unwrap());
        assert!(cone.brute_extreme_directions().unwrap().is_empty());
    }

    #[test]
    fn recession_cone_of_halfline() {
        let h = HRep::new(DMatrix::from_row_slice(1, 1, &[1.0]), vec(&[1.0])).unwrap();
        let cone = h.recession_cone();
        assert!(cone.contains(&vec(&[5.0]), 1e-12).unwrap());
        assert!(!cone.contains(&vec(&[-0.1]), 1e-12).unwrap());
    }

    #[test]
    fn recession_cone_of_abs_epigraph_drops_rhs() {
        // Shifted copy: r >= |x| - 1 has the same recession cone r >= |x|.
        let shifted = HRep::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, 1.0]),
            vec(&[-1.0, -1.0]),
        )
        .unwrap();
        let cone = shifted.recession_cone();
        assert_eq!(cone.c, DVector::zeros(2));
        assert!(cone.contains(&vec(&[1.0, 1.0]), 1e-12).unwrap());
        assert!(!cone.contains(&vec(&[1.0, 0.5]), 1e-12).unwrap());
    }

    #[test]
    fn square_vertices() {
        let vs = unit_square().brute_vertices().unwrap();
        assert_eq!(vs.len(), 4);
        let expect = [[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]];
        for (v, e) in vs.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(v[0], e[0], epsilon = 1e-9);
            assert_abs_diff_eq!(v[1], e[1], epsilon = 1e-9);
        }
    }

    #[test]
    fn triangle_vertices() {
        // x1 >= 0, x2 >= 0, x1 + x2 <= 1
        let h = HRep::new(
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0]),
            vec(&[0.0, 0.0, -1.0]),
        )
        .unwrap();
        let vs = h.brute_vertices().unwrap();
        assert_eq!(vs.len(), 3);
        assert_abs_diff_eq!(vs[0][0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(vs[0][1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(vs[1][1], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(vs[2][0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn abs_epigraph_kink_vertex() {
        let vs = abs_epigraph().brute_vertices().unwrap();
        assert_eq!(vs.len(), 1);
        assert_abs_diff_eq!(vs[0][0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(vs[0][1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn square_has_no_extreme_directions() {
        assert!(unit_square().brute_extreme_directions().unwrap().is_empty());
    }

    #[test]
    fn abs_epigraph_rays() {
        let ds = abs_epigraph().brute_extreme_directions().unwrap();
        assert_eq!(ds.len(), 2);
        // Sorted lexicographically: (-1, 1) then (1, 1); both max-norm 1.
        assert_abs_diff_eq!(ds[0][0], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ds[0][1], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ds[1][0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ds[1][1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn orthant_rays() {
        let h = HRep::new(DMatrix::identity(2, 2), vec(&[0.0, 0.0])).unwrap();
        let ds = h.brute_extreme_directions().unwrap();
        assert_eq!(ds.len(), 2);
        assert_abs_diff_eq!(ds[0][0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ds[0][1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ds[1][0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ds[1][1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn guard_rejects_oversized_inputs() {
        let h = HRep::new(DMatrix::zeros(30, 2), DVector::zeros(30)).unwrap();
        assert!(matches!(
            h.brute_vertices(),
            Err(Error::GuardViolation(_))
        ));
    }

    #[test]
    fn vertices_lie_on_enough_active_rows() {
        let h = HRep::new(
            DMatrix::from_row_slice(
                5,
                2,
                &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0, 1.0, 1.0],
            ),
            vec(&[-1.0, -1.0, -1.0, -1.0, -1.5]),
        )
        .unwrap();
        for v in h.brute_vertices().unwrap() {
            assert!(h.contains(&v, 1e-9).unwrap());
            let active = (0..5)
                .filter(|&i| (h.b.row(i).transpose().dot(&v) - h.c[i]).abs() <= 1e-9)
                .count();
            assert!(active >= 2, "vertex {v:?} has only {active} active rows");
        }
    }

    #[test]
    fn minkowski_reconstruction_of_bounded_sets() {
        // Random convex combinations of the vertex set stay inside.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sets = vec![
            unit_square(),
            HRep::new(
                DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0]),
                vec(&[0.0, 0.0, -1.0]),
            )
            .unwrap(),
            HRep::new(
                DMatrix::from_row_slice(
                    6,
                    3,
                    &[
                        1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0,
                        1.0, 0.0, 0.0, -1.0,
                    ],
                ),
                vec(&[0.0, -1.0, 0.0, -1.0, 0.0, -1.0]),
            )
            .unwrap(),
        ];
        for h in &sets {
            let vs = h.brute_vertices().unwrap();
            assert!(!vs.is_empty());
            for _ in 0..100 {
                let mut weights: Vec<f64> = (0..vs.len()).map(|_| rng.gen::<f64>()).collect();
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
                let mut x = DVector::zeros(h.dim());
                for (w, v) in weights.iter().zip(&vs) {
                    x += v * *w;
                }
                assert!(h.contains(&x, 1e-9).unwrap());
            }
        }
    }
}
