//! Polyhedral projection via multiple objective linear programming.
//!
//! Given a P-representation `Y = {x : exists u, B x + C u >= c}`, a
//! V-representation of `Y` is recovered from the upper image of the multiple
//! objective linear program with objectives `z(x) = (x, -sum(x))`. The upper
//! image `P = Q + R^{n+1}_+` (with `Q` the objective-space image) is computed
//! by an outer-approximation scheme: starting from coordinatewise lower
//! bounds, each unverified vertex `t` of the current outer polyhedron is
//! tested with the scalar program `min {alpha : z(x,u) <= t + alpha e}`;
//! either `t` is confirmed as a vertex of `P` or the program's dual
//! multipliers yield a supporting halfspace that cuts `t` off. Because the
//! image `Q` lies in the hyperplane `sum(z) = 0`, filtering the
//! V-representation of `P` by `sum(z) = 0` and dropping the last coordinate
//! recovers `Y`.
//!
//! Unbounded projections are handled in two stages: the extreme rays of the
//! recession cone of `Y` are found by slicing the cone with a unit box (every
//! extreme ray has max-norm 1, so nothing is truncated), and the vertices of
//! `Y` are found inside a large box whose adequacy is certified a posteriori:
//! each vertex on the box boundary must be reproducible from the interior
//! vertices and the exact ray set, otherwise the box grows and the run
//! repeats.

use nalgebra::{DMatrix, DVector};

use crate::lp::{self, LpProblem, LpStatus, Sense};
use crate::poly::{normalize_max, sort_points, PRep, VRep, DEDUP_TOL};
use crate::{Error, Result};

/// Vertex confirmation tolerance for the outer-approximation loop.
pub const CONFIRM_TOL: f64 = 1e-7;
/// Image-hyperplane filter `|sum(z)| <= FILTER_TOL * scale`. Kept strictly
/// looser than [`CONFIRM_TOL`] so no true image vertex is dropped.
pub const FILTER_TOL: f64 = 1e-6;

const MAX_CUTS: usize = 100_000;
const BOX_RADII: [f64; 2] = [1024.0, 32768.0];

/// The projection problem recast as a multiple objective linear program:
/// minimize the `n+1` objectives `(x, -sum(x))` over the lifted region.
#[derive(Clone, Debug)]
pub struct MolpProblem {
    /// Objective matrix, one row per objective, over variables `(x, u)`.
    pub objectives: DMatrix<f64>,
    /// Feasible region `{(x, u) : B x + C u >= c}`.
    pub region: PRep,
}

impl MolpProblem {
    /// Number of objectives.
    pub fn objective_count(&self) -> usize {
        self.objectives.nrows()
    }

    fn constraint_matrix(&self) -> DMatrix<f64> {
        let m = self.region.rows();
        let n = self.region.dim();
        let k = self.region.aux_dim();
        let mut a = DMatrix::zeros(m, n + k);
        a.view_mut((0, 0), (m, n)).copy_from(&self.region.b);
        a.view_mut((0, n), (m, k)).copy_from(&self.region.cu);
        a
    }
}

/// V-representation of the upper image in `R^{n+1}`.
#[derive(Clone, Debug)]
pub struct UpperImage {
    pub vrep: VRep,
    /// Dimension of the projected space (`n`, one less than the ambient).
    pub projected_dim: usize,
}

/// Set up the projection-as-MOLP instance for a P-representation.
pub fn build_molp(p: &PRep) -> MolpProblem {
    let n = p.dim();
    let k = p.aux_dim();
    let mut objectives = DMatrix::zeros(n + 1, n + k);
    for i in 0..n {
        objectives[(i, i)] = 1.0;
        objectives[(n, i)] = -1.0;
    }
    MolpProblem {
        objectives,
        region: p.clone(),
    }
}

/// Compute a V-representation of the upper image.
///
/// The region must be nonempty; projections whose polyhedron contains a line
/// have no vertex structure and are rejected with [`Error::NotPointed`].
pub fn solve_upper_image(m: &MolpProblem) -> Result<UpperImage> {
    let n = m.region.dim();
    let a = m.constraint_matrix();
    feasible_point(&a, &m.region.c)?;
    match objective_lower_bounds(&m.objectives, &a, &m.region.c)? {
        Some(lower) => {
            let points = benson_vertices(&m.objectives, &a, &m.region.c, &lower)?;
            Ok(UpperImage {
                vrep: VRep {
                    points,
                    directions: unit_directions(n + 1),
                },
                projected_dim: n,
            })
        }
        None => unbounded_upper_image(m),
    }
}

/// Keep exactly the points and directions on the image hyperplane
/// `sum(z) = 0` and drop the last coordinate; the result is a
/// V-representation of the projection.
pub fn extract_projection(u: &UpperImage) -> Result<VRep> {
    let n = u.projected_dim;
    let mut points = Vec::new();
    for z in &u.vrep.points {
        let scale = z.amax().max(1.0);
        if z.sum().abs() <= FILTER_TOL * scale {
            points.push(z.rows(0, n).into_owned());
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyProjection);
    }
    dedup_points(&mut points, DEDUP_TOL);
    sort_points(&mut points);

    let mut directions = Vec::new();
    for d in &u.vrep.directions {
        let mut d = d.clone();
        normalize_max(&mut d);
        if d.sum().abs() <= FILTER_TOL {
            let mut proj = d.rows(0, n).into_owned();
            normalize_max(&mut proj);
            directions.push(proj);
        }
    }
    dedup_points(&mut directions, DEDUP_TOL);
    sort_points(&mut directions);

    Ok(VRep { points, directions })
}

/// Full pipeline: V-representation of `{x : exists u, B x + C u >= c}`.
///
/// Every returned point is re-checked to admit a lifted witness `u` with
/// `B x + C u >= c - 1e-6`.
pub fn project(p: &PRep) -> Result<VRep> {
    let molp = build_molp(p);
    let upper = solve_upper_image(&molp)?;
    let vrep = extract_projection(&upper)?;
    for x in &vrep.points {
        if !has_lifted_witness(p, x, 1e-6)? {
            return Err(Error::Numeric(format!(
                "projected point {x:?} admits no lifted witness"
            )));
        }
    }
    Ok(vrep)
}

/// Feasibility of the fiber over `x`, with slack `tol` on every row.
fn has_lifted_witness(p: &PRep, x: &DVector<f64>, tol: f64) -> Result<bool> {
    let shifted = &p.c - &p.b * x;
    let rhs = shifted.map(|v| v - tol);
    let senses = vec![Sense::Ge; p.rows()];
    let r = lp::solve_feasibility(&p.cu, &senses, &rhs);
    match r.status {
        LpStatus::Optimal => Ok(true),
        LpStatus::Infeasible => Ok(false),
        _ => Err(Error::Numeric("witness feasibility probe failed".into())),
    }
}

// ---------------------------------------------------------------------------
// Bounded core: outer approximation of the upper image.
// ---------------------------------------------------------------------------

/// Max-min-slack feasible point of `{v : a v >= rhs}`.
fn feasible_point(a: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let (m, d) = (a.nrows(), a.ncols());
    let mut rows = DMatrix::zeros(m, d + 1);
    rows.view_mut((0, 0), (m, d)).copy_from(a);
    for i in 0..m {
        rows[(i, d)] = -1.0;
    }
    let mut objective = DVector::zeros(d + 1);
    objective[d] = -1.0; // maximize the slack
    let mut upper = DVector::from_element(d + 1, f64::INFINITY);
    upper[d] = 1.0;
    let lower = DVector::from_element(d + 1, f64::NEG_INFINITY);
    let p = LpProblem::with_bounds(objective, rows, vec![Sense::Ge; m], rhs.clone(), lower, upper)
        .expect("well-formed slack problem");
    let r = lp::solve(&p);
    match r.status {
        LpStatus::Optimal => {
            let v = r.x.expect("optimal point");
            if v[d] < -lp::FEASIBILITY_TOL {
                Err(Error::InfeasibleRegion)
            } else {
                Ok(v.rows(0, d).into_owned())
            }
        }
        LpStatus::Infeasible => Err(Error::InfeasibleRegion),
        _ => Err(Error::Numeric("feasibility probe failed".into())),
    }
}

/// Coordinatewise lower bounds of the image; `None` when any objective is
/// unbounded below.
fn objective_lower_bounds(
    z: &DMatrix<f64>,
    a: &DMatrix<f64>,
    rhs: &DVector<f64>,
) -> Result<Option<DVector<f64>>> {
    let q = z.nrows();
    let mut lower = DVector::zeros(q);
    for i in 0..q {
        let p = LpProblem::new(
            z.row(i).transpose(),
            a.clone(),
            vec![Sense::Ge; a.nrows()],
            rhs.clone(),
        )?;
        let r = lp::solve(&p);
        match r.status {
            LpStatus::Optimal => lower[i] = r.objective,
            LpStatus::Unbounded => return Ok(None),
            LpStatus::Infeasible => return Err(Error::InfeasibleRegion),
            LpStatus::NumericError => {
                return Err(Error::Numeric("objective bound probe failed".into()))
            }
        }
    }
    Ok(Some(lower))
}

struct OuterVertex {
    z: DVector<f64>,
    active: Vec<u32>,
    confirmed: bool,
}

type CutRow = (DVector<f64>, f64);

/// Vertices of the upper image when its recession cone is exactly the
/// nonnegative orthant (all objectives bounded below).
fn benson_vertices(
    z: &DMatrix<f64>,
    a: &DMatrix<f64>,
    rhs: &DVector<f64>,
    lower: &DVector<f64>,
) -> Result<Vec<DVector<f64>>> {
    let q = z.nrows();
    let mut rows: Vec<CutRow> = Vec::new();
    for i in 0..q {
        let mut w = DVector::zeros(q);
        w[i] = 1.0;
        rows.push((w, lower[i]));
    }
    let mut verts = vec![OuterVertex {
        z: lower.clone(),
        active: (0..q as u32).collect(),
        confirmed: false,
    }];
    // The image lies in {sum(z) = 0}, so {sum(z) >= 0} always supports the
    // upper image; seeding it prunes the start region.
    insert_cut(&mut rows, &mut verts, DVector::from_element(q, 1.0), 0.0)?;

    let mut cuts = 0usize;
    loop {
        let Some(idx) = verts.iter().position(|v| !v.confirmed) else {
            break;
        };
        let t = verts[idx].z.clone();
        let (alpha, w, gamma) = scalarization(z, a, rhs, &t)?;
        let confirm = CONFIRM_TOL.max(4e-9 * gamma.abs().max(1.0));
        if alpha <= confirm {
            verts[idx].confirmed = true;
        } else {
            insert_cut(&mut rows, &mut verts, w, gamma)?;
        }
        cuts += 1;
        if cuts > MAX_CUTS {
            return Err(Error::Numeric(
                "outer approximation failed to terminate".into(),
            ));
        }
    }

    let mut points: Vec<DVector<f64>> = Vec::new();
    for v in verts {
        if points
            .iter()
            .all(|p| (p - &v.z).norm() > DEDUP_TOL * (1.0 + v.z.amax()))
        {
            points.push(v.z);
        }
    }
    sort_points(&mut points);
    Ok(points)
}

/// `min {alpha : a v >= rhs, z(v) <= t + alpha e}`; returns the optimum and
/// the supporting halfspace `w . z >= gamma` read off the dual multipliers.
fn scalarization(
    z: &DMatrix<f64>,
    a: &DMatrix<f64>,
    rhs: &DVector<f64>,
    t: &DVector<f64>,
) -> Result<(f64, DVector<f64>, f64)> {
    let (m, d) = (a.nrows(), a.ncols());
    let q = z.nrows();
    let mut rows = DMatrix::zeros(m + q, d + 1);
    rows.view_mut((0, 0), (m, d)).copy_from(a);
    for i in 0..q {
        for j in 0..d {
            rows[(m + i, j)] = -z[(i, j)];
        }
        rows[(m + i, d)] = 1.0;
    }
    let mut all_rhs = DVector::zeros(m + q);
    all_rhs.rows_mut(0, m).copy_from(rhs);
    for i in 0..q {
        all_rhs[m + i] = -t[i];
    }
    let mut objective = DVector::zeros(d + 1);
    objective[d] = 1.0;
    let p = LpProblem::new(objective, rows, vec![Sense::Ge; m + q], all_rhs)?;
    let r = lp::solve(&p);
    if r.status != LpStatus::Optimal {
        return Err(Error::Numeric(format!(
            "scalarization ended with status {:?}",
            r.status
        )));
    }
    let duals = r.duals.expect("duals on optimal");
    let y = duals.rows(0, m).into_owned();
    let mut w = duals.rows(m, q).into_owned();
    let mut gamma = rhs.dot(&y);
    let total = w.sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Numeric(format!(
            "scalarization duals sum to {total}, expected 1"
        )));
    }
    w /= total;
    gamma /= total;
    if ((gamma - w.dot(t)) - r.objective).abs() > 1e-6 * gamma.abs().max(1.0) {
        return Err(Error::Numeric("inconsistent scalarization duals".into()));
    }
    Ok((r.objective, w, gamma))
}

/// Insert the halfspace `w . z >= gamma` into the outer approximation,
/// updating the vertex list incrementally: vertices strictly inside stay,
/// cut-off vertices are replaced by the crossings of their edges (bounded
/// edges to kept vertices, unbounded edges along the unit recession
/// directions) with the cut hyperplane.
fn insert_cut(
    rows: &mut Vec<CutRow>,
    verts: &mut Vec<OuterVertex>,
    w: DVector<f64>,
    gamma: f64,
) -> Result<()> {
    let q = w.len();
    let tau = 1e-9 * gamma.abs().max(1.0);
    let new_row = rows.len() as u32;

    let offsets: Vec<f64> = verts.iter().map(|v| w.dot(&v.z) - gamma).collect();
    let cut_idx: Vec<usize> = (0..verts.len()).filter(|&i| offsets[i] < -tau).collect();
    if cut_idx.is_empty() {
        rows.push((w, gamma));
        for (v, &off) in verts.iter_mut().zip(&offsets) {
            if off.abs() <= tau {
                v.active.push(new_row);
            }
        }
        return Ok(());
    }
    let kept_idx: Vec<usize> = (0..verts.len()).filter(|&i| offsets[i] >= -tau).collect();

    let mut new_pts: Vec<DVector<f64>> = Vec::new();
    for &ci in &cut_idx {
        for &ki in &kept_idx {
            let common = intersect_sorted(&verts[ci].active, &verts[ki].active);
            if rank_of_rows(rows, &common, q) != q - 1 {
                continue;
            }
            let da = offsets[ci];
            let db = offsets[ki];
            let denom = db - da;
            if denom <= 0.0 {
                continue;
            }
            let theta = -da / denom;
            if theta >= 1.0 - 1e-12 {
                continue; // crossing lands on the kept endpoint itself
            }
            let p = &verts[ci].z + (&verts[ki].z - &verts[ci].z) * theta;
            new_pts.push(p);
        }
        // Unbounded edges: the outer polyhedron recedes along every unit
        // direction; the ray from a cut-off vertex along e_i is an edge when
        // the rows active along it retain rank q-1.
        for i in 0..q {
            if w[i] <= 1e-12 {
                continue;
            }
            let along: Vec<u32> = verts[ci]
                .active
                .iter()
                .copied()
                .filter(|&j| rows[j as usize].0[i].abs() <= 1e-12)
                .collect();
            if rank_of_rows(rows, &along, q) != q - 1 {
                continue;
            }
            let step = -offsets[ci] / w[i];
            let mut p = verts[ci].z.clone();
            p[i] += step;
            new_pts.push(p);
        }
    }

    rows.push((w, gamma));

    let mut next: Vec<OuterVertex> = Vec::with_capacity(kept_idx.len() + new_pts.len());
    for &ki in &kept_idx {
        let mut active = verts[ki].active.clone();
        if offsets[ki].abs() <= tau {
            active.push(new_row);
        }
        next.push(OuterVertex {
            z: verts[ki].z.clone(),
            active,
            confirmed: verts[ki].confirmed,
        });
    }
    for p in new_pts {
        let scale = 1.0 + p.amax();
        if next.iter().any(|v| (&v.z - &p).norm() <= 1e-8 * scale) {
            continue;
        }
        let active = scan_active(rows, &p);
        next.push(OuterVertex {
            z: p,
            active,
            confirmed: false,
        });
    }
    if next.is_empty() {
        return Err(Error::Numeric(
            "outer approximation lost all vertices".into(),
        ));
    }
    *verts = next;
    Ok(())
}

fn scan_active(rows: &[CutRow], z: &DVector<f64>) -> Vec<u32> {
    rows.iter()
        .enumerate()
        .filter(|(_, (w, gamma))| (w.dot(z) - gamma).abs() <= 1e-9 * gamma.abs().max(1.0))
        .map(|(j, _)| j as u32)
        .collect()
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Rank of the selected cut normals, by Gaussian elimination.
fn rank_of_rows(rows: &[CutRow], idxs: &[u32], q: usize) -> usize {
    if idxs.is_empty() {
        return 0;
    }
    let mut m = DMatrix::zeros(idxs.len(), q);
    for (k, &j) in idxs.iter().enumerate() {
        m.row_mut(k).copy_from(&rows[j as usize].0.transpose());
    }
    matrix_rank(&mut m)
}

fn matrix_rank(m: &mut DMatrix<f64>) -> usize {
    let rows = m.nrows();
    let cols = m.ncols();
    let scale = m.amax().max(1.0);
    let tol = 1e-9 * scale;
    let mut rank = 0usize;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, val) = (rank..rows)
            .map(|r| (r, m[(r, col)].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if val <= tol {
            continue;
        }
        m.swap_rows(piv, rank);
        let inv = 1.0 / m[(rank, col)];
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let f = m[(r, col)] * inv;
            if f == 0.0 {
                continue;
            }
            for c in col..cols {
                let delta = f * m[(rank, c)];
                m[(r, c)] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

fn unit_directions(q: usize) -> Vec<DVector<f64>> {
    (0..q)
        .map(|i| {
            let mut e = DVector::zeros(q);
            e[i] = 1.0;
            e
        })
        .collect()
}

fn dedup_points(points: &mut Vec<DVector<f64>>, tol: f64) {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        if out.iter().all(|o| (o - &p).norm() > tol) {
            out.push(p);
        }
    }
    *points = out;
}

// ---------------------------------------------------------------------------
// Unbounded projections: exact rays from a cone slice, vertices from a
// certified box.
// ---------------------------------------------------------------------------

fn unbounded_upper_image(m: &MolpProblem) -> Result<UpperImage> {
    let p = &m.region;
    let n = p.dim();
    if lineality_direction(p)?.is_some() {
        return Err(Error::NotPointed);
    }
    let rays = recession_rays(p)?;

    for radius in BOX_RADII {
        let boxed = with_box(p, radius);
        let all = bounded_points(&boxed)?;
        let margin = 1e-6 * radius;
        let (interior, boundary): (Vec<_>, Vec<_>) =
            all.into_iter().partition(|v| v.amax() < radius - margin);
        let mut certified = !interior.is_empty();
        for w in &boundary {
            if !in_conic_hull(w, &interior, &rays)? {
                certified = false;
                break;
            }
        }
        if certified {
            let mut points: Vec<DVector<f64>> = interior.iter().map(lift).collect();
            sort_points(&mut points);
            let mut directions: Vec<DVector<f64>> = rays.iter().map(lift).collect();
            directions.extend(unit_directions(n + 1));
            return Ok(UpperImage {
                vrep: VRep { points, directions },
                projected_dim: n,
            });
        }
    }
    Err(Error::Numeric(
        "vertex box exhausted without certification; projection has far-out vertices".into(),
    ))
}

/// A nonzero direction of the lineality space of the projection, if any:
/// `d` with both `d` and `-d` admitting lifted recession witnesses.
fn lineality_direction(p: &PRep) -> Result<Option<DVector<f64>>> {
    let n = p.dim();
    let k = p.aux_dim();
    let m = p.rows();
    // Variables (d, w, w'); rows B d + C w >= 0 and -B d + C w' >= 0.
    let mut a = DMatrix::zeros(2 * m, n + 2 * k);
    a.view_mut((0, 0), (m, n)).copy_from(&p.b);
    a.view_mut((0, n), (m, k)).copy_from(&p.cu);
    a.view_mut((m, 0), (m, n)).copy_from(&(-&p.b));
    a.view_mut((m, n + k), (m, k)).copy_from(&p.cu);
    let rhs = DVector::zeros(2 * m);
    let mut lower = DVector::from_element(n + 2 * k, f64::NEG_INFINITY);
    let mut upper = DVector::from_element(n + 2 * k, f64::INFINITY);
    for j in 0..n {
        lower[j] = -1.0;
        upper[j] = 1.0;
    }
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut objective = DVector::zeros(n + 2 * k);
            objective[i] = -sign; // maximize sign * d_i
            let prob = LpProblem::with_bounds(
                objective,
                a.clone(),
                vec![Sense::Ge; 2 * m],
                rhs.clone(),
                lower.clone(),
                upper.clone(),
            )?;
            let r = lp::solve(&prob);
            if r.status != LpStatus::Optimal {
                return Err(Error::Numeric("lineality probe failed".into()));
            }
            if -r.objective > 0.5 {
                let x = r.x.expect("optimal point");
                return Ok(Some(x.rows(0, n).into_owned()));
            }
        }
    }
    Ok(None)
}

/// Extreme rays of `{d : exists w, B d + C w >= 0}`, each normalized to
/// max-norm 1. The cone is sliced with the unit box; every extreme ray is a
/// vertex of the slice with max-norm exactly 1, and a candidate is extreme
/// precisely when it is not a conic combination of the other candidates.
fn recession_rays(p: &PRep) -> Result<Vec<DVector<f64>>> {
    let cone = PRep {
        b: p.b.clone(),
        cu: p.cu.clone(),
        c: DVector::zeros(p.rows()),
    };
    let sliced = with_box(&cone, 1.0);
    let verts = bounded_points(&sliced)?;
    let mut candidates: Vec<DVector<f64>> = verts
        .into_iter()
        .filter(|v| v.amax() >= 1.0 - 1e-6)
        .map(|mut v| {
            normalize_max(&mut v);
            v
        })
        .collect();
    dedup_points(&mut candidates, DEDUP_TOL);
    let mut essential = Vec::new();
    for (j, cand) in candidates.iter().enumerate() {
        let others: Vec<&DVector<f64>> = candidates
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != j)
            .map(|(_, c)| c)
            .collect();
        if !conic_combination_exists(cand, &others)? {
            essential.push(cand.clone());
        }
    }
    sort_points(&mut essential);
    Ok(essential)
}

/// Projection restricted to be bounded: used for cone slices and boxed runs,
/// which are bounded by construction.
fn bounded_points(p: &PRep) -> Result<Vec<DVector<f64>>> {
    let molp = build_molp(p);
    let a = molp.constraint_matrix();
    feasible_point(&a, &p.c)?;
    let lower = objective_lower_bounds(&molp.objectives, &a, &p.c)?
        .ok_or_else(|| Error::Numeric("boxed subproblem reported unbounded".into()))?;
    let verts = benson_vertices(&molp.objectives, &a, &p.c, &lower)?;
    let upper = UpperImage {
        vrep: VRep {
            points: verts,
            directions: unit_directions(p.dim() + 1),
        },
        projected_dim: p.dim(),
    };
    Ok(extract_projection(&upper)?.points)
}

/// Append `-radius <= x_i <= radius` rows for the projected coordinates.
fn with_box(p: &PRep, radius: f64) -> PRep {
    let n = p.dim();
    let k = p.aux_dim();
    let m = p.rows();
    let mut b = DMatrix::zeros(m + 2 * n, n);
    b.view_mut((0, 0), (m, n)).copy_from(&p.b);
    for i in 0..n {
        b[(m + i, i)] = 1.0;
        b[(m + n + i, i)] = -1.0;
    }
    let mut cu = DMatrix::zeros(m + 2 * n, k);
    cu.view_mut((0, 0), (m, k)).copy_from(&p.cu);
    let mut c = DVector::from_element(m + 2 * n, -radius);
    c.rows_mut(0, m).copy_from(&p.c);
    PRep { b, cu, c }
}

/// Is `target` in `conv(points) + cone(rays)` within a scale-relative slack?
fn in_conic_hull(
    target: &DVector<f64>,
    points: &[DVector<f64>],
    rays: &[DVector<f64>],
) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let n = target.len();
    let cols = points.len() + rays.len();
    let slack = 1e-5 * target.amax().max(1.0);
    // Rows: componentwise |sum(lambda_i v_i) + sum(mu_j r_j) - target| <= slack,
    // sum(lambda) = 1, variables nonnegative.
    let mut a = DMatrix::zeros(2 * n + 1, cols);
    for (j, v) in points.iter().chain(rays.iter()).enumerate() {
        for i in 0..n {
            a[(i, j)] = v[i];
            a[(n + i, j)] = -v[i];
        }
    }
    for j in 0..points.len() {
        a[(2 * n, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(2 * n + 1);
    for i in 0..n {
        rhs[i] = target[i] - slack;
        rhs[n + i] = -target[i] - slack;
    }
    rhs[2 * n] = 1.0;
    let mut senses = vec![Sense::Ge; 2 * n];
    senses.push(Sense::Eq);
    let prob = LpProblem::with_bounds(
        DVector::zeros(cols),
        a,
        senses,
        rhs,
        DVector::zeros(cols),
        DVector::from_element(cols, f64::INFINITY),
    )?;
    match lp::solve(&prob).status {
        LpStatus::Optimal => Ok(true),
        LpStatus::Infeasible => Ok(false),
        _ => Err(Error::Numeric("conic hull probe failed".into())),
    }
}

/// Is `v` a conic combination of `others`?
fn conic_combination_exists(v: &DVector<f64>, others: &[&DVector<f64>]) -> Result<bool> {
    let n = v.len();
    if others.is_empty() {
        return Ok(v.amax() <= 1e-9);
    }
    let mut a = DMatrix::zeros(n, others.len());
    for (j, o) in others.iter().enumerate() {
        for i in 0..n {
            a[(i, j)] = o[i];
        }
    }
    let prob = LpProblem::with_bounds(
        DVector::zeros(others.len()),
        a,
        vec![Sense::Eq; n],
        v.clone(),
        DVector::zeros(others.len()),
        DVector::from_element(others.len(), f64::INFINITY),
    )?;
    match lp::solve(&prob).status {
        LpStatus::Optimal => Ok(true),
        LpStatus::Infeasible => Ok(false),
        _ => Err(Error::Numeric("extreme ray probe failed".into())),
    }
}

fn lift(v: &DVector<f64>) -> DVector<f64> {
    let n = v.len();
    let mut z = DVector::zeros(n + 1);
    z.rows_mut(0, n).copy_from(v);
    z[n] = -v.sum();
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn vec(data: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(data)
    }

    fn segment_prep() -> PRep {
        // Y = [0, 1] in R^1: rows x >= 0, -x >= -1.
        PRep::new(
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            DMatrix::zeros(2, 0),
            vec(&[0.0, -1.0]),
        )
        .unwrap()
    }

    fn diagonal_prep() -> PRep {
        // {(x, u) : x = u, 0 <= u <= 1} projected to x.
        PRep::new(
            DMatrix::from_row_slice(4, 1, &[1.0, -1.0, 0.0, 0.0]),
            DMatrix::from_row_slice(4, 1, &[-1.0, 1.0, 1.0, -1.0]),
            vec(&[0.0, 0.0, 0.0, -1.0]),
        )
        .unwrap()
    }

    fn abs_epigraph_prep() -> PRep {
        // epi |x| in R^2: r >= x, r >= -x; no auxiliaries.
        PRep::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, 1.0]),
            DMatrix::zeros(2, 0),
            vec(&[0.0, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn molp_objective_counts() {
        assert_eq!(build_molp(&segment_prep()).objective_count(), 2);
        let square = PRep::from_hrep(
            &crate::poly::HRep::new(
                DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]),
                vec(&[-1.0, -1.0, -1.0, -1.0]),
            )
            .unwrap(),
        );
        assert_eq!(build_molp(&square).objective_count(), 3);
        assert_eq!(build_molp(&abs_epigraph_prep()).objective_count(), 3);
    }

    #[test]
    fn segment_upper_image() {
        let u = solve_upper_image(&build_molp(&segment_prep())).unwrap();
        let pts = &u.vrep.points;
        assert_eq!(pts.len(), 2);
        // Sorted lexicographically: (0,0) then (1,-1).
        assert_abs_diff_eq!(pts[0][0], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(pts[0][1], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(pts[1][0], 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(pts[1][1], -1.0, epsilon = 1e-7);
        // Unit directions present.
        assert!(u.vrep.directions.len() >= 2);
    }

    #[test]
    fn singleton_upper_image() {
        // Y = {0}: rows x >= 0, -x >= 0.
        let p = PRep::new(
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            DMatrix::zeros(2, 0),
            vec(&[0.0, 0.0]),
        )
        .unwrap();
        let u = solve_upper_image(&build_molp(&p)).unwrap();
        assert_eq!(u.vrep.points.len(), 1);
        assert_abs_diff_eq!(u.vrep.points[0][0], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(u.vrep.points[0][1], 0.0, epsilon = 1e-7);
        let y = extract_projection(&u).unwrap();
        assert_eq!(y.points.len(), 1);
        assert_abs_diff_eq!(y.points[0][0], 0.0, epsilon = 1e-7);
    }

    #[test]
    fn square_upper_image_has_four_corner_images() {
        let square = PRep::new(
            DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]),
            DMatrix::zeros(4, 0),
            vec(&[-1.0, -1.0, -1.0, -1.0]),
        )
        .unwrap();
        let u = solve_upper_image(&build_molp(&square)).unwrap();
        assert_eq!(u.vrep.points.len(), 4);
        for z in &u.vrep.points {
            assert_abs_diff_eq!(z.sum(), 0.0, epsilon = 1e-6);
            assert_abs_diff_eq!(z[0].abs(), 1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(z[1].abs(), 1.0, epsilon = 1e-6);
        }
        let y = extract_projection(&u).unwrap();
        assert_eq!(y.points.len(), 4);
        assert!(y.directions.is_empty());
    }

    #[test]
    fn diagonal_segment_projects_to_unit_interval() {
        let y = project(&diagonal_prep()).unwrap();
        assert_eq!(y.points.len(), 2);
        assert_abs_diff_eq!(y.points[0][0], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(y.points[1][0], 1.0, epsilon = 1e-7);
        assert!(y.directions.is_empty());
    }

    #[test]
    fn abs_epigraph_vertex_and_rays() {
        let y = project(&abs_epigraph_prep()).unwrap();
        assert_eq!(y.points.len(), 1);
        assert_abs_diff_eq!(y.points[0][0], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(y.points[0][1], 0.0, epsilon = 1e-6);
        // The returned rays generate the same cone as {(1,1), (-1,1), (0,1)}.
        assert_eq!(y.directions.len(), 2);
        let refs: Vec<&DVector<f64>> = y.directions.iter().collect();
        for expected in [vec(&[1.0, 1.0]), vec(&[-1.0, 1.0]), vec(&[0.0, 1.0])] {
            assert!(conic_combination_exists(&expected, &refs).unwrap());
        }
        let generators = [vec(&[1.0, 1.0]), vec(&[-1.0, 1.0]), vec(&[0.0, 1.0])];
        let gen_refs: Vec<&DVector<f64>> = generators.iter().collect();
        for d in &y.directions {
            assert!(conic_combination_exists(d, &gen_refs).unwrap());
        }
    }

    #[test]
    fn infeasible_region_is_reported() {
        let p = PRep::new(
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            DMatrix::zeros(2, 0),
            vec(&[1.0, 0.0]),
        )
        .unwrap();
        assert!(matches!(project(&p), Err(Error::InfeasibleRegion)));
    }

    #[test]
    fn halfplane_has_no_vertices() {
        // Y = {(x1, x2) : x2 >= 0} contains a line; not pointed.
        let p = PRep::new(
            DMatrix::from_row_slice(1, 2, &[0.0, 1.0]),
            DMatrix::zeros(1, 0),
            vec(&[0.0]),
        )
        .unwrap();
        assert!(matches!(project(&p), Err(Error::NotPointed)));
    }

    #[test]
    fn upper_image_points_satisfy_image_constraint() {
        for p in [segment_prep(), diagonal_prep(), abs_epigraph_prep()] {
            let u = solve_upper_image(&build_molp(&p)).unwrap();
            for z in &u.vrep.points {
                assert!(z.sum() >= -1e-6);
            }
        }
    }

    #[test]
    fn extract_is_idempotent() {
        let u = solve_upper_image(&build_molp(&segment_prep())).unwrap();
        let first = extract_projection(&u).unwrap();
        let relifted = UpperImage {
            vrep: VRep {
                points: first.points.iter().map(lift).collect(),
                directions: first
                    .directions
                    .iter()
                    .map(lift)
                    .chain(unit_directions(2))
                    .collect(),
            },
            projected_dim: u.projected_dim,
        };
        let second = extract_projection(&relifted).unwrap();
        assert_eq!(first.points.len(), second.points.len());
        for (a, b) in first.points.iter().zip(&second.points) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
        assert_eq!(first.directions.len(), second.directions.len());
    }

    #[test]
    fn unit_square_with_auxiliary_lift() {
        // x in square, u = x1 + x2 as an auxiliary; projection ignores u.
        let p = PRep::new(
            DMatrix::from_row_slice(
                6,
                2,
                &[
                    1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0, 1.0, 1.0, -1.0, -1.0,
                ],
            ),
            DMatrix::from_row_slice(6, 1, &[0.0, 0.0, 0.0, 0.0, -1.0, 1.0]),
            vec(&[-1.0, -1.0, -1.0, -1.0, 0.0, 0.0]),
        )
        .unwrap();
        let y = project(&p).unwrap();
        assert_eq!(y.points.len(), 4);
    }
}
