//! Cocycles of the total complex: validation, curvature, charge and gauge equivalence.
//!
//! An `n`-gerbe with connection (`n >= -1`) is a total cochain `H` of degree
//! `k = n + 2` with `D H = 0`, where equations involving the circle-valued
//! `(0, k)` layer hold modulo 2π. A bundle is the case `n = 0`, a gerbe `n = 1`.
//! The curvature is minus the global `(k, 0)` part.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::bicomplex::{big_d, wrap_finite, BigradedCochain, GaugePotential, TotalCochain};
use crate::cover::Cover;
use crate::error::{invalid, Error, Result};
use crate::linalg::PivotedCholesky;
use crate::simplicial::{fundamental_cycle, integrate, Cochain};

/// Default tolerance for [`validate_cocycle`].
pub const VALIDATION_TOL: f64 = 1e-9;
/// Default tolerance for [`gauge_equivalent`] residuals.
pub const EQUIVALENCE_TOL: f64 = 1e-8;

/// An `n`-gerbe with connection on a covered complex.
#[derive(Clone, Debug, PartialEq)]
pub struct GerbeDatum {
    level: i32,
    data: TotalCochain,
    cover: Arc<Cover>,
}

impl GerbeDatum {
    /// Wraps a total cochain of degree `level + 2`; its `(0, level + 2)` part
    /// is taken as the circle-valued transition layer.
    pub fn new(level: i32, data: TotalCochain, cover: Arc<Cover>) -> Result<Self> {
        if level < -1 {
            return Err(invalid(format!("gerbe level must be at least -1, got {level}")));
        }
        let k = (level + 2) as usize;
        if data.degree() != k {
            return Err(invalid(format!("a level-{level} datum has total degree {k}, got {}", data.degree())));
        }
        data.check(&cover)?;
        Ok(Self { level, data: data.with_angle_layer(), cover })
    }

    /// The zero datum: flat, with trivial transition functions.
    pub fn trivial(level: i32, cover: Arc<Cover>) -> Result<Self> {
        let k = usize::try_from(level.saturating_add(2)).map_err(|_| invalid(format!("bad level {level}")))?;
        Self::new(level, TotalCochain::zero(k), cover)
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    /// Total degree `level + 2`.
    pub fn degree(&self) -> usize {
        self.data.degree()
    }

    pub fn data(&self) -> &TotalCochain {
        &self.data
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn part(&self, p: usize) -> Option<&BigradedCochain> {
        self.data.part(p)
    }

    /// Same cover and level, zero data.
    pub fn trivial_like(&self) -> Self {
        Self {
            level: self.level,
            data: TotalCochain::zero(self.degree()).with_angle_layer(),
            cover: self.cover.clone(),
        }
    }

    /// `H + D F` for a gauge potential `F` in `Λ₀^{(k-1)}`.
    pub fn gauge_transform(&self, potential: &GaugePotential) -> Result<Self> {
        self.shifted_by(potential.total())
    }

    fn shifted_by(&self, f: &TotalCochain) -> Result<Self> {
        if f.degree() + 1 != self.degree() {
            return Err(invalid(format!(
                "a level-{} datum is shifted by degree-{} cochains, got degree {}",
                self.level,
                self.degree() - 1,
                f.degree()
            )));
        }
        if f.has_angle_layer() {
            return Err(invalid("gauge parameters are real-valued"));
        }
        let df = big_d(f, &self.cover)?;
        let mut data = self.data.clone();
        data.add_scaled(&df, 1.0)?;
        Ok(Self { level: self.level, data, cover: self.cover.clone() })
    }

    fn same_setting(&self, other: &GerbeDatum) -> Result<()> {
        if self.level != other.level {
            return Err(invalid(format!("levels differ: {} vs {}", self.level, other.level)));
        }
        if *self.cover != *other.cover {
            return Err(invalid("data live on different complexes or covers"));
        }
        Ok(())
    }
}

/// Location of a large cocycle residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Offender {
    pub bidegree: (usize, usize),
    pub indices: Vec<usize>,
    pub simplex: Vec<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// Sup-norm of `D H` per bidegree `(p, n)`, after wrapping angle equations.
    pub residuals: BTreeMap<(usize, usize), f64>,
    pub tolerance: f64,
    pub passed: bool,
    /// Largest residual entries, worst first (at most five).
    pub worst: Vec<Offender>,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, &r| m.max(r))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(p, n), r) in &self.residuals {
            writeln!(f, "residual ({p},{n}): {r:.3e}")?;
        }
        for o in self.worst.iter().filter(|o| o.residual > self.tolerance) {
            writeln!(
                f,
                "  offender ({},{}) overlap {:?} simplex {:?}: {:.3e}",
                o.bidegree.0, o.bidegree.1, o.indices, o.simplex, o.residual
            )?;
        }
        write!(f, "{} at tolerance {:e}", if self.passed { "PASS" } else { "FAIL" }, self.tolerance)
    }
}

// Bidegrees of D H whose equations involve the angle layer of a degree-k datum.
fn wrapped_rows(degree: usize, has_angle: bool) -> [Option<(usize, usize)>; 2] {
    if has_angle {
        [Some((0, degree + 1)), Some((1, degree))]
    } else {
        [None, None]
    }
}

/// Checks `D H = 0`, equations involving the angle layer modulo 2π.
pub fn validate_cocycle(h: &GerbeDatum, tol: f64) -> Result<ValidationReport> {
    let cover = &h.cover;
    let complex = cover.complex();
    let k = h.degree();
    let dh = big_d(&h.data, cover)?;
    let wrapped = wrapped_rows(k, h.data.has_angle_layer());

    let mut residuals = BTreeMap::new();
    for p in 0..=(k + 1).min(complex.top_dimension()) {
        residuals.insert((p, k + 1 - p), 0.0);
    }
    let mut offenders = Vec::new();
    for part in dh.parts() {
        let bidegree = part.bidegree();
        let wrap_here = wrapped.contains(&Some(bidegree));
        let mut sup = 0.0f64;
        for (t, c) in part.components() {
            for (id, v) in c.iter() {
                let r = if wrap_here { wrap_finite(v) } else { v }.abs();
                if r.is_nan() {
                    return Err(Error::Numeric { message: "non-finite cocycle residual".into(), residual: r });
                }
                sup = sup.max(r);
                if r > 0.0 {
                    offenders.push(Offender {
                        bidegree,
                        indices: t.clone(),
                        simplex: complex.simplex(bidegree.0, id).to_vec(),
                        residual: r,
                    });
                }
            }
        }
        residuals.insert(bidegree, sup);
    }
    offenders.sort_by(|a, b| b.residual.total_cmp(&a.residual));
    offenders.truncate(5);
    let passed = residuals.values().all(|&r| r <= tol);
    Ok(ValidationReport { residuals, tolerance: tol, passed, worst: offenders })
}

/// Minus the global top-form part: the curvature `(level+2)`-cochain.
pub fn curvature(h: &GerbeDatum) -> Cochain {
    let k = h.degree();
    h.data.part(k).and_then(|part| part.component(&[])).map_or_else(|| Cochain::zero(k), |c| c.scaled(-1.0))
}

/// Integral of the curvature over the fundamental cycle, divided by 2π.
pub fn charge(h: &GerbeDatum) -> Result<f64> {
    let complex = h.cover.complex();
    if complex.top_dimension() != h.degree() {
        return Err(invalid(format!(
            "charge of a level-{} datum needs a closed {}-manifold, complex has dimension {}",
            h.level,
            h.degree(),
            complex.top_dimension()
        )));
    }
    let z = fundamental_cycle(complex)?;
    Ok(integrate(&curvature(h), &z)? / TAU)
}

/// Outcome of a gauge-equivalence search.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    /// `F` with `H2 - H1 = D F`, present when the residual is within tolerance.
    pub witness: Option<GaugePotential>,
    /// Sup-norm of `D F - (H2 - H1)`, angle rows wrapped.
    pub residual: f64,
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        self.witness.is_some()
    }
}

/// Least-squares solver for `D F = Δ` with `F ∈ Λ₀^{(k-1)}` on a fixed cover.
///
/// The operator is assembled exactly as a sparse matrix; the normal equations
/// are factored once with a rank-revealing Cholesky and reused across solves.
#[derive(Clone, Debug)]
pub struct GaugeSolver {
    cover: Arc<Cover>,
    degree: usize,
    // unknowns: (form degree, tuple, simplex id)
    columns: Vec<(usize, Vec<usize>, usize)>,
    // residual rows: (form degree, tuple, simplex id)
    rows: Vec<(usize, Vec<usize>, usize)>,
    matrix: Vec<Vec<(usize, f64)>>, // row-wise sparse
    factor: PivotedCholesky,
}

impl GaugeSolver {
    /// Solver for data of total degree `degree` (gauge potentials of degree `degree - 1`).
    pub fn new(cover: Arc<Cover>, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(invalid("total degree 0 has no gauge potentials"));
        }
        let complex = cover.complex();
        let top = complex.top_dimension();

        let mut rows = Vec::new();
        let mut row_index: Vec<HashMap<(Vec<usize>, usize), usize>> = vec![HashMap::new(); degree + 1];
        for (p, index) in row_index.iter_mut().enumerate().take(degree.min(top) + 1) {
            for t in cover.tuples(degree - p) {
                for &id in cover.overlap(&t)?.simplices(p) {
                    index.insert((t.clone(), id), rows.len());
                    rows.push((p, t.clone(), id));
                }
            }
        }

        let mut columns = Vec::new();
        let mut col_entries: Vec<Vec<(usize, f64)>> = Vec::new();
        let sets = cover.len();
        for p in 0..=(degree - 1).min(top) {
            let n = degree - 1 - p;
            if n == 0 {
                continue;
            }
            let dbar_sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            for t in cover.tuples(n) {
                let overlap = cover.overlap(&t)?;
                for &id in overlap.simplices(p) {
                    let mut entries = Vec::new();
                    // δ: insert one more index j at position α, sign (-1)^α
                    for j in (0..sets).filter(|j| !t.contains(j)) {
                        let alpha = t.iter().filter(|&&i| i < j).count();
                        let mut bigger = t.clone();
                        bigger.insert(alpha, j);
                        if let Some(&row) = row_index[p].get(&(bigger, id)) {
                            entries.push((row, if alpha % 2 == 0 { 1.0 } else { -1.0 }));
                        }
                    }
                    // -d̄ = -(-1)^n d, restricted to the same overlap
                    if p < top {
                        for &(sid, inc) in complex.cofaces(p, id) {
                            if let Some(&row) = row_index[p + 1].get(&(t.clone(), sid)) {
                                entries.push((row, -dbar_sign * inc as f64));
                            }
                        }
                    }
                    columns.push((p, t.clone(), id));
                    col_entries.push(entries);
                }
            }
        }

        let mut matrix = vec![Vec::new(); rows.len()];
        for (c, entries) in col_entries.iter().enumerate() {
            for &(r, v) in entries {
                matrix[r].push((c, v));
            }
        }
        let n = columns.len();
        let mut normal = vec![0.0; n * n];
        for row in &matrix {
            for &(c1, v1) in row {
                for &(c2, v2) in row {
                    normal[c1 * n + c2] += v1 * v2;
                }
            }
        }
        let factor = PivotedCholesky::factor(normal, n, 1e-10);
        Ok(Self { cover, degree, columns, rows, matrix, factor })
    }

    pub fn unknowns(&self) -> usize {
        self.columns.len()
    }

    pub fn equations(&self) -> usize {
        self.rows.len()
    }

    /// Numerical rank of `D` on `Λ₀`; `unknowns() - rank()` is the dimension of
    /// the gauge-for-gauge freedom.
    pub fn rank(&self) -> usize {
        self.factor.rank()
    }

    /// Applies the assembled matrix to a gauge potential.
    pub fn apply(&self, potential: &GaugePotential) -> Vec<f64> {
        let x = self.flatten_potential(potential);
        self.matrix.iter().map(|row| row.iter().map(|&(c, v)| v * x[c]).sum()).collect()
    }

    fn flatten_potential(&self, potential: &GaugePotential) -> Vec<f64> {
        self.columns
            .iter()
            .map(|(p, t, id)| potential.total().part(*p).and_then(|c| c.component(t)).map_or(0.0, |c| c.get(*id)))
            .collect()
    }

    /// Least-squares `F` minimizing `|D F - Δ|` for a degree-`k` difference `Δ`.
    pub fn solve(&self, delta: &TotalCochain) -> Result<GaugePotential> {
        if delta.degree() != self.degree {
            return Err(invalid(format!("expected degree {}, got {}", self.degree, delta.degree())));
        }
        let b: Vec<f64> = self
            .rows
            .iter()
            .map(|(p, t, id)| delta.part(*p).and_then(|c| c.component(t)).map_or(0.0, |c| c.get(*id)))
            .collect();
        let mut rhs = vec![0.0; self.columns.len()];
        for (row, &bi) in self.matrix.iter().zip(&b) {
            if bi != 0.0 {
                for &(c, v) in row {
                    rhs[c] += v * bi;
                }
            }
        }
        let x = self.factor.solve(&rhs);
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                message: "normal equations produced a non-finite solution".into(),
                residual: *bad,
            });
        }

        let mut parts: BTreeMap<usize, BTreeMap<Vec<usize>, Cochain>> = BTreeMap::new();
        for ((p, t, id), v) in self.columns.iter().zip(x) {
            parts.entry(*p).or_default().entry(t.clone()).or_insert_with(|| Cochain::zero(*p)).set(*id, v);
        }
        let mut total = TotalCochain::zero(self.degree - 1);
        for (p, comps) in parts {
            let mut part = BigradedCochain::zero(p, self.degree - 1 - p);
            for (t, c) in comps {
                part.insert(&t, c)?;
            }
            total.set_part(part)?;
        }
        GaugePotential::new(total)
    }

    /// Decides whether `h2 - h1 = D F` for some `F` in `Λ₀`, within `tol`.
    pub fn equivalence(&self, h1: &GerbeDatum, h2: &GerbeDatum, tol: f64) -> Result<Equivalence> {
        h1.same_setting(h2)?;
        if *h1.cover != *self.cover || h1.degree() != self.degree {
            return Err(invalid("solver was built for a different cover or degree"));
        }
        for (name, h) in [("first", h1), ("second", h2)] {
            let report = validate_cocycle(h, tol)?;
            if !report.passed {
                return Err(invalid(format!(
                    "{name} datum is not a cocycle at tolerance {tol:e} (residual {:.3e})",
                    report.max_residual()
                )));
            }
        }
        let k = self.degree;
        let mut delta = h2.data.clone();
        delta.add_scaled(&h1.data, -1.0)?;
        let delta = wrap_angle_part(&delta);

        let witness = self.solve(&delta)?;
        let mut res = big_d(witness.total(), &self.cover)?;
        res.add_scaled(&delta, -1.0)?;
        let residual = res
            .parts()
            .map(|part| {
                let angle_row = part.bidegree() == (0, k) && delta.has_angle_layer();
                part.components()
                    .flat_map(|(_, c)| c.iter().map(|(_, v)| v))
                    .map(|v| if angle_row { wrap_finite(v) } else { v }.abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if residual.is_nan() {
            return Err(Error::Numeric { message: "equivalence residual is not finite".into(), residual });
        }
        Ok(Equivalence { witness: (residual <= tol).then_some(witness), residual })
    }
}

fn wrap_angle_part(delta: &TotalCochain) -> TotalCochain {
    let mut out = delta.clone();
    if let Some(part) = delta.part(0).filter(|p| p.is_angle_valued()) {
        let wrapped = part.map_components(|_, c| c.map_values(wrap_finite));
        out.set_part(wrapped).expect("same bidegree");
    }
    out
}

/// Searches for `F ∈ Λ₀^{(k-1)}` with `h2 - h1 = D F`. Rejection means no
/// witness was found at `tol`; it is numeric evidence, not a proof.
pub fn gauge_equivalent(h1: &GerbeDatum, h2: &GerbeDatum, tol: f64) -> Result<Equivalence> {
    h1.same_setting(h2)?;
    let solver = GaugeSolver::new(h1.cover.clone(), h1.degree())?;
    solver.equivalence(h1, h2, tol)
}

/// `H + D F` for a full degree-`(k-1)` cochain, top form part included. The
/// curvature changes by `d` of that top part.
pub fn higher_gauge_shift(h: &GerbeDatum, full: &TotalCochain) -> Result<GerbeDatum> {
    h.shifted_by(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Lcg64;
    use crate::simplicial::SimplicialComplex;

    fn octahedron_cover() -> Arc<Cover> {
        // boundary of the octahedron: poles 0 and 5, equator 1-2-3-4
        let mut tris = Vec::new();
        for k in 0..4 {
            let a = 1 + k;
            let b = 1 + (k + 1) % 4;
            tris.push(vec![0, a, b]);
            tris.push(vec![5, a, b]);
        }
        let complex = Arc::new(SimplicialComplex::from_top_simplices(6, tris).unwrap());
        Arc::new(Cover::new(complex, vec![vec![0, 1, 2, 3, 4], vec![1, 2, 3, 4, 5]]).unwrap())
    }

    #[test]
    fn zero_datum_is_a_flat_cocycle() {
        let cover = octahedron_cover();
        let h = GerbeDatum::trivial(0, cover).unwrap();
        let report = validate_cocycle(&h, VALIDATION_TOL).unwrap();
        assert!(report.passed);
        assert_eq!(report.max_residual(), 0.0);
        assert_eq!(curvature(&h).sup_norm(), 0.0);
        assert_eq!(charge(&h).unwrap(), 0.0);
    }

    #[test]
    fn charge_needs_matching_dimension() {
        let cover = octahedron_cover();
        let h = GerbeDatum::trivial(1, cover).unwrap();
        assert!(matches!(charge(&h), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rejects_bad_levels() {
        let cover = octahedron_cover();
        assert!(GerbeDatum::trivial(-2, cover.clone()).is_err());
        assert!(GerbeDatum::new(0, TotalCochain::zero(3), cover).is_err());
    }

    #[test]
    fn assembled_operator_matches_big_d() {
        let cover = octahedron_cover();
        let mut rng = Lcg64::new(11);
        for degree in 1..=3 {
            let solver = GaugeSolver::new(cover.clone(), degree).unwrap();
            let f = GaugePotential::random(degree - 1, &cover, &mut rng, 1.0);
            let via_matrix = solver.apply(&f);
            let df = big_d(f.total(), &cover).unwrap();
            for ((p, t, id), v) in solver.rows.iter().zip(&via_matrix) {
                let w = df.part(*p).and_then(|c| c.component(t)).map_or(0.0, |c| c.get(*id));
                assert!((v - w).abs() < 1e-12, "degree {degree} row ({p},{t:?},{id})");
            }
        }
    }

    #[test]
    fn gauge_transform_keeps_cocycle_and_is_recovered() {
        let cover = octahedron_cover();
        let h = GerbeDatum::trivial(0, cover.clone()).unwrap();
        let mut rng = Lcg64::new(5);
        let f = GaugePotential::random(1, &cover, &mut rng, 0.5);
        let h2 = h.gauge_transform(&f).unwrap();
        assert!(validate_cocycle(&h2, VALIDATION_TOL).unwrap().passed);
        let eq = gauge_equivalent(&h, &h2, EQUIVALENCE_TOL).unwrap();
        assert!(eq.is_equivalent(), "residual {}", eq.residual);
        let back = gauge_equivalent(&h2, &h, EQUIVALENCE_TOL).unwrap();
        assert!(back.is_equivalent());
    }

    #[test]
    fn reflexive_with_zero_witness() {
        let cover = octahedron_cover();
        let h = GerbeDatum::trivial(0, cover).unwrap();
        let eq = gauge_equivalent(&h, &h, EQUIVALENCE_TOL).unwrap();
        assert_eq!(eq.residual, 0.0);
        assert!(eq.witness.unwrap().total().is_zero());
    }

    #[test]
    fn higher_shift_degree_is_checked() {
        let cover = octahedron_cover();
        let h = GerbeDatum::trivial(0, cover).unwrap();
        assert!(higher_gauge_shift(&h, &TotalCochain::zero(2)).is_err());
    }
}
