//! The Čech–de Rham double complex.
//!
//! `Λ^{p,n}` holds a `p`-cochain on every `n`-fold overlap of the cover (for
//! `n = 0`, one global cochain). Values of `iℝ` are stored by their imaginary
//! part, so a stored `φ` stands for `ln g = iφ`. The operators are
//!
//! * `δ : Λ^{p,n} → Λ^{p,n+1}`, `(δC)_{i_0..i_n} = Σ_α (-1)^α C_{i_0..î_α..i_n}`,
//! * `d̄ = (-1)^n d : Λ^{p,n} → Λ^{p+1,n}`,
//! * `D = δ - d̄` on the total complex `Λ^{(k)} = ⊕_{p+n=k} Λ^{p,n}`,
//!
//! so that `δ d̄ + d̄ δ = 0` and `D² = 0`. Components are stored on strictly
//! increasing index tuples; a permuted tuple reads as the sign of the
//! permutation times the stored value.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use crate::cover::{Cover, Overlap};
use crate::error::{invalid, Result};
use crate::rng::Lcg64;
use crate::simplicial::{exterior_derivative, Cochain, SimplicialComplex};

/// Reduces an angle to the principal branch `(-π, π]`.
pub fn wrap(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!("cannot wrap non-finite value {x}")));
    }
    Ok(wrap_finite(x))
}

pub(crate) fn wrap_finite(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Derivative of a circle-valued 0-cochain: `wrap(f(b) - f(a))` on every edge
/// `(a, b)` of `support`. Every vertex of the support needs a value.
pub fn wrap_d(f: &Cochain, support: &Overlap, complex: &SimplicialComplex) -> Result<Cochain> {
    if f.degree() != 0 {
        return Err(invalid(format!("wrap_d expects a 0-cochain, got degree {}", f.degree())));
    }
    let value = |v: usize| -> Result<f64> {
        let id = complex.id_of(&[v]).ok_or_else(|| invalid(format!("unknown vertex {v}")))?;
        if !f.contains(id) {
            return Err(invalid(format!("angle-valued cochain has no value at vertex {v}")));
        }
        Ok(f.get(id))
    };
    for &v in support.vertices() {
        value(v)?;
    }
    let mut out = Cochain::zero(1);
    for &eid in support.simplices(1) {
        let e = complex.simplex(1, eid);
        out.set(eid, wrap(value(e[1])? - value(e[0])?)?);
    }
    Ok(out)
}

/// Sign of the permutation sorting `indices`, together with the sorted tuple.
/// Returns `None` when an index repeats.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut inversions = 0usize;
    for i in 0..indices.len() {
        for j in (i + 1)..indices.len() {
            match indices[i].cmp(&indices[j]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    Some((sorted, if inversions.is_multiple_of(2) { 1.0 } else { -1.0 }))
}

/// An element of `Λ^{p,n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BigradedCochain {
    form_degree: usize,
    cech_degree: usize,
    components: BTreeMap<Vec<usize>, Cochain>,
    angle_valued: bool,
}

impl BigradedCochain {
    pub fn zero(form_degree: usize, cech_degree: usize) -> Self {
        Self { form_degree, cech_degree, components: BTreeMap::new(), angle_valued: false }
    }

    /// Marks the cochain as circle-valued (radians modulo 2π). Only `p = 0` may carry the flag.
    pub fn angle_valued(mut self) -> Self {
        assert_eq!(self.form_degree, 0, "only 0-forms can be angle-valued");
        self.angle_valued = true;
        self
    }

    pub fn form_degree(&self) -> usize {
        self.form_degree
    }

    pub fn cech_degree(&self) -> usize {
        self.cech_degree
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.form_degree, self.cech_degree)
    }

    pub fn is_angle_valued(&self) -> bool {
        self.angle_valued
    }

    /// Stores the component on the given tuple. A non-increasing tuple is
    /// sorted and the cochain multiplied by the permutation sign.
    pub fn insert(&mut self, indices: &[usize], cochain: Cochain) -> Result<()> {
        if indices.len() != self.cech_degree {
            return Err(invalid(format!(
                "tuple {indices:?} has {} indices, expected {}",
                indices.len(),
                self.cech_degree
            )));
        }
        if cochain.degree() != self.form_degree {
            return Err(invalid(format!(
                "component of degree {} in a form-degree-{} cochain",
                cochain.degree(),
                self.form_degree
            )));
        }
        let (sorted, sign) =
            sort_with_sign(indices).ok_or_else(|| invalid(format!("repeated index in {indices:?}")))?;
        let cochain = if sign < 0.0 { cochain.scaled(-1.0) } else { cochain };
        self.components.insert(sorted, cochain);
        Ok(())
    }

    /// Stored component on a strictly increasing tuple.
    pub fn component(&self, sorted: &[usize]) -> Option<&Cochain> {
        self.components.get(sorted)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Cochain)> {
        self.components.iter()
    }

    /// Value on a simplex for an arbitrarily ordered tuple: antisymmetric in the indices.
    pub fn value_at(&self, indices: &[usize], simplex: usize) -> Result<f64> {
        let (sorted, sign) =
            sort_with_sign(indices).ok_or_else(|| invalid(format!("repeated index in {indices:?}")))?;
        Ok(self.component(&sorted).map_or(0.0, |c| sign * c.get(simplex)))
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|c| c.sup_norm() == 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.components.values().fold(0.0, |m, c| m.max(c.sup_norm()))
    }

    /// `self + scale * other`, componentwise. The angle flag of `self` is kept.
    pub fn add_scaled(&mut self, other: &BigradedCochain, scale: f64) {
        debug_assert_eq!(self.bidegree(), other.bidegree());
        for (t, c) in &other.components {
            match self.components.get_mut(t) {
                Some(mine) => mine.add_scaled(c, scale),
                None => {
                    self.components.insert(t.clone(), c.scaled(scale));
                }
            }
        }
    }

    pub fn scaled(&self, scale: f64) -> Self {
        self.map_components(|_, c| c.scaled(scale))
    }

    pub(crate) fn map_components(&self, mut f: impl FnMut(&[usize], &Cochain) -> Cochain) -> Self {
        Self {
            form_degree: self.form_degree,
            cech_degree: self.cech_degree,
            components: self.components.iter().map(|(t, c)| (t.clone(), f(t, c))).collect(),
            angle_valued: self.angle_valued,
        }
    }

    /// Checks that every component sits on a nerve tuple and is supported in its overlap.
    pub fn check(&self, cover: &Cover) -> Result<()> {
        for (t, c) in &self.components {
            let overlap = cover.overlap(t)?;
            if overlap.is_empty() {
                return Err(invalid(format!("component on {t:?}, which has an empty overlap")));
            }
            c.check_keys(cover.complex())?;
            if let Some((id, _)) = c.iter().find(|&(id, _)| !overlap.contains(self.form_degree, id)) {
                return Err(invalid(format!(
                    "component on {t:?} has a value on {:?}, outside the overlap",
                    cover.complex().simplex(self.form_degree, id)
                )));
            }
        }
        Ok(())
    }

    /// Random values in `[-amplitude, amplitude)` on every simplex of every overlap.
    pub fn random(p: usize, n: usize, cover: &Cover, rng: &mut Lcg64, amplitude: f64) -> Self {
        let mut out = Self::zero(p, n);
        for t in cover.tuples(n) {
            let overlap = cover.overlap(&t).expect("nerve tuple");
            let c = Cochain::from_values(
                p,
                overlap.simplices(p).iter().map(|&id| (id, rng.uniform(-amplitude, amplitude))),
            );
            if !c.is_empty() {
                out.components.insert(t, c);
            }
        }
        out
    }
}

/// Čech coboundary with each summand restricted to the larger overlap.
pub fn cech_delta(c: &BigradedCochain, cover: &Cover) -> Result<BigradedCochain> {
    c.check(cover)?;
    let (p, n) = c.bidegree();
    let mut out = BigradedCochain::zero(p, n + 1);
    out.angle_valued = c.angle_valued;
    for t in cover.tuples(n + 1) {
        let overlap = cover.overlap(&t)?;
        let mut acc = Cochain::zero(p);
        let mut touched = false;
        for alpha in 0..=n {
            let mut face = t.clone();
            face.remove(alpha);
            let Some(comp) = c.component(&face) else { continue };
            let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
            for (id, v) in comp.iter() {
                if overlap.contains(p, id) {
                    acc.accumulate(id, sign * v);
                    touched = true;
                }
            }
        }
        if touched {
            out.components.insert(t, acc);
        }
    }
    Ok(out)
}

/// Sign rule used by `d̄`. Only [`DbarSign::Alternating`] yields a double complex;
/// the other variant exists to exercise failure reporting.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DbarSign {
    /// `d̄ = (-1)^n d`
    #[default]
    Alternating,
    /// `d̄ = d` (breaks anticommutation with `δ`)
    Unsigned,
}

/// `d̄ = (-1)^n d`, applied componentwise inside each overlap. Angle-valued
/// input is differentiated with [`wrap_d`]; the output is ordinary real-valued.
pub fn dbar(c: &BigradedCochain, cover: &Cover) -> Result<BigradedCochain> {
    dbar_with(c, cover, DbarSign::Alternating)
}

#[doc(hidden)]
pub fn dbar_with(c: &BigradedCochain, cover: &Cover, rule: DbarSign) -> Result<BigradedCochain> {
    c.check(cover)?;
    let (p, n) = c.bidegree();
    let complex = cover.complex();
    let sign = match rule {
        DbarSign::Alternating if n % 2 == 1 => -1.0,
        _ => 1.0,
    };
    let mut out = BigradedCochain::zero(p + 1, n);
    for (t, comp) in &c.components {
        let overlap = cover.overlap(t)?;
        let d = if c.angle_valued {
            wrap_d(comp, overlap, complex)?
        } else {
            exterior_derivative(comp, complex)?.restricted(|id| overlap.contains(p + 1, id))
        };
        if !d.is_empty() {
            out.components.insert(t.clone(), d.scaled(sign));
        }
    }
    Ok(out)
}

/// Element of `Λ^{(k)} = ⊕_{p+n=k} Λ^{p,n}`, one part per form degree `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalCochain {
    degree: usize,
    parts: BTreeMap<usize, BigradedCochain>,
    angle_layer: bool,
}

impl TotalCochain {
    pub fn zero(degree: usize) -> Self {
        Self { degree, parts: BTreeMap::new(), angle_layer: false }
    }

    /// Declares the `(0, k)` part to be circle-valued.
    pub fn with_angle_layer(mut self) -> Self {
        self.angle_layer = true;
        if let Some(part) = self.parts.get_mut(&0) {
            part.angle_valued = true;
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn has_angle_layer(&self) -> bool {
        self.angle_layer
    }

    /// Bidegree of the angle-valued part, if any.
    pub fn angle_part(&self) -> Option<(usize, usize)> {
        self.angle_layer.then_some((0, self.degree))
    }

    /// Part of form degree `p` (Čech degree `k - p`).
    pub fn part(&self, p: usize) -> Option<&BigradedCochain> {
        self.parts.get(&p)
    }

    pub fn parts(&self) -> impl Iterator<Item = &BigradedCochain> {
        self.parts.values()
    }

    /// Inserts or replaces a part; the angle flag follows the total cochain's convention.
    pub fn set_part(&mut self, mut part: BigradedCochain) -> Result<()> {
        let (p, n) = part.bidegree();
        if p + n != self.degree {
            return Err(invalid(format!("part ({p},{n}) does not have total degree {}", self.degree)));
        }
        if part.angle_valued && !(p == 0 && self.angle_layer) {
            return Err(invalid(format!("part ({p},{n}) cannot be angle-valued here")));
        }
        part.angle_valued = p == 0 && self.angle_layer;
        self.parts.insert(p, part);
        Ok(())
    }

    pub fn remove_part(&mut self, p: usize) -> Option<BigradedCochain> {
        self.parts.remove(&p)
    }

    fn accumulate_part(&mut self, part: BigradedCochain, scale: f64) {
        let p = part.form_degree;
        match self.parts.get_mut(&p) {
            Some(mine) => mine.add_scaled(&part, scale),
            None => {
                let mut part = if scale == 1.0 { part } else { part.scaled(scale) };
                part.angle_valued = p == 0 && self.angle_layer;
                self.parts.insert(p, part);
            }
        }
    }

    /// `self + scale * other`; the angle convention of `self` is kept.
    pub fn add_scaled(&mut self, other: &TotalCochain, scale: f64) -> Result<()> {
        if other.degree != self.degree {
            return Err(invalid(format!("cannot add degree {} to degree {}", other.degree, self.degree)));
        }
        for part in other.parts.values() {
            self.accumulate_part(part.clone(), scale);
        }
        Ok(())
    }

    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            degree: self.degree,
            parts: self.parts.iter().map(|(&p, c)| (p, c.scaled(scale))).collect(),
            angle_layer: self.angle_layer,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.parts.values().fold(0.0, |m, c| m.max(c.sup_norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(BigradedCochain::is_zero)
    }

    pub fn check(&self, cover: &Cover) -> Result<()> {
        for part in self.parts.values() {
            part.check(cover)?;
        }
        Ok(())
    }

    /// Random real values on every bidegree `(p, k - p)` with `p <= top`, skipping
    /// form degrees listed in `skip`.
    pub fn random(degree: usize, cover: &Cover, rng: &mut Lcg64, amplitude: f64, skip: &[usize]) -> Self {
        let mut out = Self::zero(degree);
        let top = cover.complex().top_dimension();
        for p in 0..=degree.min(top) {
            if skip.contains(&p) {
                continue;
            }
            let part = BigradedCochain::random(p, degree - p, cover, rng, amplitude);
            out.parts.insert(p, part);
        }
        out
    }
}

/// Total differential `D = δ - d̄`.
pub fn big_d(h: &TotalCochain, cover: &Cover) -> Result<TotalCochain> {
    big_d_with(h, cover, DbarSign::Alternating)
}

#[doc(hidden)]
pub fn big_d_with(h: &TotalCochain, cover: &Cover, rule: DbarSign) -> Result<TotalCochain> {
    let top = cover.complex().top_dimension();
    let mut out = TotalCochain::zero(h.degree + 1);
    out.angle_layer = h.angle_layer;
    for part in h.parts.values() {
        out.accumulate_part(cech_delta(part, cover)?, 1.0);
        if part.form_degree < top {
            out.accumulate_part(dbar_with(part, cover, rule)?, -1.0);
        }
    }
    Ok(out)
}

/// Element of `Λ₀^{(j)}`: a total cochain of degree `j` without its global
/// top-form part `(j, 0)`. Witnesses gauge equivalence.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePotential(TotalCochain);

impl GaugePotential {
    pub fn new(total: TotalCochain) -> Result<Self> {
        if total.part(total.degree).is_some_and(|p| !p.components.is_empty()) {
            return Err(invalid(format!("a gauge potential has no ({0},0) part (degree {0})", total.degree)));
        }
        if total.angle_layer {
            return Err(invalid("a gauge potential is real-valued"));
        }
        let mut total = total;
        total.parts.remove(&total.degree);
        Ok(Self(total))
    }

    pub fn zero(degree: usize) -> Self {
        Self(TotalCochain::zero(degree))
    }

    pub fn random(degree: usize, cover: &Cover, rng: &mut Lcg64, amplitude: f64) -> Self {
        Self(TotalCochain::random(degree, cover, rng, amplitude, &[degree]))
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn total(&self) -> &TotalCochain {
        &self.0
    }

    pub fn into_total(self) -> TotalCochain {
        self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.scaled(-1.0))
    }
}
