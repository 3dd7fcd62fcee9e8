//! Concrete triangulations, covers and cocycles for the three worked examples.
//!
//! * S¹ as an `m`-gon with three arcs; the (-1)-gerbe `ln f_i = iθ`, `A = dθ`.
//! * S² as two cones over a two-ring band; the charge-one monopole bundle.
//! * S³ as the suspension of that S² thickened into three layers; the
//!   charge-one gerbe obtained by pulling the monopole back across the shell.
//!
//! The pole edges of the monopole's southern patch carry a zero connection, so
//! the curvature sits on the `m` southern polar triangles, `2π w/m` each.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bicomplex::{sort_with_sign, wrap, wrap_d, BigradedCochain, TotalCochain};
use crate::cover::Cover;
use crate::deligne::GerbeDatum;
use crate::error::{invalid, Result};
use crate::simplicial::{exterior_derivative, Cochain, SimplicialComplex};

/// Smallest admissible resolution.
pub const MIN_RESOLUTION: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    MinusOneGerbe,
    Monopole,
    Gerbopole,
}

impl Example {
    pub fn level(self) -> i32 {
        match self {
            Example::MinusOneGerbe => -1,
            Example::Monopole => 0,
            Example::Gerbopole => 1,
        }
    }
}

impl FromStr for Example {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minus1" => Ok(Example::MinusOneGerbe),
            "monopole" => Ok(Example::Monopole),
            "gerbopole" => Ok(Example::Gerbopole),
            other => Err(invalid(format!("unknown example {other:?} (expected minus1, monopole or gerbopole)"))),
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::MinusOneGerbe => "minus1",
            Example::Monopole => "monopole",
            Example::Gerbopole => "gerbopole",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExampleSpec {
    pub which: Example,
    pub resolution: usize,
    /// Winding number of the transition map; 1 reproduces the examples.
    pub winding: i32,
}

impl ExampleSpec {
    pub fn new(which: Example, resolution: usize) -> Self {
        Self { which, resolution, winding: 1 }
    }

    pub fn build(&self) -> Result<GerbeDatum> {
        match self.which {
            Example::MinusOneGerbe => build_minus_one_gerbe_with_winding(self.resolution, self.winding),
            Example::Monopole => build_monopole_with_winding(self.resolution, self.winding),
            Example::Gerbopole => build_gerbopole_with_winding(self.resolution, self.winding),
        }
    }
}

fn check_resolution(m: usize, winding: i32) -> Result<()> {
    if m < MIN_RESOLUTION {
        return Err(invalid(format!("resolution m = {m} is below the minimum {MIN_RESOLUTION}")));
    }
    // every wrapped increment 2π|w|/m must stay below π/2
    if 4 * winding.unsigned_abs() as usize >= m {
        return Err(invalid(format!(
            "resolution m = {m} is too coarse for winding {winding}: need m > {}",
            4 * winding.unsigned_abs()
        )));
    }
    Ok(())
}

fn vertex_cochain(complex: &SimplicialComplex, values: impl IntoIterator<Item = (usize, f64)>) -> Cochain {
    Cochain::from_values(0, values.into_iter().map(|(v, x)| (complex.id_of(&[v]).expect("vertex"), x)))
}

/// The (-1)-gerbe on S¹ with `ln f_i = iθ` and curvature `A = dθ`.
pub fn build_minus_one_gerbe(m: usize) -> Result<GerbeDatum> {
    build_minus_one_gerbe_with_winding(m, 1)
}

/// Circle as an `m`-gon with vertex `k` at `θ = 2π(k + 1/2)/m`, so that the arc
/// endpoints (multiples of π/3) fall strictly between vertices. The arcs are
/// `]0, π[`, `]2π/3, 5π/3[` and `]4π/3, 7π/3[`; each patch uses the lift of θ
/// lying in its own interval.
pub fn build_minus_one_gerbe_with_winding(m: usize, winding: i32) -> Result<GerbeDatum> {
    check_resolution(m, winding)?;
    if !m.is_multiple_of(6) {
        return Err(invalid(format!("the circle resolution must be divisible by 6, got {m}")));
    }
    let complex = Arc::new(SimplicialComplex::from_top_simplices(m, (0..m).map(|k| vec![k, (k + 1) % m]))?);
    // positions in units of π/m: vertex k sits at 2k+1; arcs in the same units
    let m_i = m as i64;
    let arcs = [(0, m_i), (2 * m_i / 3, 5 * m_i / 3), (4 * m_i / 3, 7 * m_i / 3)];
    let lift = |k: usize, (lo, hi): (i64, i64)| -> Option<i64> {
        let x = 2 * k as i64 + 1;
        [x, x + 2 * m_i].into_iter().find(|&y| lo < y && y < hi)
    };
    let sets: Vec<Vec<usize>> = arcs.iter().map(|&arc| (0..m).filter(|&k| lift(k, arc).is_some()).collect()).collect();
    let cover = Arc::new(Cover::new(complex.clone(), sets)?);

    let w = winding as f64;
    let mut transition = BigradedCochain::zero(0, 1).angle_valued();
    for (i, &arc) in arcs.iter().enumerate() {
        let values = (0..m).filter_map(|k| lift(k, arc).map(|y| (k, w * y as f64 * PI / m as f64)));
        transition.insert(&[i], vertex_cochain(&complex, values))?;
    }
    let theta = vertex_cochain(&complex, (0..m).map(|k| (k, w * TAU * (k as f64 + 0.5) / m as f64)));
    let a = wrap_d(&theta, cover.overlap(&[])?, &complex)?;
    let mut top = BigradedCochain::zero(1, 0);
    top.insert(&[], a.scaled(-1.0))?;

    let mut data = TotalCochain::zero(1).with_angle_layer();
    data.set_part(transition)?;
    data.set_part(top)?;
    GerbeDatum::new(-1, data, cover)
}

/// Two-cone triangulation of S² used by the monopole and, layered, by the gerbe on S³.
///
/// Vertex ids: south pole 0, lower ring `1..=m`, upper ring `m+1..=2m`, north
/// pole `2m+1`. Ring position `k` has longitude `2πk/m`.
#[derive(Clone, Debug)]
pub struct TwoConeSphere {
    pub m: usize,
    pub complex: Arc<SimplicialComplex>,
}

impl TwoConeSphere {
    pub fn new(m: usize) -> Result<Self> {
        let south = 0;
        let north = 2 * m + 1;
        let lower = |k: usize| 1 + k % m;
        let upper = |k: usize| 1 + m + k % m;
        let mut tris = Vec::with_capacity(4 * m);
        for k in 0..m {
            tris.push(vec![south, lower(k), lower(k + 1)]);
            tris.push(vec![lower(k), lower(k + 1), upper(k + 1)]);
            tris.push(vec![lower(k), upper(k), upper(k + 1)]);
            tris.push(vec![upper(k), upper(k + 1), north]);
        }
        let complex = Arc::new(SimplicialComplex::from_top_simplices(2 * m + 2, tris)?);
        Ok(Self { m, complex })
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.m + 2
    }

    pub fn south(&self) -> usize {
        0
    }

    pub fn north(&self) -> usize {
        2 * self.m + 1
    }

    pub fn band(&self) -> impl Iterator<Item = usize> {
        1..=2 * self.m
    }

    /// Northern cap with the band.
    pub fn north_patch(&self) -> Vec<usize> {
        self.band().chain([self.north()]).collect()
    }

    /// Southern cap with the band.
    pub fn south_patch(&self) -> Vec<usize> {
        std::iter::once(self.south()).chain(self.band()).collect()
    }

    /// Longitude of a band vertex.
    pub fn longitude(&self, v: usize) -> f64 {
        TAU * ((v - 1) % self.m) as f64 / self.m as f64
    }

    /// Southern-patch connection: wrapped increments of `w · longitude` on
    /// band edges, zero on the edges at the south pole.
    pub fn south_connection(&self, winding: i32) -> Result<Cochain> {
        let w = winding as f64;
        let mut a = Cochain::zero(1);
        for (id, e) in self.complex.simplices(1).iter().enumerate() {
            if e[0] == self.south() {
                a.set(id, 0.0);
            } else if e[1] != self.north() {
                a.set(id, wrap(w * self.longitude(e[1]) - w * self.longitude(e[0]))?);
            }
        }
        Ok(a)
    }

    /// Monopole curvature: `d` of the southern connection on the polar triangles.
    pub fn curvature(&self, winding: i32) -> Result<Cochain> {
        let south = self.south();
        let complex = &self.complex;
        Ok(exterior_derivative(&self.south_connection(winding)?, complex)?
            .restricted(|id| complex.simplex(2, id)[0] == south))
    }
}

/// The monopole bundle on S² with winding-one transition function.
pub fn build_monopole(m: usize) -> Result<GerbeDatum> {
    build_monopole_with_winding(m, 1)
}

/// Cover: `U₁` = northern cap ∪ band, `U₂` = southern cap ∪ band, overlapping in
/// the band. `ln g₁₂ = i w·longitude`, `A₁ = 0`, `A₂` from wrapped increments.
pub fn build_monopole_with_winding(m: usize, winding: i32) -> Result<GerbeDatum> {
    check_resolution(m, winding)?;
    let sphere = TwoConeSphere::new(m)?;
    let complex = sphere.complex.clone();
    let cover = Arc::new(Cover::new(complex.clone(), vec![sphere.north_patch(), sphere.south_patch()])?);
    let w = winding as f64;

    let mut transition = BigradedCochain::zero(0, 2).angle_valued();
    transition.insert(&[0, 1], vertex_cochain(&complex, sphere.band().map(|v| (v, w * sphere.longitude(v)))))?;

    let mut connection = BigradedCochain::zero(1, 1);
    connection.insert(&[1], sphere.south_connection(winding)?)?;

    let mut top = BigradedCochain::zero(2, 0);
    top.insert(&[], sphere.curvature(winding)?.scaled(-1.0))?;

    let mut data = TotalCochain::zero(2).with_angle_layer();
    data.set_part(transition)?;
    data.set_part(connection)?;
    data.set_part(top)?;
    GerbeDatum::new(0, data, cover)
}

/// Layered S³: cone point `Q` (id 0) over layer 0, layers 0, 1, 2 each a copy
/// of [`TwoConeSphere`], prisms between consecutive layers, and cone point `P`
/// (last id) over layer 2. The shell between layers 0 and 1 is `S² × [0,1]`.
#[derive(Clone, Debug)]
pub struct LayeredSphere3 {
    pub sphere: TwoConeSphere,
    pub complex: Arc<SimplicialComplex>,
}

const LAYERS: usize = 3;
// Upper boundary of the shell; the equatorial S² of the gerbe.
const SLICE_LAYER: usize = 1;

impl LayeredSphere3 {
    pub fn new(m: usize) -> Result<Self> {
        let sphere = TwoConeSphere::new(m)?;
        let nv = sphere.vertex_count();
        let at = |layer: usize, v: usize| 1 + layer * nv + v;
        let q = 0;
        let p = 1 + LAYERS * nv;
        let mut tets = Vec::new();
        for tri in sphere.complex.simplices(2) {
            tets.push(vec![q, at(0, tri[0]), at(0, tri[1]), at(0, tri[2])]);
            tets.push(vec![at(LAYERS - 1, tri[0]), at(LAYERS - 1, tri[1]), at(LAYERS - 1, tri[2]), p]);
            for layer in 0..LAYERS - 1 {
                // staircase triangulation of the prism over an ordered triangle
                let lo = |i: usize| at(layer, tri[i]);
                let hi = |i: usize| at(layer + 1, tri[i]);
                tets.push(vec![lo(0), lo(1), lo(2), hi(2)]);
                tets.push(vec![lo(0), lo(1), hi(1), hi(2)]);
                tets.push(vec![lo(0), hi(0), hi(1), hi(2)]);
            }
        }
        let complex = Arc::new(SimplicialComplex::from_top_simplices(p + 1, tets)?);
        Ok(Self { sphere, complex })
    }

    /// Id of vertex `v` of the base sphere in the given layer.
    pub fn at(&self, layer: usize, v: usize) -> usize {
        1 + layer * self.sphere.vertex_count() + v
    }

    pub fn bottom_apex(&self) -> usize {
        0
    }

    pub fn top_apex(&self) -> usize {
        1 + LAYERS * self.sphere.vertex_count()
    }

    /// Base-sphere vertex under a layer vertex; `None` for the apexes.
    pub fn project(&self, v: usize) -> Option<usize> {
        let nv = self.sphere.vertex_count();
        (v >= 1 && v < self.top_apex()).then(|| (v - 1) % nv)
    }

    /// Pulls a base-sphere cochain back along the layer projection onto the
    /// listed simplices. Simplices collapsing under the projection get zero.
    pub fn pull_back(&self, c: &Cochain, ids: &[usize]) -> Result<Cochain> {
        let q = c.degree();
        let mut out = Cochain::zero(q);
        for &id in ids {
            let s = self.complex.simplex(q, id);
            let Some(base) = s.iter().map(|&v| self.project(v)).collect::<Option<Vec<_>>>() else {
                return Err(invalid(format!("cannot pull back onto {s:?}, it touches an apex")));
            };
            let value = match sort_with_sign(&base) {
                Some((sorted, sign)) => {
                    let bid = self
                        .sphere
                        .complex
                        .id_of(&sorted)
                        .ok_or_else(|| invalid(format!("{sorted:?} is not a simplex of the base sphere")))?;
                    sign * c.get(bid)
                }
                None => 0.0,
            };
            out.set(id, value);
        }
        Ok(out)
    }
}

/// The charge-one gerbe on S³.
pub fn build_gerbopole(m: usize) -> Result<GerbeDatum> {
    build_gerbopole_with_winding(m, 1)
}

/// Cover of the layered S³:
///
/// * `U₁` = layers 0–2 over the monopole's northern patch ∪ `P`,
/// * `U₂` = layers 0–2 over the monopole's southern patch ∪ `P`,
/// * `U₃` = `Q` ∪ layers 0–1 (the lower half plus the shell).
///
/// So `U₁₃`, `U₂₃` are the monopole patches times an interval and `U₁₂₃` is the
/// band times an interval. Data: `ln g₁₃₂ = i w·longitude`, `A₁₂ = 0`,
/// `A₁₃ = A₁ = 0`, `A₂₃ = A₂` (pulled back), `F₁ = F₂ = 0`, `F₃` = the pulled
/// back monopole curvature (zero on the cone over layer 0), `G = dF₃` on `U₃`.
pub fn build_gerbopole_with_winding(m: usize, winding: i32) -> Result<GerbeDatum> {
    check_resolution(m, winding)?;
    let s3 = LayeredSphere3::new(m)?;
    let complex = s3.complex.clone();
    let sphere = &s3.sphere;
    let over = |patch: Vec<usize>, layers: std::ops::Range<usize>| -> Vec<usize> {
        let s3 = &s3;
        layers.flat_map(|l| patch.iter().map(move |&v| s3.at(l, v))).collect()
    };
    let mut u1 = over(sphere.north_patch(), 0..LAYERS);
    u1.push(s3.top_apex());
    let mut u2 = over(sphere.south_patch(), 0..LAYERS);
    u2.push(s3.top_apex());
    let all: Vec<usize> = (0..sphere.vertex_count()).collect();
    let mut u3 = over(all, 0..SLICE_LAYER + 1);
    u3.push(s3.bottom_apex());
    let cover = Arc::new(Cover::new(complex.clone(), vec![u1, u2, u3])?);
    let w = winding as f64;

    let mut transition = BigradedCochain::zero(0, 3).angle_valued();
    let triple = cover.overlap(&[0, 1, 2])?;
    let g132 = vertex_cochain(
        &complex,
        triple.vertices().iter().map(|&v| (v, w * sphere.longitude(s3.project(v).expect("layer vertex")))),
    );
    transition.insert(&[0, 2, 1], g132)?;

    let mut connection = BigradedCochain::zero(1, 2);
    let u23 = cover.overlap(&[1, 2])?;
    connection.insert(&[1, 2], s3.pull_back(&sphere.south_connection(winding)?, u23.simplices(1))?)?;

    let u3_view = cover.overlap(&[2])?;
    let apex = s3.bottom_apex();
    let shell_triangles: Vec<usize> =
        u3_view.simplices(2).iter().copied().filter(|&id| !complex.simplex(2, id).contains(&apex)).collect();
    let f3 = s3.pull_back(&sphere.curvature(winding)?, &shell_triangles)?;
    let g = exterior_derivative(&f3, &complex)?.restricted(|id| u3_view.contains(3, id));
    let mut two_forms = BigradedCochain::zero(2, 1);
    two_forms.insert(&[2], f3)?;

    let mut top = BigradedCochain::zero(3, 0);
    top.insert(&[], g.scaled(-1.0))?;

    let mut data = TotalCochain::zero(3).with_angle_layer();
    data.set_part(transition)?;
    data.set_part(connection)?;
    data.set_part(two_forms)?;
    data.set_part(top)?;
    GerbeDatum::new(1, data, cover)
}

/// Restricts a gerbe built by [`build_gerbopole_with_winding`] to the copy of S²
/// in layer 1, the outer face of the shell inside `U₃`, and reads off a bundle on the monopole's
/// cover: `ln g_{ij} = ln g_{i3j}`, `A_i = A_{i3}`, `F = F₃`.
///
/// This is a bundle cocycle whenever `A₁₂` vanishes on the slice, as it does here.
pub fn equatorial_bundle(gerbe: &GerbeDatum, m: usize) -> Result<GerbeDatum> {
    let s3 = LayeredSphere3::new(m)?;
    if gerbe.level() != 1 || *gerbe.cover().complex() != *s3.complex || gerbe.cover().len() != 3 {
        return Err(invalid("expected a gerbe on the layered S³ with three patches"));
    }
    let sphere = &s3.sphere;
    let base = &sphere.complex;
    let cover = Arc::new(Cover::new(base.clone(), vec![sphere.north_patch(), sphere.south_patch()])?);
    let big = &s3.complex;
    let layer = SLICE_LAYER;
    let lift = |q: usize, id: usize| -> usize {
        let s: Vec<usize> = base.simplex(q, id).iter().map(|&v| s3.at(layer, v)).collect();
        big.id_of(&s).expect("layer simplices exist")
    };
    let slice = |part: Option<&BigradedCochain>, tuple: &[usize], q: usize, ids: &[usize]| -> Result<Cochain> {
        let mut c = Cochain::zero(q);
        if let Some(part) = part {
            for &id in ids {
                c.set(id, part.value_at(tuple, lift(q, id))?);
            }
        }
        Ok(c)
    };

    let mut transition = BigradedCochain::zero(0, 2).angle_valued();
    let band = cover.overlap(&[0, 1])?;
    let band_vertices: Vec<usize> = band.simplices(0).to_vec();
    transition.insert(&[0, 1], slice(gerbe.part(0), &[0, 2, 1], 0, &band_vertices)?)?;

    let mut connection = BigradedCochain::zero(1, 1);
    for i in 0..2 {
        let edges = cover.overlap(&[i])?.simplices(1).to_vec();
        connection.insert(&[i], slice(gerbe.part(1), &[i, 2], 1, &edges)?)?;
    }

    let triangles: Vec<usize> = (0..base.count(2)).collect();
    let f = slice(gerbe.part(2), &[2], 2, &triangles)?;
    let mut top = BigradedCochain::zero(2, 0);
    top.insert(&[], f.scaled(-1.0))?;

    let mut data = TotalCochain::zero(2).with_angle_layer();
    data.set_part(transition)?;
    data.set_part(connection)?;
    data.set_part(top)?;
    GerbeDatum::new(0, data, cover)
}
