//! Oriented simplicial complexes, cochains, chains and the simplicial coboundary.
//!
//! Every simplex is a strictly increasing list of vertex ids and is oriented by
//! that order. Removing the vertex at position `i` gives a face with incidence
//! sign `(-1)^i`; all boundary and coboundary signs derive from this rule.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{invalid, Error, Result};
use crate::linalg;

/// Oriented simplicial complex with precomputed incidence data.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    // faces[q][id]: the q+1 faces of a q-simplex (q >= 1) with incidence signs.
    faces: Vec<Vec<Vec<(usize, i8)>>>,
    // cofaces[q][id]: the (q+1)-simplices having this q-simplex as a face.
    cofaces: Vec<Vec<Vec<(usize, i8)>>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.simplices == other.simplices
    }
}

impl SimplicialComplex {
    /// Builds a complex from explicit per-dimension simplex lists. Simplex ids
    /// are positions in these lists.
    pub fn new(vertex_count: usize, simplices: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if simplices.is_empty() || simplices.last().is_some_and(|top| top.is_empty()) {
            return Err(invalid("complex must list at least one simplex in its top dimension"));
        }
        let mut lookup = Vec::with_capacity(simplices.len());
        for (q, list) in simplices.iter().enumerate() {
            let mut map = HashMap::with_capacity(list.len());
            for (id, s) in list.iter().enumerate() {
                if s.len() != q + 1 {
                    return Err(invalid(format!("simplex {s:?} listed in dimension {q}")));
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid(format!("simplex {s:?} is not strictly increasing")));
                }
                if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                    return Err(invalid(format!("vertex {v} out of range in {s:?}")));
                }
                if map.insert(s.clone(), id).is_some() {
                    return Err(invalid(format!("duplicate simplex {s:?}")));
                }
            }
            lookup.push(map);
        }
        if simplices[0].len() != vertex_count {
            return Err(invalid(format!(
                "expected {vertex_count} vertices in dimension 0, found {}",
                simplices[0].len()
            )));
        }

        let top = simplices.len() - 1;
        let mut faces = vec![Vec::new(); top + 1];
        let mut cofaces: Vec<Vec<Vec<(usize, i8)>>> = simplices.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for q in 1..=top {
            let mut per_dim = Vec::with_capacity(simplices[q].len());
            for (id, s) in simplices[q].iter().enumerate() {
                let mut fs = Vec::with_capacity(q + 1);
                for i in 0..=q {
                    let face = remove_at(s, i);
                    let Some(&fid) = lookup[q - 1].get(&face) else {
                        return Err(invalid(format!("face {face:?} of {s:?} is not listed")));
                    };
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    fs.push((fid, sign));
                    cofaces[q - 1][fid].push((id, sign));
                }
                per_dim.push(fs);
            }
            faces[q] = per_dim;
        }
        Ok(Self { vertex_count, simplices, lookup, faces, cofaces })
    }

    /// Builds the closure of the given simplices. Vertex order inside each input
    /// simplex is irrelevant; each dimension is sorted lexicographically.
    pub fn from_top_simplices<I>(vertex_count: usize, tops: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut by_dim: Vec<std::collections::BTreeSet<Vec<usize>>> = Vec::new();
        for mut s in tops {
            s.sort_unstable();
            if s.is_empty() || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("degenerate simplex {s:?}")));
            }
            close_under_faces(s, &mut by_dim);
        }
        for v in 0..vertex_count {
            close_under_faces(vec![v], &mut by_dim);
        }
        Self::new(vertex_count, by_dim.into_iter().map(|d| d.into_iter().collect()).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn top_dimension(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Number of `q`-simplices; zero above the top dimension.
    pub fn count(&self, q: usize) -> usize {
        self.simplices.get(q).map_or(0, Vec::len)
    }

    pub fn simplices(&self, q: usize) -> &[Vec<usize>] {
        self.simplices.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn simplex(&self, q: usize, id: usize) -> &[usize] {
        &self.simplices[q][id]
    }

    /// Id of a simplex given by its (strictly increasing) vertex list.
    pub fn id_of(&self, vertices: &[usize]) -> Option<usize> {
        let q = vertices.len().checked_sub(1)?;
        self.lookup.get(q)?.get(vertices).copied()
    }

    /// Faces of a `q`-simplex (q >= 1) with incidence signs.
    pub fn faces(&self, q: usize, id: usize) -> &[(usize, i8)] {
        &self.faces[q][id]
    }

    /// Cofaces of a `q`-simplex with incidence signs.
    pub fn cofaces(&self, q: usize, id: usize) -> &[(usize, i8)] {
        self.cofaces.get(q).and_then(|c| c.get(id)).map_or(&[], Vec::as_slice)
    }

    /// Betti numbers `b_0..=b_top` of the subcomplex made of the listed simplex
    /// ids (`support[q]` holds `q`-simplex ids and must be closed under faces).
    /// Ranks are exact over the rationals.
    pub fn betti_numbers(&self, support: &[Vec<usize>]) -> Vec<usize> {
        let dims = support.len();
        let local: Vec<HashMap<usize, usize>> =
            support.iter().map(|ids| ids.iter().enumerate().map(|(i, &id)| (id, i)).collect()).collect();
        // ranks[q] = rank of the boundary map C_q -> C_{q-1}
        let mut ranks = vec![0usize; dims + 1];
        for q in 1..dims {
            let mut entries = Vec::new();
            for (col, &id) in support[q].iter().enumerate() {
                for &(fid, sign) in self.faces(q, id) {
                    if let Some(&row) = local[q - 1].get(&fid) {
                        entries.push((row, col, sign as i64));
                    }
                }
            }
            ranks[q] = linalg::integer_rank(support[q - 1].len(), support[q].len(), &entries);
        }
        (0..dims).map(|q| support[q].len() - ranks[q] - ranks[q + 1]).collect()
    }

    fn check_id(&self, q: usize, id: usize) -> Result<()> {
        if id < self.count(q) {
            Ok(())
        } else {
            Err(invalid(format!("unknown {q}-simplex id {id}")))
        }
    }
}

fn remove_at(s: &[usize], i: usize) -> Vec<usize> {
    let mut face = Vec::with_capacity(s.len() - 1);
    face.extend_from_slice(&s[..i]);
    face.extend_from_slice(&s[i + 1..]);
    face
}

fn close_under_faces(s: Vec<usize>, by_dim: &mut Vec<std::collections::BTreeSet<Vec<usize>>>) {
    let q = s.len() - 1;
    while by_dim.len() <= q {
        by_dim.push(Default::default());
    }
    if by_dim[q].contains(&s) {
        return;
    }
    if q > 0 {
        for i in 0..=q {
            close_under_faces(remove_at(&s, i), by_dim);
        }
    }
    by_dim[q].insert(s);
}

/// Real-valued cochain on the `degree`-simplices; absent keys are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cochain {
    degree: usize,
    values: BTreeMap<usize, f64>,
}

impl Cochain {
    pub fn zero(degree: usize) -> Self {
        Self { degree, values: BTreeMap::new() }
    }

    pub fn from_values<I: IntoIterator<Item = (usize, f64)>>(degree: usize, values: I) -> Self {
        Self { degree, values: values.into_iter().collect() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, id: usize) -> f64 {
        self.values.get(&id).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, id: usize) -> bool {
        self.values.contains_key(&id)
    }

    pub fn set(&mut self, id: usize, value: f64) {
        self.values.insert(id, value);
    }

    /// Adds `value` to the entry at `id`, creating it if needed.
    pub fn accumulate(&mut self, id: usize, value: f64) {
        *self.values.entry(id).or_insert(0.0) += value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + scale * other`.
    pub fn add_scaled(&mut self, other: &Cochain, scale: f64) {
        debug_assert_eq!(self.degree, other.degree);
        for (id, v) in other.iter() {
            self.accumulate(id, scale * v);
        }
    }

    pub fn scaled(&self, scale: f64) -> Cochain {
        Cochain { degree: self.degree, values: self.values.iter().map(|(&k, &v)| (k, scale * v)).collect() }
    }

    /// Keeps only the entries whose ids satisfy `keep`.
    pub fn restricted(&self, keep: impl Fn(usize) -> bool) -> Cochain {
        Cochain {
            degree: self.degree,
            values: self.values.iter().filter(|(&k, _)| keep(k)).map(|(&k, &v)| (k, v)).collect(),
        }
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Cochain {
        Cochain { degree: self.degree, values: self.values.iter().map(|(&k, &v)| (k, f(v))).collect() }
    }

    /// Fails if any key is not a simplex of `complex` at this degree.
    pub fn check_keys(&self, complex: &SimplicialComplex) -> Result<()> {
        for &id in self.values.keys() {
            complex.check_id(self.degree, id)?;
        }
        Ok(())
    }
}

/// Integer chain on the `degree`-simplices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    degree: usize,
    coefficients: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn from_coefficients<I: IntoIterator<Item = (usize, i64)>>(degree: usize, coeffs: I) -> Self {
        let mut coefficients = BTreeMap::new();
        for (id, c) in coeffs {
            *coefficients.entry(id).or_insert(0) += c;
        }
        coefficients.retain(|_, c| *c != 0);
        Self { degree, coefficients }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, id: usize) -> i64 {
        self.coefficients.get(&id).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Simplicial boundary; the boundary of a 0-chain is the empty chain.
    pub fn boundary(&self, complex: &SimplicialComplex) -> Result<Chain> {
        if self.degree == 0 {
            return Ok(Chain::default());
        }
        let mut terms = Vec::new();
        for (id, c) in self.iter() {
            complex.check_id(self.degree, id)?;
            for &(fid, sign) in complex.faces(self.degree, id) {
                terms.push((fid, c * sign as i64));
            }
        }
        Ok(Chain::from_coefficients(self.degree - 1, terms))
    }
}

/// Simplicial coboundary: `(dc)(s) = sum_i (-1)^i c(s without vertex i)`.
///
/// Cochains of top degree map to the (empty) zero cochain one degree up.
pub fn exterior_derivative(c: &Cochain, complex: &SimplicialComplex) -> Result<Cochain> {
    c.check_keys(complex)?;
    let q = c.degree;
    let mut out = Cochain::zero(q + 1);
    if q >= complex.top_dimension() {
        return Ok(out);
    }
    for (id, v) in c.iter() {
        for &(sid, sign) in complex.cofaces(q, id) {
            out.accumulate(sid, sign as f64 * v);
        }
    }
    Ok(out)
}

/// Pairing `sum_s z(s) c(s)` of a cochain with a chain of the same degree.
pub fn integrate(c: &Cochain, z: &Chain) -> Result<f64> {
    if c.degree != z.degree {
        return Err(invalid(format!(
            "cannot integrate a degree-{} cochain over a degree-{} chain",
            c.degree, z.degree
        )));
    }
    Ok(z.iter().map(|(id, k)| k as f64 * c.get(id)).sum())
}

/// Coherently oriented top-degree cycle of a closed, connected, orientable
/// pseudomanifold. The lowest-id top simplex gets coefficient `+1` and the
/// orientation is propagated across shared codimension-one faces.
pub fn fundamental_cycle(complex: &SimplicialComplex) -> Result<Chain> {
    let top = complex.top_dimension();
    if top == 0 {
        return Err(Error::Structural("a 0-dimensional complex has no fundamental cycle".into()));
    }
    for fid in 0..complex.count(top - 1) {
        let n = complex.cofaces(top - 1, fid).len();
        if n != 2 {
            return Err(Error::Structural(format!(
                "face {:?} lies in {n} top simplices, expected 2",
                complex.simplex(top - 1, fid)
            )));
        }
    }
    let count = complex.count(top);
    let mut coeff = vec![0i64; count];
    coeff[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(sid) = queue.pop_front() {
        let s = coeff[sid];
        for &(fid, e) in complex.faces(top, sid) {
            let &(other, e_other) = complex
                .cofaces(top - 1, fid)
                .iter()
                .find(|&&(t, _)| t != sid)
                .expect("manifold check guarantees two cofaces");
            // The two contributions to the shared face must cancel.
            let want = -s * e as i64 * e_other as i64;
            match coeff[other] {
                0 => {
                    coeff[other] = want;
                    queue.push_back(other);
                }
                c if c != want => {
                    return Err(Error::Structural("complex is not orientable".into()));
                }
                _ => {}
            }
        }
    }
    if coeff.contains(&0) {
        return Err(Error::Structural("complex is not connected".into()));
    }
    Ok(Chain::from_coefficients(top, coeff.into_iter().enumerate()))
}
