//! JSON interchange format for complexes, covers, gerbe data and gauge witnesses.
//!
//! Floats are written as shortest round-trip decimals, so reading a written
//! datum reproduces it bit for bit.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bicomplex::{BigradedCochain, GaugePotential, TotalCochain};
use crate::cover::Cover;
use crate::deligne::GerbeDatum;
use crate::error::{Error, Result};
use crate::simplicial::{Cochain, SimplicialComplex};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatumFile {
    format_version: u32,
    complex: ComplexJson,
    cover: CoverJson,
    datum: DatumJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    vertex_count: usize,
    simplices: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverJson {
    sets: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatumJson {
    level: i32,
    parts: Vec<PartJson>,
    angle_part: [usize; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFile {
    format_version: u32,
    witness: WitnessJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessJson {
    degree: usize,
    parts: Vec<PartJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartJson {
    p: usize,
    n: usize,
    components: Vec<ComponentJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentJson {
    indices: Vec<usize>,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    simplex: Vec<usize>,
    value: f64,
}

fn parse_error(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn complex_to_json(k: &SimplicialComplex) -> ComplexJson {
    let simplices = (0..=k.top_dimension()).map(|q| (q.to_string(), k.simplices(q).to_vec())).collect();
    ComplexJson { vertex_count: k.vertex_count(), simplices }
}

fn complex_from_json(c: ComplexJson) -> Result<SimplicialComplex> {
    let mut by_dim = BTreeMap::new();
    for (key, list) in c.simplices {
        let q: usize = key.parse().map_err(|_| {
            parse_error("complex.simplices", format!("dimension key {key:?} is not a non-negative integer"))
        })?;
        by_dim.insert(q, list);
    }
    let top = by_dim.keys().next_back().copied().unwrap_or(0);
    let mut lists = Vec::with_capacity(top + 1);
    for q in 0..=top {
        lists.push(
            by_dim.remove(&q).ok_or_else(|| parse_error("complex.simplices", format!("dimension {q} is missing")))?,
        );
    }
    SimplicialComplex::new(c.vertex_count, lists).map_err(|e| parse_error("complex", e))
}

fn parts_to_json<'a>(parts: impl Iterator<Item = &'a BigradedCochain>, k: &SimplicialComplex) -> Vec<PartJson> {
    parts
        .map(|part| {
            let (p, n) = part.bidegree();
            let components = part
                .components()
                .map(|(indices, c)| ComponentJson {
                    indices: indices.clone(),
                    entries: c
                        .iter()
                        .map(|(id, value)| EntryJson { simplex: k.simplex(p, id).to_vec(), value })
                        .collect(),
                })
                .collect();
            PartJson { p, n, components }
        })
        .collect()
}

fn parts_from_json(degree: usize, parts: Vec<PartJson>, k: &SimplicialComplex, path: &str) -> Result<TotalCochain> {
    let mut total = TotalCochain::zero(degree);
    for (i, pj) in parts.into_iter().enumerate() {
        let here = format!("{path}.parts[{i}]");
        if pj.p + pj.n != degree {
            return Err(parse_error(
                &here,
                format!("bidegree ({},{}) does not have total degree {degree}", pj.p, pj.n),
            ));
        }
        if total.part(pj.p).is_some() {
            return Err(parse_error(&here, format!("duplicate part ({},{})", pj.p, pj.n)));
        }
        let mut part = BigradedCochain::zero(pj.p, pj.n);
        for (j, cj) in pj.components.into_iter().enumerate() {
            let here = format!("{here}.components[{j}]");
            if cj.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_error(&here, format!("indices {:?} are not strictly increasing", cj.indices)));
            }
            if part.component(&cj.indices).is_some() {
                return Err(parse_error(&here, format!("duplicate component {:?}", cj.indices)));
            }
            let mut c = Cochain::zero(pj.p);
            for (e, ej) in cj.entries.into_iter().enumerate() {
                let id = k.id_of(&ej.simplex).filter(|_| ej.simplex.len() == pj.p + 1).ok_or_else(|| {
                    parse_error(&format!("{here}.entries[{e}]"), format!("{:?} is not a {}-simplex", ej.simplex, pj.p))
                })?;
                if c.contains(id) {
                    return Err(parse_error(
                        &format!("{here}.entries[{e}]"),
                        format!("duplicate simplex {:?}", ej.simplex),
                    ));
                }
                c.set(id, ej.value);
            }
            part.insert(&cj.indices, c).map_err(|e| parse_error(&here, e))?;
        }
        total.set_part(part).map_err(|e| parse_error(&here, e))?;
    }
    Ok(total)
}

/// Serializes a datum together with its complex and cover.
pub fn datum_to_string(h: &GerbeDatum) -> String {
    let cover = h.cover();
    let k = cover.complex();
    let file = DatumFile {
        format_version: FORMAT_VERSION,
        complex: complex_to_json(k),
        cover: CoverJson { sets: cover.sets().to_vec() },
        datum: DatumJson { level: h.level(), parts: parts_to_json(h.data().parts(), k), angle_part: [0, h.degree()] },
    };
    serde_json::to_string_pretty(&file).expect("finite values serialize")
}

/// Parses a datum file. Syntax errors carry line and column, semantic errors a
/// path into the document.
pub fn datum_from_str(text: &str) -> Result<GerbeDatum> {
    let file: DatumFile = serde_json::from_str(text).map_err(json_error)?;
    if file.format_version != FORMAT_VERSION {
        return Err(parse_error("format_version", format!("unsupported version {}", file.format_version)));
    }
    let complex = Arc::new(complex_from_json(file.complex)?);
    let cover = Arc::new(Cover::new(complex.clone(), file.cover.sets).map_err(|e| parse_error("cover", e))?);
    let level = file.datum.level;
    let degree = usize::try_from(level.saturating_add(2))
        .map_err(|_| parse_error("datum.level", format!("level {level} is below -1")))?;
    if file.datum.angle_part != [0, degree] {
        return Err(parse_error(
            "datum.angle_part",
            format!("expected [0, {degree}] for level {level}, got {:?}", file.datum.angle_part),
        ));
    }
    let data = parts_from_json(degree, file.datum.parts, &complex, "datum")?.with_angle_layer();
    GerbeDatum::new(level, data, cover).map_err(|e| parse_error("datum", e))
}

/// Serializes a gauge witness; simplices are written by vertex list.
pub fn witness_to_string(f: &GaugePotential, complex: &SimplicialComplex) -> String {
    let file = WitnessFile {
        format_version: FORMAT_VERSION,
        witness: WitnessJson { degree: f.degree(), parts: parts_to_json(f.total().parts(), complex) },
    };
    serde_json::to_string_pretty(&file).expect("finite values serialize")
}

pub fn witness_from_str(text: &str, complex: &SimplicialComplex) -> Result<GaugePotential> {
    let file: WitnessFile = serde_json::from_str(text).map_err(json_error)?;
    if file.format_version != FORMAT_VERSION {
        return Err(parse_error("format_version", format!("unsupported version {}", file.format_version)));
    }
    let total = parts_from_json(file.witness.degree, file.witness.parts, complex, "witness")?;
    GaugePotential::new(total).map_err(|e| parse_error("witness", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_gerbopole, build_minus_one_gerbe, build_monopole};
    use crate::rng::Lcg64;

    #[test]
    fn builder_outputs_round_trip_exactly() {
        for h in [build_minus_one_gerbe(12).unwrap(), build_monopole(12).unwrap(), build_gerbopole(6).unwrap()] {
            let text = datum_to_string(&h);
            let back = datum_from_str(&text).unwrap();
            assert_eq!(back, h);
            assert_eq!(datum_to_string(&back), text);
        }
    }

    #[test]
    fn awkward_floats_survive() {
        let h = build_monopole(6).unwrap();
        let mut rng = Lcg64::new(3);
        let f = GaugePotential::random(h.degree() - 1, h.cover(), &mut rng, 0.5);
        let g = h.gauge_transform(&f).unwrap();
        let back = datum_from_str(&datum_to_string(&g)).unwrap();
        for (a, b) in g.data().parts().zip(back.data().parts()) {
            for ((ia, ca), (ib, cb)) in a.components().zip(b.components()) {
                assert_eq!(ia, ib);
                for ((_, x), (_, y)) in ca.iter().zip(cb.iter()) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }

    #[test]
    fn witness_round_trips() {
        let h = build_monopole(6).unwrap();
        let mut rng = Lcg64::new(9);
        let f = GaugePotential::random(h.degree() - 1, h.cover(), &mut rng, 0.5);
        let text = witness_to_string(&f, h.cover().complex());
        assert_eq!(witness_from_str(&text, h.cover().complex()).unwrap(), f);
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = datum_from_str("{\n  \"format_version\": 1,\n  oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Parse(_)));
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn semantic_errors_report_path() {
        let text = datum_to_string(&build_monopole(6).unwrap());
        let bad = text.replacen(
            "\"angle_part\": [\n      0,\n      2\n    ]",
            "\"angle_part\": [\n      1,\n      1\n    ]",
            1,
        );
        assert_ne!(bad, text);
        let msg = datum_from_str(&bad).unwrap_err().to_string();
        assert!(msg.contains("datum.angle_part"), "{msg}");

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["datum"]["parts"][0]["components"][0]["entries"][0]["simplex"] = serde_json::json!([0, 99]);
        let msg = datum_from_str(&v.to_string()).unwrap_err().to_string();
        assert!(msg.contains("datum.parts[0].components[0].entries[0]"), "{msg}");
    }

    #[test]
    fn version_and_level_are_checked() {
        let text = datum_to_string(&build_minus_one_gerbe(6).unwrap());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["format_version"] = 2.into();
        assert!(datum_from_str(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["datum"]["level"] = (-2).into();
        assert!(matches!(datum_from_str(&v.to_string()), Err(Error::Parse(_))));
    }
}
