//! File formats.
//!
//! * Preorder files are line based: one `elements <label> ...` line, any
//!   number of `rel <x> <y>` lines (`x <= y`), `#` comments, blank lines.
//! * Incidence functions: `{"entries":[{"from":"a","to":"b","value":"4"}]}`,
//!   omitted pairs are zero.
//! * Weight systems: `{"ring":"Z/5","weights":[{"from":"a","to":"c","value":"2"}]}`,
//!   one record per strictly comparable class pair, by representative.
//! * Potentials: `{"ring":"Z/5","potential":[{"vertex":"a","value":"1"}]}`.
//!
//! Values use the ring element text encodings.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{IncidenceAlgebra, IncidenceFunction};
use crate::error::{Error, Result};
use crate::mult::{Potential, WeightSpace, WeightSystem};
use crate::preorder::Preorder;
use crate::ring::RingSpec;

pub fn parse_preorder(text: &str, source: &str) -> Result<Preorder> {
    let mut elements: Option<(usize, Vec<String>)> = None;
    let mut rels: Vec<(usize, String, String)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("elements") => {
                if let Some((first, _)) = elements {
                    return Err(Error::input(
                        format!("{source}:{line_no}"),
                        format!("second `elements` line (first on line {first})"),
                    ));
                }
                elements = Some((line_no, words.map(str::to_string).collect()));
            }
            Some("rel") => {
                let parts: Vec<&str> = words.collect();
                if parts.len() != 2 {
                    return Err(Error::input(
                        format!("{source}:{line_no}"),
                        "expected `rel <x> <y>`",
                    ));
                }
                rels.push((line_no, parts[0].to_string(), parts[1].to_string()));
            }
            Some(other) => {
                return Err(Error::input(
                    format!("{source}:{line_no}"),
                    format!("unknown directive `{other}`"),
                ))
            }
            None => unreachable!("non-empty line"),
        }
    }
    let (_, labels) =
        elements.ok_or_else(|| Error::input(source.to_string(), "missing `elements` line"))?;
    for (line_no, x, y) in &rels {
        for l in [x, y] {
            if !labels.contains(l) {
                return Err(Error::input(
                    format!("{source}:{line_no}"),
                    format!("undeclared label `{l}`"),
                ));
            }
        }
    }
    let gens: Vec<(String, String)> = rels.into_iter().map(|(_, x, y)| (x, y)).collect();
    Preorder::close_relations(&labels, &gens).map_err(|e| Error::input(source.to_string(), e.to_string()))
}

/// Writes the generating (covering-free, full) relation of a preorder.
pub fn format_preorder(p: &Preorder) -> String {
    let mut out = format!("elements {}\n", p.labels().join(" "));
    for (x, y) in p.pairs() {
        out.push_str(&format!("rel {} {}\n", p.label(x), p.label(y)));
    }
    out
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub from: String,
    pub to: String,
    pub value: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub entries: Vec<EntryRecord>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    pub ring: String,
    pub weights: Vec<EntryRecord>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub vertex: String,
    pub value: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub ring: String,
    pub potential: Vec<VertexRecord>,
}

fn json_error(source: &str, e: serde_json::Error) -> Error {
    Error::input(format!("{source}:{}", e.line()), e.to_string())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

pub fn parse_function(text: &str, source: &str, alg: &Arc<IncidenceAlgebra>) -> Result<IncidenceFunction> {
    let file: FunctionFile = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    let mut entries = Vec::with_capacity(file.entries.len());
    for (i, rec) in file.entries.iter().enumerate() {
        let at = || format!("{source}: entry {i} ({} -> {})", rec.from, rec.to);
        let v = alg.ring().parse_element(&rec.value).map_err(|e| Error::input(at(), e.to_string()))?;
        entries.push((rec.from.as_str(), rec.to.as_str(), v));
    }
    alg.from_entries(&entries).map_err(|e| Error::input(source.to_string(), e.to_string()))
}

pub fn function_file(f: &IncidenceFunction) -> FunctionFile {
    let alg = f.algebra();
    let p = alg.preorder();
    FunctionFile {
        entries: f
            .entries()
            .map(|(x, y, v)| EntryRecord {
                from: p.label(x).to_string(),
                to: p.label(y).to_string(),
                value: alg.ring().format(v),
            })
            .collect(),
    }
}

pub fn format_function(f: &IncidenceFunction) -> String {
    to_json(&function_file(f))
}

/// The ring named in a weight or potential file, without interpreting the rest.
pub fn declared_ring(text: &str, source: &str) -> Result<RingSpec> {
    #[derive(Deserialize)]
    struct RingOnly {
        ring: String,
    }
    let r: RingOnly = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    r.ring.parse()
}

fn check_ring(declared: &str, space: &WeightSpace, source: &str) -> Result<()> {
    let spec: RingSpec = declared.parse()?;
    if &spec != space.ring().spec() {
        return Err(Error::input(
            source.to_string(),
            format!("file declares ring {spec}, expected {}", space.ring().spec()),
        ));
    }
    Ok(())
}

pub fn parse_weights(text: &str, source: &str, space: &Arc<WeightSpace>) -> Result<WeightSystem> {
    let file: WeightFile = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    check_ring(&file.ring, space, source)?;
    let mut recs = Vec::with_capacity(file.weights.len());
    for (i, rec) in file.weights.iter().enumerate() {
        let at = || format!("{source}: weight {i} ({} -> {})", rec.from, rec.to);
        let v = space.ring().parse_element(&rec.value).map_err(|e| Error::input(at(), e.to_string()))?;
        recs.push((rec.from.as_str(), rec.to.as_str(), v));
    }
    WeightSystem::from_pairs(space, &recs).map_err(|e| Error::input(source.to_string(), e.to_string()))
}

pub fn weight_file(ws: &WeightSystem) -> WeightFile {
    let space = ws.space();
    let q = space.poset();
    WeightFile {
        ring: space.ring().spec().to_string(),
        weights: space
            .pairs()
            .iter()
            .zip(ws.values())
            .map(|(&(x, y), &v)| EntryRecord {
                from: q.representative(x).to_string(),
                to: q.representative(y).to_string(),
                value: space.ring().format(v),
            })
            .collect(),
    }
}

pub fn format_weights(ws: &WeightSystem) -> String {
    to_json(&weight_file(ws))
}

pub fn parse_potential(text: &str, source: &str, space: &Arc<WeightSpace>) -> Result<Potential> {
    let file: PotentialFile = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    check_ring(&file.ring, space, source)?;
    let mut recs = Vec::with_capacity(file.potential.len());
    for rec in &file.potential {
        let v = space
            .ring()
            .parse_element(&rec.value)
            .map_err(|e| Error::input(format!("{source}: vertex {}", rec.vertex), e.to_string()))?;
        recs.push((rec.vertex.as_str(), v));
    }
    Potential::from_labels(space, &recs).map_err(|e| Error::input(source.to_string(), e.to_string()))
}

pub fn potential_file(v: &Potential) -> PotentialFile {
    let space = v.space();
    PotentialFile {
        ring: space.ring().spec().to_string(),
        potential: v
            .values()
            .iter()
            .enumerate()
            .map(|(c, &x)| VertexRecord {
                vertex: space.poset().representative(c).to_string(),
                value: space.ring().format(x),
            })
            .collect(),
    }
}

pub fn format_potential(v: &Potential) -> String {
    to_json(&potential_file(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    const CROWN: &str = "# crown\nelements a b c d\nrel a c\nrel a d # trailing\n\nrel b c\nrel b d\n";

    #[test]
    fn preorder_file_roundtrip() {
        let p = parse_preorder(CROWN, "crown.txt").unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.leq(1, 3));
        assert_eq!(parse_preorder(&format_preorder(&p), "x").unwrap(), p);
    }

    #[test]
    fn preorder_file_errors_carry_line_numbers() {
        let err = parse_preorder("elements a b\nrel a z\n", "p.txt").unwrap_err().to_string();
        assert!(err.contains("p.txt:2") && err.contains("`z`"), "{err}");
        let err = parse_preorder("rel a b\n", "p.txt").unwrap_err().to_string();
        assert!(err.contains("missing `elements`"), "{err}");
        let err = parse_preorder("elements a\nelements b\n", "p.txt").unwrap_err().to_string();
        assert!(err.contains("p.txt:2"), "{err}");
        let err = parse_preorder("elements a b\nrel a\n", "p.txt").unwrap_err().to_string();
        assert!(err.contains("p.txt:2"), "{err}");
        assert!(parse_preorder("elements a b\nfoo a b\n", "p.txt").is_err());
    }

    #[test]
    fn function_json() {
        let p = parse_preorder(CROWN, "crown.txt").unwrap();
        let alg = IncidenceAlgebra::new(p, Ring::parse("Z/5").unwrap());
        let f = parse_function(r#"{"entries":[{"from":"a","to":"c","value":"4"}]}"#, "f.json", &alg).unwrap();
        assert_eq!(f.get_by_label("a", "c").unwrap().code(), 4);
        assert_eq!(parse_function(&format_function(&f), "g", &alg).unwrap(), f);
        let err = parse_function(r#"{"entries":[{"from":"c","to":"a","value":"4"}]}"#, "f.json", &alg)
            .unwrap_err()
            .to_string();
        assert!(err.contains("f.json") && err.contains("c is not below a"), "{err}");
        assert!(parse_function(r#"{"entries":[{"from":"a","to":"c","value":"9"}]}"#, "f.json", &alg).is_err());
    }

    #[test]
    fn weight_json() {
        let p = parse_preorder(CROWN, "crown.txt").unwrap();
        let space = WeightSpace::new(p.quotient(), Ring::parse("Z/5").unwrap());
        let text = r#"{"ring":"Z/5","weights":[
            {"from":"a","to":"c","value":"2"},{"from":"a","to":"d","value":"1"},
            {"from":"b","to":"c","value":"1"},{"from":"b","to":"d","value":"1"}]}"#;
        let ws = parse_weights(text, "w.json", &space).unwrap();
        assert_eq!(parse_weights(&format_weights(&ws), "w2", &space).unwrap(), ws);
        assert_eq!(declared_ring(text, "w.json").unwrap(), RingSpec::Modular(5));
        let missing = r#"{"ring":"Z/5","weights":[{"from":"a","to":"c","value":"2"}]}"#;
        assert!(parse_weights(missing, "w.json", &space).unwrap_err().to_string().contains("not total"));
        let wrong_ring = text.replace("Z/5", "Z/7");
        assert!(parse_weights(&wrong_ring, "w.json", &space).is_err());
    }

    #[test]
    fn potential_json() {
        let p = parse_preorder(CROWN, "crown.txt").unwrap();
        let space = WeightSpace::new(p.quotient(), Ring::parse("Z/5").unwrap());
        let text = r#"{"ring":"Z/5","potential":[{"vertex":"a","value":"1"},{"vertex":"b","value":"2"},{"vertex":"c","value":"2"},{"vertex":"d","value":"1"}]}"#;
        let v = parse_potential(text, "v.json", &space).unwrap();
        assert_eq!(parse_potential(&format_potential(&v), "v2", &space).unwrap(), v);
    }
}
