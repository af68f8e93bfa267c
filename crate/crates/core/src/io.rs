//! JSON file formats for fans, divisors and families.
//!
//! Rationals are strings `"p/q"` (or plain integers). A family lists, per
//! maximal cone, its box and either the nonzero values explicitly or the
//! jumps generating them; a reflexive family may instead give one
//! filtration per ray.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{Fan, FanData};
use crate::family::{reflexive_from_filtrations, CornerFamily, DeltaFamily, FamilyKind, RayFiltration};
use crate::grid::box_points;
use crate::linalg::{fmt_q, parse_q, Matrix, SubspaceQ};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointValue {
    pub at: Vec<i64>,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapEntry {
    pub axis: usize,
    pub at: Vec<i64>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CornerJson {
    pub rays: Vec<usize>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<PointValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<Vec<PointValue>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RayJump {
    pub at: i64,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FiltrationJson {
    pub ray: usize,
    pub jumps: Vec<RayJump>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub kind: String,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub support: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cones: Vec<CornerJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filtrations: Vec<FiltrationJson>,
}

fn ctx(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
        other => Error::Parse(format!("{path}: {other}")),
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("{what}: line {} column {}: {e}", e.line(), e.column())))
}

pub fn parse_fan(text: &str) -> Result<Fan> {
    let data: FanData = parse_json(text, "fan")?;
    Fan::new(data)
}

pub fn fan_to_json(fan: &Fan) -> String {
    serde_json::to_string(&fan.to_data()).expect("serializable")
}

/// Integer ray coefficients, e.g. `[1, 0, 0]`.
pub fn parse_divisor(text: &str, fan: &Fan) -> Result<Vec<i64>> {
    let d: Vec<i64> = parse_json(text, "divisor")?;
    if d.len() != fan.num_rays() {
        return Err(Error::Parse(format!("divisor has {} entries, fan has {} rays", d.len(), fan.num_rays())));
    }
    Ok(d)
}

fn parse_matrix(rows: &[Vec<String>], m: usize, path: &str) -> Result<Matrix> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(Error::Parse(format!("{path}: expected a {m}×{m} matrix")));
    }
    rows.iter()
        .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Matrix>>()
        .map_err(ctx(path))
}

fn parse_corner(c: &CornerJson, m: usize, path: &str) -> Result<CornerFamily> {
    let r = c.rays.len();
    if c.lower.len() != r || c.upper.len() != r {
        return Err(Error::Parse(format!("{path}: box bounds must have {r} entries")));
    }
    if c.lower.iter().zip(&c.upper).any(|(a, b)| a > b) {
        return Err(Error::Parse(format!("{path}: lower bound exceeds upper bound")));
    }
    let inside = |p: &[i64]| p.len() == r && p.iter().zip(&c.lower).zip(&c.upper).all(|((x, l), h)| l <= x && x <= h);
    let mut explicit: std::collections::BTreeMap<Vec<i64>, SubspaceQ> = Default::default();
    match (&c.values, &c.jumps) {
        (Some(_), Some(_)) => return Err(Error::Parse(format!("{path}: give either values or jumps, not both"))),
        (None, None) => return Err(Error::Parse(format!("{path}: missing values or jumps"))),
        (Some(vals), None) => {
            for (k, v) in vals.iter().enumerate() {
                let p = format!("{path}.values[{k}]");
                if !inside(&v.at) {
                    return Err(Error::Parse(format!("{p}: point {:?} outside the box", v.at)));
                }
                let s = SubspaceQ::from_strings(m, &v.basis).map_err(ctx(&p))?;
                if explicit.insert(v.at.clone(), s).is_some() {
                    return Err(Error::Parse(format!("{p}: duplicate point {:?}", v.at)));
                }
            }
        }
        (None, Some(jumps)) => {
            let mut parsed = Vec::new();
            for (k, v) in jumps.iter().enumerate() {
                let p = format!("{path}.jumps[{k}]");
                if !inside(&v.at) {
                    return Err(Error::Parse(format!("{p}: point {:?} outside the box", v.at)));
                }
                parsed.push((v.at.clone(), SubspaceQ::from_strings(m, &v.basis).map_err(ctx(&p))?));
            }
            for pt in box_points(&c.lower, &c.upper) {
                let v = parsed
                    .iter()
                    .filter(|(at, _)| at.iter().zip(&pt).all(|(a, b)| a <= b))
                    .fold(SubspaceQ::zero(m), |acc, (_, s)| acc.sum(s));
                if !v.is_zero() {
                    explicit.insert(pt, v);
                }
            }
        }
    }
    let mut corner = CornerFamily::from_fn(c.rays.clone(), m, c.lower.clone(), c.upper.clone(), |p| {
        explicit.get(p).cloned().unwrap_or_else(|| SubspaceQ::zero(m))
    })
    .map_err(ctx(path))?;
    for (k, e) in c.maps.iter().enumerate() {
        let p = format!("{path}.maps[{k}]");
        let mat = parse_matrix(&e.matrix, m, &p)?;
        corner = corner.with_map(e.axis, e.at.clone(), mat).map_err(ctx(&p))?;
    }
    Ok(corner)
}

/// Reads a family; cones are matched to the fan's maximal cones by ray set.
pub fn parse_family(text: &str, fan: &Fan) -> Result<DeltaFamily> {
    let j: FamilyJson = parse_json(text, "family")?;
    family_from_json(&j, fan)
}

pub fn family_from_json(j: &FamilyJson, fan: &Fan) -> Result<DeltaFamily> {
    let kind = match j.kind.as_str() {
        "torsion-free" => FamilyKind::TorsionFree,
        "reflexive" => FamilyKind::Reflexive,
        "pure" => {
            if j.support.is_empty() {
                return Err(Error::Parse("support: a pure family needs support cones".into()));
            }
            FamilyKind::Pure(
                j.support
                    .iter()
                    .map(|c| {
                        let mut c = c.clone();
                        c.sort_unstable();
                        c
                    })
                    .collect(),
            )
        }
        other => return Err(Error::Parse(format!("kind: unknown kind {other:?}"))),
    };
    if j.rank == 0 {
        return Err(Error::Parse("rank: must be positive".into()));
    }
    if !j.filtrations.is_empty() {
        if kind != FamilyKind::Reflexive || !j.cones.is_empty() {
            return Err(Error::Parse("filtrations: only for reflexive families without cone data".into()));
        }
        let mut filts = Vec::new();
        for (k, f) in j.filtrations.iter().enumerate() {
            let mut jumps = Vec::new();
            for (l, jump) in f.jumps.iter().enumerate() {
                let p = format!("filtrations[{k}].jumps[{l}]");
                jumps.push((jump.at, SubspaceQ::from_strings(j.rank, &jump.basis).map_err(ctx(&p))?));
            }
            filts.push(RayFiltration { ray: f.ray, jumps });
        }
        return reflexive_from_filtrations(&filts, fan).map_err(ctx("filtrations"));
    }
    let mut corners: Vec<Option<CornerFamily>> = vec![None; fan.max_cones().len()];
    for (k, c) in j.cones.iter().enumerate() {
        let path = format!("cones[{k}]");
        let Some(i) = fan.max_cone_index(&c.rays) else {
            return Err(Error::Parse(format!("{path}: rays {:?} are not a maximal cone", c.rays)));
        };
        if fan.max_cones()[i] != c.rays {
            return Err(Error::Parse(format!("{path}: list rays in increasing order {:?}", fan.max_cones()[i])));
        }
        if corners[i].is_some() {
            return Err(Error::Parse(format!("{path}: cone {:?} given twice", c.rays)));
        }
        corners[i] = Some(parse_corner(c, j.rank, &path)?);
    }
    let corners = corners
        .into_iter()
        .enumerate()
        .map(|(i, c)| match (c, &kind) {
            (Some(c), _) => Ok(c),
            (None, FamilyKind::Pure(_)) => Ok(CornerFamily::zero(fan.max_cones()[i].clone(), j.rank)),
            (None, _) => Err(Error::Parse(format!("cones: maximal cone {:?} is missing", fan.max_cones()[i]))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeltaFamily { kind, rank: j.rank, corners })
}

fn kind_json(kind: &FamilyKind) -> (String, Vec<Vec<usize>>) {
    match kind {
        FamilyKind::TorsionFree => ("torsion-free".into(), vec![]),
        FamilyKind::Reflexive => ("reflexive".into(), vec![]),
        FamilyKind::Pure(s) => ("pure".into(), s.clone()),
    }
}

/// Canonical serialization: minimal boxes and explicit nonzero values.
pub fn family_to_json(fam: &DeltaFamily) -> FamilyJson {
    let fam = fam.canonical();
    let (kind, support) = kind_json(&fam.kind);
    let cones = fam
        .corners
        .iter()
        .map(|c| CornerJson {
            rays: c.rays.clone(),
            lower: c.lo().to_vec(),
            upper: c.hi().to_vec(),
            values: Some(
                c.grid()
                    .points()
                    .into_iter()
                    .filter_map(|p| {
                        let v = c.grid().at(&p);
                        (!v.is_zero()).then(|| PointValue { at: p.clone(), basis: v.to_strings() })
                    })
                    .collect(),
            ),
            jumps: None,
            maps: c
                .explicit_maps()
                .iter()
                .map(|((axis, at), m)| MapEntry {
                    axis: *axis,
                    at: at.clone(),
                    matrix: m.iter().map(|r| r.iter().map(fmt_q).collect()).collect(),
                })
                .collect(),
        })
        .collect();
    FamilyJson { kind, rank: fam.rank, support, cones, filtrations: vec![] }
}

pub fn family_to_string(fam: &DeltaFamily) -> String {
    serde_json::to_string(&family_to_json(fam)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::line_bundle_family;

    #[test]
    fn family_round_trip() {
        let fan = Fan::projective_plane();
        let f = line_bundle_family(&[1, 0, 2], &fan);
        let text = family_to_string(&f);
        let g = parse_family(&text, &fan).unwrap();
        assert_eq!(g.canonical(), f.canonical());
    }

    #[test]
    fn jumps_and_filtrations() {
        let fan = Fan::projective_plane();
        let text = r#"{"kind":"reflexive","rank":2,"filtrations":[
            {"ray":0,"jumps":[{"at":0,"basis":[["1","0"]]},{"at":1,"basis":[["1","0"],["0","1"]]}]},
            {"ray":1,"jumps":[{"at":0,"basis":[["0","1"]]},{"at":1,"basis":[["1","0"],["0","1"]]}]},
            {"ray":2,"jumps":[{"at":-2,"basis":[["1","1"]]},{"at":-1,"basis":[["1","0"],["0","1"]]}]}]}"#;
        let f = parse_family(text, &fan).unwrap();
        assert_eq!(f.rank, 2);
        let j = family_to_json(&f);
        let jumps_text = r#"{"kind":"torsion-free","rank":1,"cones":[
            {"rays":[0,1],"lower":[0,0],"upper":[1,1],"jumps":[{"at":[1,0],"basis":[["1"]]},{"at":[0,1],"basis":[["1"]]}]},
            {"rays":[1,2],"lower":[0,0],"upper":[0,0],"jumps":[{"at":[0,0],"basis":[["1"]]}]},
            {"rays":[0,2],"lower":[0,0],"upper":[0,0],"jumps":[{"at":[0,0],"basis":[["1"]]}]}]}"#;
        let g = parse_family(jumps_text, &fan).unwrap();
        assert_eq!(g.corners[0].dim_at(&[0, 0]), 0);
        assert_eq!(g.corners[0].dim_at(&[1, 0]), 1);
        assert_eq!(j.kind, "reflexive");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let fan = Fan::projective_plane();
        let bad = r#"{"kind":"torsion-free","rank":1,"cones":[
            {"rays":[0,1],"lower":[0,0],"upper":[0,0],"values":[{"at":[0,0],"basis":[["x"]]}]}]}"#;
        let e = parse_family(bad, &fan).unwrap_err().to_string();
        assert!(e.contains("cones[0].values[0]"), "{e}");
        let e = parse_family("{\"kind\": 3}", &fan).unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }
}
