//! JSON input files: arrangements, fans and explicit building sets.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use wonder_core::arrangement::{frac, poset_of_layers, Layer, LayerPoset, ToricArrangement};
use wonder_core::fan::{primitive, Fan};
use wonder_core::poset::{
    is_building_set, minimal_building_set, minimal_well_connected, BuildingSet, RankedPoset,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubtorusSpec {
    label: String,
    chars: Vec<Vec<i64>>,
    phase: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrangementFile {
    ambient_rank: usize,
    subtori: Vec<SubtorusSpec>,
    /// Names for layers that are not subtori, declared by their equations.
    #[serde(default)]
    aliases: Vec<SubtorusSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    ambient_rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildingFile {
    labels: Vec<String>,
}

/// Parses `p/q` or `p`. Decimals are rejected so that phases stay exact.
pub fn parse_phase(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.contains('.') || t.contains(['e', 'E']) {
        bail!("phase {s:?}: decimals are not allowed, write p/q");
    }
    let q = BigRational::from_str(t).map_err(|e| anyhow!("phase {s:?}: {e}"))?;
    Ok(frac(&q))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {what} file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} file {}", path.display()))
}

fn to_int(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn equations(n: usize, s: &SubtorusSpec) -> Result<(Vec<Vec<BigInt>>, Vec<BigRational>)> {
    if let Some(r) = s.chars.iter().find(|r| r.len() != n) {
        bail!(
            "{}: character of length {} in ambient rank {n}",
            s.label,
            r.len()
        );
    }
    let phase = s
        .phase
        .iter()
        .map(|p| parse_phase(p))
        .collect::<Result<Vec<_>>>()
        .with_context(|| s.label.clone())?;
    Ok((to_int(&s.chars), phase))
}

/// Reads an arrangement and builds its poset of layers with aliases applied.
pub fn load_arrangement(path: &Path) -> Result<(ToricArrangement, LayerPoset)> {
    let file: ArrangementFile = read_json(path, "arrangement")?;
    let n = file.ambient_rank;
    let mut arr = ToricArrangement::new(n);
    for s in &file.subtori {
        let (chars, phase) = equations(n, s)?;
        arr.add(&s.label, &chars, &phase)
            .with_context(|| format!("subtorus {}", s.label))?;
    }
    let mut lp = poset_of_layers(&arr)?;
    for s in &file.aliases {
        let (chars, phase) = equations(n, s)?;
        let layer = Layer::from_equations(n, &chars, &phase)
            .with_context(|| format!("alias {}", s.label))?
            .ok_or_else(|| anyhow!("alias {}: empty layer", s.label))?;
        let i = lp
            .find(&layer)
            .ok_or_else(|| anyhow!("alias {}: not a layer of the arrangement", s.label))?;
        if lp.poset.index_of(&s.label).is_some_and(|j| j != i) {
            bail!("alias {}: label already used", s.label);
        }
        lp.poset.set_label(i, &s.label);
    }
    Ok((arr, lp))
}

/// Reads a fan. Non-primitive rays are divided by their content with a
/// warning on stderr.
pub fn load_fan(path: &Path) -> Result<Fan> {
    let file: FanFile = read_json(path, "fan")?;
    let mut rays = to_int(&file.rays);
    for (i, r) in rays.iter_mut().enumerate() {
        if r.len() != file.ambient_rank {
            bail!(
                "ray {i} has length {}, expected {}",
                r.len(),
                file.ambient_rank
            );
        }
        let p = primitive(r);
        if &p != r {
            eprintln!(
                "warning: ray {i} is not primitive, using {:?}",
                p.iter().map(|x| x.to_string()).collect::<Vec<_>>()
            );
            *r = p;
        }
    }
    Ok(Fan::new(file.ambient_rank, rays, file.max_cones)?)
}

/// `min`, `max`, `minwc`, or a JSON file listing labels in building order.
pub fn select_building(p: &RankedPoset, selector: &str) -> Result<BuildingSet> {
    let members: Vec<usize> = match selector {
        "min" => minimal_building_set(p),
        "max" => (1..p.len()).collect(),
        "minwc" => minimal_well_connected(p, &minimal_building_set(p))?,
        file => {
            let f: BuildingFile = read_json(Path::new(file), "building set")?;
            let labels: Vec<&str> = f.labels.iter().map(String::as_str).collect();
            let g = BuildingSet::from_labels(p, &labels)?;
            if !is_building_set(p, g.members(), false) {
                bail!("{file}: labels do not form a building set");
            }
            return Ok(g);
        }
    };
    Ok(BuildingSet::new(p, &members)?)
}
