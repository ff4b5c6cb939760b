//! Admissible functions and monomials, the sets `AM` and `B`, their
//! generating functions, flag decomposition and the deletion-contraction
//! recursions for both.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fan::restrict_fan;
use crate::intlinalg::Int;
use crate::polyring::{Monomial, Polynomial};
use crate::poset::{blowup_building, BlowupPoset, BuildingSet, NestedSet, RankedPoset};
use crate::presentation::{
    blowup_hilbert, toric_betti, ModelData, ModelPresentation, PresentationError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdmissibleError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("{0} and {1} are not comparable")]
    NotAChain(String, String),
    #[error("{0} and {1} have a nonempty join but no unique meet")]
    MeetNotUnique(String, String),
}

/// The function `f_m` of a chain monomial `m = t_{a_1}^{e_1} ... t_{a_k}^{e_k}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AdmissibleFunction {
    /// `(a_i, e_i)` with `a_1 < ... < a_k` in the blowup poset.
    pub chain: Vec<(usize, u32)>,
    /// `G -> f_m(G)`, supported on the members of `a_k`.
    pub values: BTreeMap<usize, u32>,
}

impl AdmissibleFunction {
    /// The function of `m = 1`.
    pub fn one() -> Self {
        AdmissibleFunction {
            chain: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    /// `a_k`, or 0 for `m = 1`.
    pub fn top(&self) -> usize {
        self.chain.last().map_or(0, |&(a, _)| a)
    }

    /// Degree of `m`, which is the sum of the values of `f_m`.
    pub fn degree(&self) -> u32 {
        self.values.values().sum()
    }
}

/// `f_m` for a product of blowup variables. Index 0 stands for `t_0̂ = 1`
/// and zero exponents are dropped.
pub fn monomial_to_function(
    bl: &BlowupPoset,
    factors: &[(usize, u32)],
) -> Result<AdmissibleFunction, AdmissibleError> {
    let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
    for &(a, e) in factors {
        if a != 0 && e > 0 {
            *merged.entry(a).or_default() += e;
        }
    }
    let mut chain: Vec<(usize, u32)> = merged.into_iter().collect();
    chain.sort_by_key(|&(a, _)| (bl.poset.rank(a), a));
    for w in chain.windows(2) {
        if !bl.poset.lt(w[0].0, w[1].0) {
            return Err(AdmissibleError::NotAChain(
                bl.poset.label(w[0].0).to_string(),
                bl.poset.label(w[1].0).to_string(),
            ));
        }
    }
    let mut values = BTreeMap::new();
    for &(a, e) in &chain {
        for &g in &bl.nested[a].members {
            *values.entry(g).or_default() += e;
        }
    }
    Ok(AdmissibleFunction { chain, values })
}

/// `rk(G) - rk(M)` with `M` the join of the members of `support` below `G`,
/// taken in `[0̂, G]`.
pub fn admissible_bound(p: &RankedPoset, support: &[usize], g: usize) -> usize {
    let below: Vec<usize> = support.iter().copied().filter(|&h| p.lt(h, g)).collect();
    let m = if below.is_empty() {
        0
    } else {
        p.join_below(&below, g)
            .expect("lower intervals are lattices")
    };
    p.rank(g) - p.rank(m)
}

pub fn is_admissible(p: &RankedPoset, f: &AdmissibleFunction) -> bool {
    let support: Vec<usize> = f.values.keys().copied().collect();
    f.values
        .iter()
        .all(|(&g, &v)| (v as usize) < admissible_bound(p, &support, g))
}

/// The chain realising `values` below the nested set `top`: level sets of
/// `f` in decreasing order of value, each with its join below the top.
fn chain_of(
    p: &RankedPoset,
    g: &BuildingSet,
    bl: &BlowupPoset,
    top: usize,
    values: &BTreeMap<usize, u32>,
) -> Option<Vec<(usize, u32)>> {
    let x = bl.nested[top].top;
    let mut levels: Vec<u32> = values.values().copied().collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let mut chain = Vec::new();
    for (i, &v) in levels.iter().enumerate() {
        let next = levels.get(i + 1).copied().unwrap_or(0);
        let a = if i + 1 == levels.len() {
            top
        } else {
            let mut members: Vec<usize> = values
                .iter()
                .filter(|&(_, &w)| w >= v)
                .map(|(&h, _)| h)
                .collect();
            members.sort_by_key(|&h| g.position(h));
            let y = p.join_below(&members, x)?;
            bl.index_of(&NestedSet { members, top: y })?
        };
        chain.push((a, v - next));
    }
    Some(chain)
}

fn enumerate_in(p: &RankedPoset, g: &BuildingSet, bl: &BlowupPoset) -> Vec<AdmissibleFunction> {
    let mut out = vec![AdmissibleFunction::one()];
    for a in 1..bl.len() {
        let support = &bl.nested[a].members;
        let bounds: Vec<usize> = support
            .iter()
            .map(|&h| admissible_bound(p, support, h))
            .collect();
        if bounds.iter().any(|&b| b < 2) {
            continue;
        }
        let mut vals = vec![1u32; support.len()];
        loop {
            let values: BTreeMap<usize, u32> =
                support.iter().copied().zip(vals.iter().copied()).collect();
            if let Some(chain) = chain_of(p, g, bl, a, &values) {
                out.push(AdmissibleFunction { chain, values });
            }
            // odometer over 1 <= f(G) < bound(G)
            let mut i = 0;
            while i < vals.len() {
                vals[i] += 1;
                if (vals[i] as usize) < bounds[i] {
                    break;
                }
                vals[i] = 1;
                i += 1;
            }
            if i == vals.len() {
                break;
            }
        }
    }
    out.sort_by(|x, y| x.degree().cmp(&y.degree()).then_with(|| x.cmp(y)));
    out
}

/// All admissible monomials, as their functions, sorted by degree.
pub fn enumerate_am(p: &RankedPoset, g: &BuildingSet) -> Vec<AdmissibleFunction> {
    enumerate_in(p, g, &blowup_building(p, g))
}

/// Counts by degree.
pub fn generating_function(degrees: impl IntoIterator<Item = u32>) -> Vec<i64> {
    let mut out = vec![0i64];
    for d in degrees {
        let d = d as usize;
        if out.len() <= d {
            out.resize(d + 1, 0);
        }
        out[d] += 1;
    }
    out
}

pub fn gamma_am(p: &RankedPoset, g: &BuildingSet) -> Vec<i64> {
    generating_function(enumerate_am(p, g).iter().map(AdmissibleFunction::degree))
}

/// `Gamma_B` from admissible functions and the Betti numbers of the fans
/// `Delta ∩ Ann(Gamma_{pi(a_k)})`, without building a presentation.
pub fn gamma_b(data: &ModelData) -> Result<Vec<i64>, AdmissibleError> {
    let bl = blowup_building(&data.poset, &data.building);
    let mut toric: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut out: Vec<i64> = Vec::new();
    for f in enumerate_in(&data.poset, &data.building, &bl) {
        let x = bl.projection(f.top());
        if let std::collections::btree_map::Entry::Vacant(e) = toric.entry(x) {
            let betti = if x == 0 {
                toric_betti(&data.fan)?
            } else {
                toric_betti(&restrict_fan(&data.fan, &data.lattices[x]))?
            };
            e.insert(betti);
        }
        for (i, &b) in toric[&x].iter().enumerate() {
            let d = f.degree() as usize + i;
            if out.len() <= d {
                out.resize(d + 1, 0);
            }
            out[d] += b as i64;
        }
    }
    while out.len() > 1 && out.last() == Some(&0) {
        out.pop();
    }
    Ok(out)
}

/// An element `b m` of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub function: AdmissibleFunction,
    /// `b`, a standard monomial of `beta_{Delta_{pi(a_k)}}`.
    pub toric: Monomial,
    /// `b` times the chain monomial.
    pub monomial: Monomial,
}

impl BasisElement {
    pub fn degree(&self) -> u32 {
        self.monomial.degree()
    }
}

/// `B` in the variables of `model`, with `m` written as its chain monomial.
pub fn enumerate_b(model: &ModelPresentation) -> Vec<BasisElement> {
    let bl = &model.blowup;
    let mut escaliers: BTreeMap<usize, Vec<Monomial>> = BTreeMap::new();
    let mut out = Vec::new();
    for f in enumerate_in(&model.data.poset, &model.data.building, bl) {
        let x = bl.projection(f.top());
        let mu = escaliers
            .entry(x)
            .or_insert_with(|| model.toric_escalier(x));
        let mut m = model.table.one();
        for &(a, e) in &f.chain {
            let v = model.t_var[a].expect("nonzero elements carry variables");
            m = m.mul(&model.table.monomial_from(&[(v, e as u16)]));
        }
        for b in mu.iter() {
            out.push(BasisElement {
                function: f.clone(),
                toric: b.clone(),
                monomial: b.mul(&m),
            });
        }
    }
    out.sort_by(|x, y| {
        x.degree()
            .cmp(&y.degree())
            .then_with(|| y.monomial.cmp(&x.monomial))
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    Am,
    B,
}

/// Both sides of the deletion-contraction recursion for the last member `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionReport {
    pub series: Series,
    pub d: usize,
    pub lhs: Vec<i64>,
    pub deletion: Vec<i64>,
    pub contraction: Vec<i64>,
    pub rhs: Vec<i64>,
}

impl RecursionReport {
    pub fn ok(&self) -> bool {
        self.lhs == self.rhs
    }

    /// `lhs - rhs` by degree.
    pub fn deltas(&self) -> Vec<i64> {
        let n = self.lhs.len().max(self.rhs.len());
        (0..n)
            .map(|i| self.lhs.get(i).unwrap_or(&0) - self.rhs.get(i).unwrap_or(&0))
            .collect()
    }
}

fn gamma(data: &ModelData, series: Series) -> Result<Vec<i64>, AdmissibleError> {
    match series {
        Series::Am => Ok(gamma_am(&data.poset, &data.building)),
        Series::B => gamma_b(data),
    }
}

/// Evaluates `Gamma(G) = Gamma(G') + (y + ... + y^(d-1)) Gamma(G'')` with
/// every series enumerated on its own model.
pub fn check_recursion(
    data: &ModelData,
    series: Series,
) -> Result<RecursionReport, AdmissibleError> {
    let g = data
        .building
        .last()
        .ok_or(PresentationError::EmptyBuilding)?;
    let d = data.poset.rank(g);
    let (del, _) = data.deleted()?;
    let (con, _) = data.contracted()?;
    let lhs = gamma(data, series)?;
    let deletion = gamma(&del, series)?;
    let contraction = gamma(&con, series)?;
    let rhs = blowup_hilbert(&deletion, &contraction, d).expect("members have positive rank");
    Ok(RecursionReport {
        series,
        d,
        lhs,
        deletion,
        contraction,
        rhs,
    })
}

/// Checks the recursion for the last member, deletes it and repeats until
/// the building set is empty.
pub fn peel_down(
    data: &ModelData,
    series: Series,
) -> Result<Vec<RecursionReport>, AdmissibleError> {
    let mut out = Vec::new();
    let mut cur = data.clone();
    while !cur.building.is_empty() {
        out.push(check_recursion(&cur, series)?);
        cur = cur.deleted()?.0;
    }
    Ok(out)
}

/// Which incomparable pair `flag_decomposition` resolves first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOrder {
    First,
    Last,
}

/// Rewrites `f` with relation (iii) until every monomial is a flag monomial
/// in the `t` variables.
pub fn flag_decomposition(
    model: &ModelPresentation,
    f: &Polynomial,
    order: PairOrder,
) -> Result<Polynomial, AdmissibleError> {
    let bl = &model.blowup.poset;
    let mut done = Polynomial::zero();
    let mut work: Vec<(Monomial, Int)> = f.terms().to_vec();
    while let Some((m, c)) = work.pop() {
        let elems: Vec<usize> = m
            .support()
            .iter()
            .filter_map(|&v| model.element_of_var(v))
            .collect();
        let mut pairs = Vec::new();
        for (i, &a) in elems.iter().enumerate() {
            for &b in &elems[i + 1..] {
                if !bl.comparable(a, b) {
                    pairs.push((a, b));
                }
            }
        }
        let pick = match order {
            PairOrder::First => pairs.first(),
            PairOrder::Last => pairs.last(),
        };
        let Some(&(a, b)) = pick else {
            done = done.add(&Polynomial::term(m, c));
            continue;
        };
        let joins = bl.joins(a, b);
        if joins.is_empty() {
            continue;
        }
        let meets = bl.meets(a, b);
        let [meet] = meets.as_slice() else {
            return Err(AdmissibleError::MeetNotUnique(
                bl.label(a).to_string(),
                bl.label(b).to_string(),
            ));
        };
        let ab = model.t(a).mul(&model.t(b));
        let rest = Polynomial::term(ab.lm().quotient_of(&m), c);
        let mut sum = Polynomial::zero();
        for &x in &joins {
            sum = sum.add(&model.t(x));
        }
        work.extend(rest.mul(&model.t(*meet)).mul(&sum).terms().iter().cloned());
    }
    Ok(done)
}

/// True when every `t` variable of `m` lies on one chain.
pub fn is_flag(model: &ModelPresentation, m: &Monomial) -> bool {
    let elems: Vec<usize> = m
        .support()
        .iter()
        .filter_map(|&v| model.element_of_var(v))
        .collect();
    elems.iter().enumerate().all(|(i, &a)| {
        elems[i + 1..]
            .iter()
            .all(|&b| model.blowup.poset.comparable(a, b))
    })
}
