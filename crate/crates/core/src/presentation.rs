//! The presentation of the cohomology of a toric wonderful model: toric
//! relations, the blowup ideal, the Gröbner set `alpha`, Betti numbers and
//! the restriction map to the closure of the last blown-up layer.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arrangement::LayerPoset;
use crate::fan::{restrict_fan, Fan};
use crate::intlinalg::{complement_basis, dot, Int, LinAlgError, Sublattice};
use crate::polyring::{
    buchberger, graded_rank_oracle, is_groebner, normal_form, standard_monomials, GroebnerCheck,
    Monomial, PolyError, Polynomial, VariableTable,
};
use crate::poset::{
    blowup_building, contraction, contraction_isomorphism, deletion, BlowupPoset, BuildingSet,
    NestedSet, PosetError, RankedPoset,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("fan is not smooth")]
    NotSmooth,
    #[error("{0} layer lattices for {1} poset elements")]
    LatticeCount(usize, usize),
    #[error("{0} and {1} have a nonempty join but no unique meet")]
    MeetNotUnique(String, String),
    #[error("relation {0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("empty building set")]
    EmptyBuilding,
    #[error("{0}")]
    Contraction(String),
    #[error("monomial counts too large for the oracle in degree {0}")]
    OracleLimit(u32),
}

/// Everything a model depends on: a ranked poset of layers, the character
/// lattice of each layer, a building set and a smooth fan. The fan may live
/// in a sublattice (closures of layers); rays are in ambient coordinates.
#[derive(Clone, Debug)]
pub struct ModelData {
    pub poset: RankedPoset,
    pub lattices: Vec<Sublattice>,
    pub building: BuildingSet,
    pub fan: Fan,
}

impl ModelData {
    pub fn new(
        poset: RankedPoset,
        lattices: Vec<Sublattice>,
        building: BuildingSet,
        fan: Fan,
    ) -> Result<Self, PresentationError> {
        if lattices.len() != poset.len() {
            return Err(PresentationError::LatticeCount(lattices.len(), poset.len()));
        }
        if !fan.is_smooth() {
            return Err(PresentationError::NotSmooth);
        }
        Ok(ModelData {
            poset,
            lattices,
            building,
            fan,
        })
    }

    pub fn from_layers(
        lp: &LayerPoset,
        building: BuildingSet,
        fan: Fan,
    ) -> Result<Self, PresentationError> {
        let lattices = lp.layers.iter().map(|l| l.lattice().clone()).collect();
        Self::new(lp.poset.clone(), lattices, building, fan)
    }

    /// The model for the building set without its last member.
    pub fn deleted(&self) -> Result<(ModelData, Vec<usize>), PresentationError> {
        let d = deletion(&self.poset, &self.building)?;
        let lattices = d.map.iter().map(|&i| self.lattices[i].clone()).collect();
        Ok((
            ModelData::new(d.poset, lattices, d.building, self.fan.clone())?,
            d.map,
        ))
    }

    /// The model of the closure of the last member's layer: the contraction
    /// `L_{>= G}` with building set `G_G` and fan `Delta ∩ Ann(Gamma_G)`.
    pub fn contracted(&self) -> Result<(ModelData, Vec<usize>), PresentationError> {
        let g = self
            .building
            .last()
            .ok_or(PresentationError::EmptyBuilding)?;
        let c = contraction(&self.poset, &self.building, g)?;
        let lattices = c.map.iter().map(|&i| self.lattices[i].clone()).collect();
        let fan = restrict_fan(&self.fan, &self.lattices[g]);
        Ok((ModelData::new(c.poset, lattices, c.building, fan)?, c.map))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    /// `c_r t_a` with `r` outside the annihilator.
    Vanishing,
    /// The Chern-type relation attached to a cover.
    Chern,
    /// The product of two incomparable variables.
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub kind: RelationKind,
    pub label: String,
    pub poly: Polynomial,
    /// Leading monomial the relation is expected to have: `t_b t_G^(s-1)`
    /// for a cover, `t_a t_b` for an incomparable pair.
    pub claim: Option<Monomial>,
}

impl Relation {
    /// True when a claimed leading monomial differs from the actual one.
    pub fn claim_fails(&self) -> bool {
        self.claim
            .as_ref()
            .is_some_and(|m| self.poly.is_zero() || m != self.poly.lm())
    }
}

/// How the complement bases in the Chern-type relations are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ChiChoice {
    /// The canonical basis of `complement_basis`.
    #[default]
    Canonical,
    /// Canonical basis with every vector negated.
    Negated,
}

/// Comparison in the total order on nested sets: `Greater` iff `a ≻ b`.
/// Members are compared by listing position (earlier is larger), a strict
/// extension is larger than its prefix, and ties go to the larger top.
pub fn nested_succ_cmp(g: &BuildingSet, a: &NestedSet, b: &NestedSet) -> Ordering {
    for (x, y) in a.members.iter().zip(&b.members) {
        let (px, py) = (g.position(*x), g.position(*y));
        if px != py {
            return py.cmp(&px);
        }
    }
    a.members
        .len()
        .cmp(&b.members.len())
        .then(a.top.cmp(&b.top))
}

/// How the `t` variables are ordered among themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VariableOrder {
    /// `t_a > t_b` iff `a ≺ b` in `nested_succ_cmp`.
    Literal,
    /// Variables grouped by the rank of the top, lower first. For the same
    /// rank, a set `S ∪ {x}` with top `x` and rank gap at least 2 between
    /// `x` and the join of `S` comes before the atom-like sets, and a gap of
    /// 1 comes after them. Ties fall back to the literal order.
    #[default]
    Split,
}

fn split_key(p: &RankedPoset, s: &NestedSet) -> (usize, u8) {
    let rest: Vec<usize> = s.members.iter().copied().filter(|&m| m != s.top).collect();
    let class = if rest.len() == s.members.len() || rest.is_empty() {
        1
    } else {
        let j = p
            .join_below(&rest, s.top)
            .expect("nested members have a join below the top");
        if p.rank(s.top) - p.rank(j) >= 2 {
            0
        } else {
            2
        }
    };
    (p.rank(s.top), class)
}

/// Variable name of a nested set: `t{S}` when the top is the only join of
/// `S`, `t({S},X)` otherwise.
fn t_name(p: &RankedPoset, s: &NestedSet) -> String {
    let names: Vec<&str> = s.members.iter().map(|&m| p.label(m)).collect();
    if p.joins_of(&s.members) == [s.top] {
        format!("t{{{}}}", names.join(","))
    } else {
        format!("t({{{}}},{})", names.join(","), p.label(s.top))
    }
}

/// Minimal non-faces of the cone complex, as sorted ray index sets.
pub fn minimal_non_faces(f: &Fan) -> Vec<Vec<usize>> {
    let faces: BTreeSet<Vec<usize>> = f.all_cones().into_iter().collect();
    let n = f.rays().len();
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 1..=f.dim() + 1 {
        let mut next = Vec::new();
        for base in &current {
            let start = base.last().map_or(0, |&l| l + 1);
            for r in start..n {
                let mut cand = base.clone();
                cand.push(r);
                let subs_ok = (0..cand.len()).all(|k| {
                    let mut sub = cand.clone();
                    sub.remove(k);
                    faces.contains(&sub)
                });
                if !subs_ok {
                    continue;
                }
                if faces.contains(&cand) {
                    next.push(cand);
                } else {
                    out.push(cand);
                }
            }
        }
        current = next;
    }
    out
}

/// Generators of `L_Delta` in the variables `vars[i]` for ray `i`:
/// monomials of minimal non-faces and one linear form per dual basis vector.
pub fn toric_relations(f: &Fan, table: &VariableTable, vars: &[usize]) -> Vec<Polynomial> {
    let mut out = Vec::new();
    for nf in minimal_non_faces(f) {
        let m = table.monomial_from(&nf.iter().map(|&r| (vars[r], 1)).collect::<Vec<_>>());
        out.push(Polynomial::term(m, Int::one()));
    }
    for row in f.linear_relations() {
        let terms = row
            .iter()
            .enumerate()
            .map(|(r, c)| (table.var(vars[r]), c.clone()))
            .collect();
        let p = Polynomial::from_terms(terms);
        if !p.is_zero() {
            out.push(p.normalized_sign());
        }
    }
    out
}

/// Gröbner basis of `L_Delta` in a table holding only the c variables,
/// listed in `order`.
pub fn toric_basis(
    f: &Fan,
    order: &[usize],
) -> Result<(VariableTable, Vec<Polynomial>), PresentationError> {
    let names = order
        .iter()
        .map(|&r| format!("c{}", f.ray_ids()[r] + 1))
        .collect();
    let table = VariableTable::new(names, vec![1; order.len()]);
    let mut vars = vec![0; order.len()];
    for (k, &r) in order.iter().enumerate() {
        vars[r] = k;
    }
    let gb = buchberger(
        &toric_relations(f, &table, &vars),
        table.weights(),
        Some(f.dim() as u32 + 1),
    )?;
    Ok((table, gb))
}

/// The c-order used throughout: lead-cone rays first in cone order, then
/// the other rays in the first candidate order whose toric Gröbner basis
/// has unit leading coefficients. Candidates are ascending, descending and
/// their rotations; if none qualifies the ascending order is kept.
pub fn c_order(f: &Fan) -> Result<Vec<usize>, PresentationError> {
    let lead: Vec<usize> = f.lead_cone().map(|c| c.to_vec()).unwrap_or_default();
    let rest: Vec<usize> = (0..f.rays().len()).filter(|r| !lead.contains(r)).collect();
    let mut candidates = Vec::new();
    for k in 0..rest.len().max(1) {
        let mut asc = rest.clone();
        asc.rotate_left(k);
        let mut desc = asc.clone();
        desc.reverse();
        candidates.push(asc);
        candidates.push(desc);
    }
    for cand in &candidates {
        let order: Vec<usize> = lead.iter().chain(cand).copied().collect();
        let (_, gb) = toric_basis(f, &order)?;
        if gb.iter().all(|g| g.lc().abs().is_one()) {
            return Ok(order);
        }
    }
    Ok(lead.into_iter().chain(rest).collect())
}

/// Betti numbers of a smooth complete toric variety (halved degrees) from
/// the escalier of a Gröbner basis of `L_Delta`.
pub fn toric_betti(f: &Fan) -> Result<Vec<usize>, PresentationError> {
    let (table, gb) = toric_basis(f, &c_order(f)?)?;
    Ok((0..=f.dim() as u32)
        .map(|d| standard_monomials(&gb, &table, d).free.len())
        .collect())
}

/// Toric Betti numbers by two routes, in degrees `0..=dim + 1`.
#[derive(Clone, Debug)]
pub struct ToricReport {
    pub escalier: Vec<usize>,
    pub oracle: Vec<usize>,
    pub torsion: Vec<(u32, Int)>,
}

impl ToricReport {
    pub fn consistent(&self) -> bool {
        self.escalier == self.oracle && self.torsion.is_empty()
    }

    /// Escalier counts in degrees `0..=dim`.
    pub fn betti(&self) -> &[usize] {
        &self.escalier[..self.escalier.len() - 1]
    }
}

/// Escalier of the toric Gröbner basis against SNF ranks of `L_Delta`.
pub fn toric_report(f: &Fan, oracle_limit: usize) -> Result<ToricReport, PresentationError> {
    let order = c_order(f)?;
    let (table, gb) = toric_basis(f, &order)?;
    let mut vars = vec![0; f.rays().len()];
    for (k, &r) in order.iter().enumerate() {
        vars[r] = k;
    }
    let gens = toric_relations(f, &table, &vars);
    let cap = f.dim() as u32 + 1;
    let mut report = ToricReport {
        escalier: Vec::new(),
        oracle: Vec::new(),
        torsion: Vec::new(),
    };
    for d in 0..=cap {
        report
            .escalier
            .push(standard_monomials(&gb, &table, d).free.len());
        let o = graded_rank_oracle(&gens, &table, d, oracle_limit).map_err(|e| match e {
            PolyError::TooManyMonomials { degree, .. } => PresentationError::OracleLimit(degree),
            other => PresentationError::Poly(other),
        })?;
        report.oracle.push(o.free_rank);
        report.torsion.extend(o.torsion.into_iter().map(|t| (d, t)));
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct ModelPresentation {
    pub data: ModelData,
    pub blowup: BlowupPoset,
    pub table: VariableTable,
    /// Variable of each blowup element (`None` for the empty nested set).
    pub t_var: Vec<Option<usize>>,
    /// Variable of each ray of the fan.
    pub c_var: Vec<usize>,
    pub toric: Vec<Polynomial>,
    pub relations: Vec<Relation>,
    pub beta: Vec<Polynomial>,
    /// `beta` of the restricted fan over each layer (by poset index).
    pub beta_restricted: BTreeMap<usize, Vec<Polynomial>>,
    pub alpha: Vec<Polynomial>,
    pub cap: u32,
}

impl ModelPresentation {
    pub fn new(data: ModelData) -> Result<Self, PresentationError> {
        Self::with_chi(data, ChiChoice::Canonical)
    }

    pub fn with_chi(data: ModelData, chi: ChiChoice) -> Result<Self, PresentationError> {
        Self::with_options(data, chi, VariableOrder::default())
    }

    pub fn with_order(data: ModelData, order: VariableOrder) -> Result<Self, PresentationError> {
        Self::with_options(data, ChiChoice::Canonical, order)
    }

    pub fn with_options(
        data: ModelData,
        chi: ChiChoice,
        order: VariableOrder,
    ) -> Result<Self, PresentationError> {
        let blowup = blowup_building(&data.poset, &data.building);
        let fan = &data.fan;
        let mut t_elems: Vec<usize> = (1..blowup.len()).collect();
        match order {
            VariableOrder::Literal => t_elems.sort_by(|&a, &b| {
                nested_succ_cmp(&data.building, &blowup.nested[a], &blowup.nested[b])
            }),
            VariableOrder::Split => t_elems.sort_by(|&a, &b| {
                let (x, y) = (&blowup.nested[a], &blowup.nested[b]);
                split_key(&data.poset, x)
                    .cmp(&split_key(&data.poset, y))
                    .then_with(|| nested_succ_cmp(&data.building, x, y))
            }),
        }
        let c_elems = c_order(fan)?;
        let mut names = Vec::new();
        let mut weights = Vec::new();
        let mut t_var = vec![None; blowup.len()];
        for (k, &a) in t_elems.iter().enumerate() {
            t_var[a] = Some(k);
            names.push(t_name(&data.poset, &blowup.nested[a]));
            weights.push(blowup.nested[a].rank() as u32);
        }
        let mut c_var = vec![0; fan.rays().len()];
        for (k, &r) in c_elems.iter().enumerate() {
            c_var[r] = t_elems.len() + k;
            names.push(format!("c{}", fan.ray_ids()[r] + 1));
            weights.push(1);
        }
        let table = VariableTable::new(names, weights);
        let cap = fan.dim() as u32 + 1;
        let toric = toric_relations(fan, &table, &c_var);
        let beta = buchberger(&toric, table.weights(), Some(cap))?;
        let mut model = ModelPresentation {
            data,
            blowup,
            table,
            t_var,
            c_var,
            toric,
            relations: Vec::new(),
            beta,
            beta_restricted: BTreeMap::new(),
            alpha: Vec::new(),
            cap,
        };
        model.relations = model.relations_i(chi)?;
        model.build_alpha()?;
        Ok(model)
    }

    fn one(&self) -> Monomial {
        self.table.one()
    }

    /// `t_a` as a polynomial, with `t_0 = 1`.
    pub fn t(&self, a: usize) -> Polynomial {
        match self.t_var[a] {
            Some(v) => Polynomial::term(self.table.var(v), Int::one()),
            None => Polynomial::term(self.one(), Int::one()),
        }
    }

    pub fn c(&self, r: usize) -> Polynomial {
        Polynomial::term(self.table.var(self.c_var[r]), Int::one())
    }

    /// Blowup element of a `t` variable.
    pub fn element_of_var(&self, v: usize) -> Option<usize> {
        self.t_var.iter().position(|&x| x == Some(v))
    }

    pub fn t_label(&self, a: usize) -> String {
        match self.t_var[a] {
            Some(v) => self.table.name(v).to_string(),
            None => "1".to_string(),
        }
    }

    fn gamma(&self, a: usize) -> &Sublattice {
        &self.data.lattices[self.blowup.projection(a)]
    }

    /// True iff ray `r` annihilates the lattice of the layer `x`.
    pub fn in_ann(&self, x: usize, r: usize) -> bool {
        let ray = &self.data.fan.rays()[r];
        self.data.lattices[x]
            .basis_rows()
            .iter()
            .all(|chi| dot(chi, ray).is_zero())
    }

    /// `-sum_r min(0, <chi, r>) c_r`.
    fn chern_factor(&self, chi: &[Int]) -> Polynomial {
        let terms = (0..self.data.fan.rays().len())
            .filter_map(|r| {
                let v = dot(chi, &self.data.fan.rays()[r]);
                (v < Int::zero()).then(|| (self.table.var(self.c_var[r]), -v))
            })
            .collect();
        Polynomial::from_terms(terms)
    }

    /// `tau_F = -sum_{H in G, H >= F} t_{H}`.
    fn tau(&self, f: usize) -> Polynomial {
        let p = &self.data.poset;
        let terms = self
            .data
            .building
            .members()
            .iter()
            .filter(|&&h| p.leq(f, h))
            .map(|&h| {
                let a = self
                    .blowup
                    .atom_of(h)
                    .expect("every member is an atom of the blowup");
                (
                    self.table
                        .var(self.t_var[a].expect("atoms carry variables")),
                    -Int::one(),
                )
            })
            .collect();
        Polynomial::from_terms(terms)
    }

    fn relations_i(&self, chi: ChiChoice) -> Result<Vec<Relation>, PresentationError> {
        let bl = &self.blowup;
        let lp = &self.data.poset;
        let mut out = Vec::new();
        // (i)
        for a in 1..bl.len() {
            let x = bl.projection(a);
            for r in 0..self.data.fan.rays().len() {
                if !self.in_ann(x, r) {
                    out.push(Relation {
                        kind: RelationKind::Vanishing,
                        label: format!("c{}*{}", self.data.fan.ray_ids()[r] + 1, self.t_label(a)),
                        poly: self.c(r).mul(&self.t(a)),
                        claim: None,
                    });
                }
            }
        }
        // (ii)
        for (a, b) in bl.poset.covers() {
            let (xa, xb) = (bl.projection(a), bl.projection(b));
            if !lp.lt(xa, xb) {
                continue;
            }
            let g = *bl.nested[b]
                .members
                .iter()
                .find(|m| !bl.nested[a].members.contains(m))
                .expect("a cover adds one member");
            let s = self.data.lattices[xb].rank() - self.data.lattices[xa].rank();
            let mut lead = Polynomial::zero();
            for &c in bl.poset.upper_covers(a) {
                if lp.leq(xb, bl.projection(c)) {
                    lead = lead.sub(&self.t(c));
                }
            }
            let tau = self.tau(g);
            let tg = self.t(self
                .blowup
                .atom_of(g)
                .expect("every member is an atom of the blowup"));
            let mut claim = self.t(b);
            for _ in 1..s {
                lead = lead.mul(&tau);
                claim = claim.mul(&tg);
            }
            let mut chis = complement_basis(self.gamma(a), self.gamma(b))?;
            if chi == ChiChoice::Negated {
                chis = chis
                    .into_iter()
                    .map(|v| v.into_iter().map(|x| -x).collect())
                    .collect();
            }
            let mut tail = self.t(a);
            for c in &chis {
                tail = tail.mul(&self.chern_factor(c));
            }
            let poly = lead.add(&tail);
            let label = format!("Q[{} < {}]", self.t_label(a), self.t_label(b));
            if !poly.is_homogeneous() {
                return Err(PresentationError::NotHomogeneous(label));
            }
            out.push(Relation {
                kind: RelationKind::Chern,
                label,
                poly,
                claim: Some(claim.lm().clone()),
            });
        }
        // (iii)
        for a in 1..bl.len() {
            for b in a + 1..bl.len() {
                if bl.poset.comparable(a, b) {
                    continue;
                }
                let prod = self.t(a).mul(&self.t(b));
                let claim = Some(prod.lm().clone());
                let joins = bl.poset.joins(a, b);
                let poly = if joins.is_empty() {
                    prod
                } else {
                    let meets = bl.poset.meets(a, b);
                    let [m] = meets.as_slice() else {
                        return Err(PresentationError::MeetNotUnique(
                            bl.poset.label(a).to_string(),
                            bl.poset.label(b).to_string(),
                        ));
                    };
                    let mut sum = Polynomial::zero();
                    for &c in &joins {
                        sum = sum.add(&self.t(c));
                    }
                    prod.sub(&self.t(*m).mul(&sum))
                };
                let label = format!("{}*{}", self.t_label(a), self.t_label(b));
                if !poly.is_homogeneous() {
                    return Err(PresentationError::NotHomogeneous(label));
                }
                out.push(Relation {
                    kind: RelationKind::Incomparable,
                    label,
                    poly,
                    claim,
                });
            }
        }
        Ok(out)
    }

    /// Gröbner basis of the toric ideal of `Delta ∩ Ann(Gamma_x)` in the
    /// model's c-variables.
    /// c variables of the rays of `Delta ∩ Ann(Gamma_x)`.
    pub fn restricted_c_vars(&self, x: usize) -> Vec<usize> {
        let sub = restrict_fan(&self.data.fan, &self.data.lattices[x]);
        sub.ray_ids()
            .iter()
            .map(|id| {
                let r = self
                    .data
                    .fan
                    .ray_ids()
                    .iter()
                    .position(|j| j == id)
                    .expect("restricted ray is a ray");
                self.c_var[r]
            })
            .collect()
    }

    fn restricted_beta(&self, x: usize) -> Result<Vec<Polynomial>, PresentationError> {
        let sub = restrict_fan(&self.data.fan, &self.data.lattices[x]);
        let rel = toric_relations(&sub, &self.table, &self.restricted_c_vars(x));
        Ok(buchberger(&rel, self.table.weights(), Some(self.cap))?)
    }

    /// Escalier of `beta_{Delta_x}` in all degrees; `x = 0` gives the
    /// escalier of `beta_Delta`.
    pub fn toric_escalier(&self, x: usize) -> Vec<Monomial> {
        let (vars, basis) = if x == 0 {
            (self.c_var.clone(), &self.beta)
        } else {
            (self.restricted_c_vars(x), &self.beta_restricted[&x])
        };
        let mut out = Vec::new();
        for d in 0..=self.dim() as u32 {
            for m in self.table.monomials_of_degree_in(&vars, d) {
                if !basis.iter().any(|g| g.lm().divides(&m)) {
                    out.push(m);
                }
            }
        }
        out
    }

    fn build_alpha(&mut self) -> Result<(), PresentationError> {
        let mut seen = std::collections::HashSet::new();
        let mut alpha = Vec::new();
        let mut push = |p: Polynomial, alpha: &mut Vec<Polynomial>| {
            let p = p.normalized_sign();
            if !p.is_zero() && seen.insert(p.clone()) {
                alpha.push(p);
            }
        };
        let tops: BTreeSet<usize> = (1..self.blowup.len())
            .map(|a| self.blowup.projection(a))
            .collect();
        for x in tops {
            let b = self.restricted_beta(x)?;
            self.beta_restricted.insert(x, b);
        }
        for a in 1..self.blowup.len() {
            let ta = self.t(a);
            for b in &self.beta_restricted[&self.blowup.projection(a)] {
                push(ta.mul(b), &mut alpha);
            }
        }
        for b in &self.beta {
            push(b.clone(), &mut alpha);
        }
        for r in &self.relations {
            push(r.poly.clone(), &mut alpha);
        }
        self.alpha = alpha;
        Ok(())
    }

    /// Generators of `I_G + L_Delta`.
    pub fn ideal_generators(&self) -> Vec<Polynomial> {
        self.toric
            .iter()
            .cloned()
            .chain(self.relations.iter().map(|r| r.poly.clone()))
            .collect()
    }

    pub fn relation_counts(&self) -> [usize; 3] {
        let count = |k| self.relations.iter().filter(|r| r.kind == k).count();
        [
            count(RelationKind::Vanishing),
            count(RelationKind::Chern),
            count(RelationKind::Incomparable),
        ]
    }

    /// Relations whose actual leading monomial differs from the claimed one.
    pub fn claim_mismatches(&self) -> Vec<&Relation> {
        self.relations.iter().filter(|r| r.claim_fails()).collect()
    }

    pub fn dim(&self) -> usize {
        self.data.fan.dim()
    }

    /// S- and G-polynomial check of `alpha` up to the degree cap.
    pub fn verify_groebner(&self) -> Result<GroebnerCheck, PresentationError> {
        Ok(is_groebner(
            &self.alpha,
            self.table.weights(),
            Some(self.cap),
        )?)
    }

    /// Standard monomials of `alpha` in each degree `0..=cap`.
    pub fn escalier(&self) -> Vec<crate::polyring::StandardMonomials> {
        (0..=self.cap)
            .map(|d| standard_monomials(&self.alpha, &self.table, d))
            .collect()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        normal_form(f, &self.alpha)
    }

    /// Betti numbers with the three-way check: `alpha` is a Gröbner basis,
    /// escalier counts equal the oracle ranks of the original generators in
    /// every degree up to the cap, and there is no torsion.
    pub fn betti(&self, oracle_limit: usize) -> Result<BettiReport, PresentationError> {
        let groebner = self.verify_groebner()?;
        let esc = self.escalier();
        let gens = self.ideal_generators();
        let mut oracle = Vec::new();
        let mut torsion = Vec::new();
        for d in 0..=self.cap {
            let o =
                graded_rank_oracle(&gens, &self.table, d, oracle_limit).map_err(|e| match e {
                    PolyError::TooManyMonomials { degree, .. } => {
                        PresentationError::OracleLimit(degree)
                    }
                    other => PresentationError::Poly(other),
                })?;
            oracle.push(o.free_rank);
            torsion.extend(o.torsion.iter().map(|t| (d, t.clone())));
        }
        let escalier: Vec<usize> = esc.iter().map(|s| s.free.len()).collect();
        let suspects: usize = esc.iter().map(|s| s.torsion_suspect.len()).sum();
        let n = self.dim();
        Ok(BettiReport {
            betti: escalier[..=n].to_vec(),
            escalier,
            oracle,
            torsion,
            torsion_suspects: suspects,
            groebner,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BettiReport {
    /// Escalier counts in degrees `0..=n`.
    pub betti: Vec<usize>,
    /// Escalier counts in degrees `0..=cap`.
    pub escalier: Vec<usize>,
    /// Oracle free ranks in degrees `0..=cap`.
    pub oracle: Vec<usize>,
    pub torsion: Vec<(u32, Int)>,
    pub torsion_suspects: usize,
    pub groebner: GroebnerCheck,
}

impl BettiReport {
    pub fn consistent(&self) -> bool {
        self.groebner.ok()
            && self.escalier == self.oracle
            && self.torsion.is_empty()
            && self.torsion_suspects == 0
    }
}

/// `hY + (y + ... + y^{d-1}) hZ`, coefficient lists indexed by degree.
pub fn blowup_hilbert(hy: &[i64], hz: &[i64], d: usize) -> Option<Vec<i64>> {
    if d < 1 {
        return None;
    }
    let len = hy.len().max(hz.len() + d - 1);
    let mut out = vec![0; len];
    for (i, v) in hy.iter().enumerate() {
        out[i] += v;
    }
    for shift in 1..d {
        for (i, v) in hz.iter().enumerate() {
            out[i + shift] += v;
        }
    }
    while out.len() > 1 && out.last() == Some(&0) {
        out.pop();
    }
    Some(out)
}

#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub source_generators: usize,
    /// Labels and normal forms of generators whose image is not zero.
    pub failures: Vec<(String, String)>,
    /// Images of the source variables, as strings in the target ring.
    pub images: Vec<(String, String)>,
}

impl RestrictionReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that the map from the model without the last member to the model
/// of the last member's layer closure, `c_r -> c_r` on the annihilator and
/// `0` elsewhere, `t_a -> sum_{c in a v g} t_c`, kills every generator.
pub fn restriction_map_check(data: &ModelData) -> Result<RestrictionReport, PresentationError> {
    let g = data
        .building
        .last()
        .ok_or(PresentationError::EmptyBuilding)?;
    let (dd, dmap) = data.deleted()?;
    let (cd, _) = data.contracted()?;
    let source = ModelPresentation::new(dd)?;
    let target = ModelPresentation::new(cd)?;
    let full = blowup_building(&data.poset, &data.building);
    let gi = full.atom_of(g).expect("last member is an atom");
    let iso: BTreeMap<usize, usize> =
        contraction_isomorphism(&data.poset, &data.building, &full, gi)
            .map_err(PresentationError::Contraction)?
            .into_iter()
            .collect();
    let mut images = vec![Polynomial::zero(); source.table.len()];
    for a in 1..source.blowup.len() {
        let s = &source.blowup.nested[a];
        let mut members: Vec<usize> = s.members.iter().map(|&m| dmap[m]).collect();
        members.sort_by_key(|&m| data.building.position(m));
        let lifted = NestedSet {
            members,
            top: dmap[s.top],
        };
        let fa = full.index_of(&lifted).ok_or_else(|| {
            PresentationError::Contraction(format!(
                "{} is not nested for the full building set",
                source.t_label(a)
            ))
        })?;
        let mut img = Polynomial::zero();
        for c in full.poset.joins(fa, gi) {
            img = img.add(&target.t(iso[&c]));
        }
        images[source.t_var[a].expect("nonempty")] = img;
    }
    let ray_ids = target.data.fan.ray_ids();
    for r in 0..source.data.fan.rays().len() {
        let id = source.data.fan.ray_ids()[r];
        if let Some(tr) = ray_ids.iter().position(|&j| j == id) {
            images[source.c_var[r]] = target.c(tr);
        }
    }
    let one = target.one();
    let mut failures = Vec::new();
    let gens: Vec<(String, Polynomial)> = source
        .toric
        .iter()
        .map(|p| (source.table.format(p), p.clone()))
        .chain(
            source
                .relations
                .iter()
                .map(|r| (r.label.clone(), r.poly.clone())),
        )
        .collect();
    for (label, p) in &gens {
        let nf = target.normal_form(&p.substitute(&images, &one));
        if !nf.is_zero() {
            failures.push((label.clone(), target.table.format(&nf)));
        }
    }
    let images = (0..source.table.len())
        .map(|v| {
            (
                source.table.name(v).to_string(),
                target.table.format(&images[v]),
            )
        })
        .collect();
    Ok(RestrictionReport {
        source_generators: gens.len(),
        failures,
        images,
    })
}
