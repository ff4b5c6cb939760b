//! Toric arrangements with torsion phases and their posets of layers.
//!
//! A layer `{t : chi(t) = phi(chi) for chi in Gamma}` is stored as a
//! saturated character lattice together with the phase of each basis
//! character, written additively as a rational number modulo 1 (so `1/3`
//! stands for a primitive cube root of unity). Only phases of finite order
//! are modelled; an arbitrary value in `C*` would need a phase group with a
//! free part, which is not implemented.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::intlinalg::{hnf, snf, Int, IntMatrix, LinAlgError, Sublattice};
use crate::poset::{PosetError, RankedPoset};

#[derive(Debug, Error)]
pub enum ArrangementError {
    #[error("ambient rank mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("subtorus {0}: phase count {1} does not match character count {2}")]
    PhaseCount(String, usize, usize),
    #[error("subtorus {0}: character lattice is not saturated (index {1}); split it into connected components")]
    NotSaturated(String, Int),
    #[error("subtorus {0} is empty: its phases are inconsistent")]
    Empty(String),
    #[error("subtorus {0} has rank 0")]
    Trivial(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Reduces a rational into `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// A connected subtorus (coset) in canonical form: HNF basis of a saturated
/// lattice and the phase of each basis row.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Layer {
    lattice: Sublattice,
    phase: Vec<BigRational>,
}

impl fmt::Debug for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_label())
    }
}

impl Layer {
    pub fn whole_torus(n: usize) -> Self {
        Layer {
            lattice: Sublattice::zero(n),
            phase: Vec::new(),
        }
    }

    /// The coset cut out by `chars[i] = phase[i]`. Returns `Ok(None)` when the
    /// equations are inconsistent; the generated lattice must be saturated.
    pub fn from_equations(
        n: usize,
        chars: &[Vec<Int>],
        phase: &[BigRational],
    ) -> Result<Option<Self>, ArrangementError> {
        assert_eq!(chars.len(), phase.len());
        let m = IntMatrix::from_rows(n, chars);
        let sub = Sublattice::from_matrix(&m);
        let index = sub.saturation_index();
        if !index.is_one() {
            return Err(ArrangementError::NotSaturated(String::new(), index));
        }
        Ok(Self::canonicalize(&m, phase))
    }

    /// Canonical form of the coset with generator rows `m` and phases `p`:
    /// dependent rows must carry zero phase.
    fn canonicalize(m: &IntMatrix, p: &[BigRational]) -> Option<Self> {
        let h = hnf(m);
        let mut phase = Vec::with_capacity(h.rank);
        for i in 0..m.rows() {
            let combo: BigRational = (0..m.rows())
                .map(|j| BigRational::from_integer(h.u.get(i, j).clone()) * &p[j])
                .fold(BigRational::zero(), |a, b| a + b);
            let combo = frac(&combo);
            if i < h.rank {
                phase.push(combo);
            } else if !combo.is_zero() {
                return None;
            }
        }
        let rows: Vec<Vec<Int>> = (0..h.rank).map(|i| h.h.row(i).to_vec()).collect();
        let lattice = Sublattice::new(m.cols(), &rows).expect("dimensions agree");
        debug_assert_eq!(lattice.basis_rows(), rows);
        Some(Layer { lattice, phase })
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn phase(&self) -> &[BigRational] {
        &self.phase
    }

    /// Codimension.
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn ambient_rank(&self) -> usize {
        self.lattice.ambient_rank()
    }

    /// Phase of an arbitrary character of the lattice.
    pub fn phase_of(&self, chi: &[Int]) -> Option<BigRational> {
        let c = self.lattice.coordinates(chi)?;
        let v = c
            .iter()
            .zip(&self.phase)
            .map(|(ci, pi)| BigRational::from_integer(ci.clone()) * pi)
            .fold(BigRational::zero(), |a, b| a + b);
        Some(frac(&v))
    }

    /// `self` contains `other` (reverse inclusion makes `other` larger in
    /// the poset of layers).
    pub fn contains_layer(&self, other: &Layer) -> bool {
        if !self.lattice.is_subset_of(&other.lattice) {
            return false;
        }
        let rows = self.lattice.basis_rows();
        rows.iter()
            .zip(&self.phase)
            .all(|(chi, p)| other.phase_of(chi).as_ref() == Some(p))
    }

    pub fn canonical_label(&self) -> String {
        let rows: Vec<String> = self
            .lattice
            .basis_rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        let ph: Vec<String> = self.phase.iter().map(|p| p.to_string()).collect();
        format!("[{}]@[{}]", rows.join(";"), ph.join(","))
    }
}

/// Connected components of `k1 ∩ k2`, sorted by phase vector.
///
/// With `M` the stacked generators and `U M V = D`, the rows of `U M` are
/// `d_i e_i` for the basis `e_i` of the saturation given by the rows of
/// `V^{-1}`. Each `e_i` receives one of the `d_i` solutions of
/// `d_i x = (U p)_i` modulo 1; rows of `U M` beyond the rank must have
/// integral phase for the intersection to be nonempty.
pub fn intersect_layers(k1: &Layer, k2: &Layer) -> Result<Vec<Layer>, ArrangementError> {
    let n = k1.ambient_rank();
    if n != k2.ambient_rank() {
        return Err(ArrangementError::AmbientMismatch(n, k2.ambient_rank()));
    }
    let m = k1.lattice.basis().stack(k2.lattice.basis());
    let p: Vec<BigRational> = k1.phase.iter().chain(&k2.phase).cloned().collect();
    if m.rows() == 0 {
        return Ok(vec![k1.clone()]);
    }
    let s = snf(&m, true);
    let u = s.left.as_ref().expect("transforms requested");
    let v_inv = s.right_inverse.as_ref().expect("transforms requested");
    let up: Vec<BigRational> = (0..m.rows())
        .map(|i| {
            let v = (0..m.rows())
                .map(|j| BigRational::from_integer(u.get(i, j).clone()) * &p[j])
                .fold(BigRational::zero(), |a, b| a + b);
            frac(&v)
        })
        .collect();
    let r = s.rank();
    if up[r..].iter().any(|x| !x.is_zero()) {
        return Ok(Vec::new());
    }
    let basis: Vec<Vec<Int>> = (0..r).map(|i| v_inv.row(i).to_vec()).collect();
    let basis_m = IntMatrix::from_rows(n, &basis);
    let mut choices: Vec<Vec<BigRational>> = vec![Vec::new()];
    for i in 0..r {
        let d = &s.invariant_factors[i];
        let dq = BigRational::from_integer(d.clone());
        let mut next = Vec::new();
        for c in &choices {
            let mut j = Int::zero();
            while &j < d {
                let mut c = c.clone();
                c.push(frac(
                    &((&up[i] + BigRational::from_integer(j.clone())) / &dq),
                ));
                next.push(c);
                j += 1;
            }
        }
        choices = next;
    }
    let mut out: Vec<Layer> = choices
        .iter()
        .map(|ph| Layer::canonicalize(&basis_m, ph).expect("independent rows"))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Subtorus {
    pub label: String,
    pub layer: Layer,
}

#[derive(Clone, Debug)]
pub struct ToricArrangement {
    ambient_rank: usize,
    subtori: Vec<Subtorus>,
}

impl ToricArrangement {
    pub fn new(ambient_rank: usize) -> Self {
        ToricArrangement {
            ambient_rank,
            subtori: Vec::new(),
        }
    }

    /// Adds the subtorus `chars[i] = phase[i]` (phases modulo 1).
    pub fn add(
        &mut self,
        label: &str,
        chars: &[Vec<Int>],
        phase: &[BigRational],
    ) -> Result<(), ArrangementError> {
        if chars.len() != phase.len() {
            return Err(ArrangementError::PhaseCount(
                label.into(),
                phase.len(),
                chars.len(),
            ));
        }
        for c in chars {
            if c.len() != self.ambient_rank {
                return Err(ArrangementError::AmbientMismatch(
                    self.ambient_rank,
                    c.len(),
                ));
            }
        }
        let layer = match Layer::from_equations(self.ambient_rank, chars, phase) {
            Err(ArrangementError::NotSaturated(_, idx)) => {
                return Err(ArrangementError::NotSaturated(label.into(), idx))
            }
            Err(e) => return Err(e),
            Ok(None) => return Err(ArrangementError::Empty(label.into())),
            Ok(Some(l)) => l,
        };
        if layer.rank() == 0 {
            return Err(ArrangementError::Trivial(label.into()));
        }
        self.subtori.push(Subtorus {
            label: label.to_string(),
            layer,
        });
        Ok(())
    }

    pub fn add_i64(
        &mut self,
        label: &str,
        chars: &[&[i64]],
        phase: &[(i64, i64)],
    ) -> Result<(), ArrangementError> {
        let chars: Vec<Vec<Int>> = chars.iter().map(|r| crate::intlinalg::int_vec(r)).collect();
        let phase: Vec<BigRational> = phase
            .iter()
            .map(|&(a, b)| BigRational::new(Int::from(a), Int::from(b)))
            .collect();
        self.add(label, &chars, &phase)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn subtori(&self) -> &[Subtorus] {
        &self.subtori
    }
}

/// The poset of layers together with the layer of each element.
#[derive(Clone, Debug)]
pub struct LayerPoset {
    pub poset: RankedPoset,
    pub layers: Vec<Layer>,
}

impl LayerPoset {
    pub fn find(&self, layer: &Layer) -> Option<usize> {
        self.layers.iter().position(|l| l == layer)
    }
}

/// Closure of the subtori under intersection, ordered by reverse inclusion
/// and ranked by codimension. Elements are sorted by (rank, canonical form)
/// with the whole torus first; subtori keep their labels.
pub fn poset_of_layers(a: &ToricArrangement) -> Result<LayerPoset, ArrangementError> {
    let mut all: BTreeSet<Layer> = a.subtori.iter().map(|s| s.layer.clone()).collect();
    let mut frontier: Vec<Layer> = all.iter().cloned().collect();
    let gens: Vec<Layer> = frontier.clone();
    // intersecting with generators suffices: every layer is a component of
    // an iterated intersection of subtori
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for k in &frontier {
            for g in &gens {
                for c in intersect_layers(k, g)? {
                    if all.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut layers: Vec<Layer> = all.into_iter().collect();
    layers.sort_by(|x, y| (x.rank(), x).cmp(&(y.rank(), y)));
    layers.insert(0, Layer::whole_torus(a.ambient_rank));
    let labels = layers
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                return "0".to_string();
            }
            a.subtori
                .iter()
                .find(|s| &s.layer == l)
                .map_or_else(|| l.canonical_label(), |s| s.label.clone())
        })
        .collect();
    let ranks = layers.iter().map(Layer::rank).collect();
    let leq = layers
        .iter()
        .map(|x| layers.iter().map(|y| x.contains_layer(y)).collect())
        .collect();
    let poset = RankedPoset::from_leq(labels, ranks, leq)?;
    Ok(LayerPoset { poset, layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::int_vec;

    fn layer(n: usize, chars: &[&[i64]], phase: &[(i64, i64)]) -> Layer {
        let c: Vec<Vec<Int>> = chars.iter().map(|r| int_vec(r)).collect();
        let p: Vec<BigRational> = phase
            .iter()
            .map(|&(a, b)| BigRational::new(a.into(), b.into()))
            .collect();
        Layer::from_equations(n, &c, &p).unwrap().unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn a_meets_b_in_three_components() {
        let a = layer(3, &[&[1, 0, 0]], &[(0, 1)]);
        let b = layer(3, &[&[1, -3, 0]], &[(0, 1)]);
        let c = intersect_layers(&a, &b).unwrap();
        assert_eq!(c.len(), 3);
        let want = Sublattice::from_i64(3, &[&[1, 0, 0], &[0, 1, 0]]);
        for (i, l) in c.iter().enumerate() {
            assert_eq!(l.lattice(), &want);
            assert_eq!(l.phase(), &[q(0, 1), q(i as i64, 3)]);
        }
        assert_eq!(intersect_layers(&a, &a).unwrap(), vec![a.clone()]);
    }

    #[test]
    fn opposite_points_on_a_circle() {
        let x1 = layer(1, &[&[1]], &[(0, 1)]);
        let xm1 = layer(1, &[&[1]], &[(1, 2)]);
        assert!(intersect_layers(&x1, &xm1).unwrap().is_empty());
    }

    #[test]
    fn dependent_rows_need_zero_phase() {
        let c: Vec<Vec<Int>> = vec![int_vec(&[1, 0]), int_vec(&[2, 0])];
        assert!(Layer::from_equations(2, &c, &[q(1, 4), q(1, 4)])
            .unwrap()
            .is_none());
        assert!(Layer::from_equations(2, &c, &[q(1, 4), q(1, 2)])
            .unwrap()
            .is_some());
    }

    #[test]
    fn non_saturated_subtorus_is_rejected() {
        let mut a = ToricArrangement::new(2);
        assert!(matches!(
            a.add_i64("h", &[&[2, 0]], &[(0, 1)]),
            Err(ArrangementError::NotSaturated(..))
        ));
    }

    #[test]
    fn single_subtorus() {
        let mut a = ToricArrangement::new(2);
        a.add_i64("h", &[&[1, 1]], &[(1, 2)]).unwrap();
        let lp = poset_of_layers(&a).unwrap();
        assert_eq!(lp.poset.len(), 2);
        assert_eq!(lp.poset.label(1), "h");
    }

    #[test]
    fn a22_has_two_points() {
        let mut a = ToricArrangement::new(2);
        a.add_i64("H1", &[&[1, 0]], &[(0, 1)]).unwrap();
        a.add_i64("H2", &[&[1, 2]], &[(0, 1)]).unwrap();
        let lp = poset_of_layers(&a).unwrap();
        assert_eq!(lp.poset.ranks(), &[0, 1, 1, 2, 2]);
    }
}
