//! Simplicial fans: smoothness, restriction to annihilators of layer
//! lattices, the relative-interior condition and equal-sign bases.
//!
//! A fan carries the lattice it lives in. Input fans live in all of `Z^n`;
//! a restricted fan keeps its rays in ambient coordinates, records the
//! sublattice `Ann(Gamma)`, and remembers which input ray each of its rays
//! was (`ray_ids`), so that toric variables can be shared.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intlinalg::{annihilator, dot, snf, Int, IntMatrix, Sublattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("ray {0} has length {1}, expected {2}")]
    RayLength(usize, usize, usize),
    #[error("ray {0} is zero")]
    ZeroRay(usize),
    #[error("ray {0} is not primitive")]
    NotPrimitive(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("cone {0} refers to missing ray {1}")]
    BadRayIndex(usize, usize),
    #[error("cone {0} is not simplicial")]
    NotSimplicial(usize),
    #[error("ray {0} is not in the fan lattice")]
    OutsideLattice(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    ambient_rank: usize,
    lattice: Sublattice,
    rays: Vec<Vec<Int>>,
    ray_ids: Vec<usize>,
    max_cones: Vec<Vec<usize>>,
}

/// Divides a nonzero vector by the gcd of its entries.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = v.iter().fold(Int::zero(), |a, b| a.gcd(b));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

impl Fan {
    /// A fan in `Z^n` from primitive rays and maximal cones.
    pub fn new(
        ambient_rank: usize,
        rays: Vec<Vec<Int>>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        let ids = (0..rays.len()).collect();
        Self::with_lattice(Sublattice::full(ambient_rank), rays, ids, max_cones)
    }

    pub fn from_i64(
        ambient_rank: usize,
        rays: &[&[i64]],
        max_cones: &[&[usize]],
    ) -> Result<Self, FanError> {
        let rays = rays.iter().map(|r| crate::intlinalg::int_vec(r)).collect();
        Self::new(
            ambient_rank,
            rays,
            max_cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    fn with_lattice(
        lattice: Sublattice,
        rays: Vec<Vec<Int>>,
        ray_ids: Vec<usize>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        let n = lattice.ambient_rank();
        for (i, r) in rays.iter().enumerate() {
            if r.len() != n {
                return Err(FanError::RayLength(i, r.len(), n));
            }
            if r.iter().all(Zero::is_zero) {
                return Err(FanError::ZeroRay(i));
            }
            if &primitive(r) != r {
                return Err(FanError::NotPrimitive(i));
            }
            if !lattice.contains(r) {
                return Err(FanError::OutsideLattice(i));
            }
            if let Some(j) = rays[..i].iter().position(|s| s == r) {
                return Err(FanError::DuplicateRay(j, i));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (ci, c) in max_cones.iter().enumerate() {
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::BadRayIndex(ci, bad));
            }
            let m =
                IntMatrix::from_rows(n, &c.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>());
            if m.rank() != c.len() {
                return Err(FanError::NotSimplicial(ci));
            }
            cones.push(c.clone());
        }
        if cones.is_empty() {
            cones.push(Vec::new());
        }
        Ok(Fan {
            ambient_rank: n,
            lattice,
            rays,
            ray_ids,
            max_cones: cones,
        })
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// Dimension of the lattice the fan lives in.
    pub fn dim(&self) -> usize {
        self.lattice.rank()
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn ray_ids(&self) -> &[usize] {
        &self.ray_ids
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Ray coordinates in the HNF basis of the fan lattice.
    pub fn local_coordinates(&self, i: usize) -> Vec<Int> {
        self.lattice
            .coordinates(&self.rays[i])
            .expect("ray lies in the lattice")
    }

    fn cone_matrix(&self, cone: &[usize]) -> IntMatrix {
        let rows: Vec<Vec<Int>> = cone.iter().map(|&i| self.local_coordinates(i)).collect();
        IntMatrix::from_rows(self.dim(), &rows)
    }

    /// The rays of `cone` are independent and extend to a lattice basis.
    pub fn is_unimodular_cone(&self, cone: &[usize]) -> bool {
        let s = snf(&self.cone_matrix(cone), false);
        s.rank() == cone.len() && s.invariant_factors.iter().all(One::is_one)
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| self.is_unimodular_cone(c))
    }

    /// Every cone of the fan (all faces of maximal cones), sorted.
    pub fn all_cones(&self) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        for c in &self.max_cones {
            for mask in 0u64..(1 << c.len()) {
                let mut face: Vec<usize> = (0..c.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| c[i])
                    .collect();
                face.sort_unstable();
                out.insert(face);
            }
        }
        out.into_iter().collect()
    }

    /// True iff the given ray set spans a cone of the fan.
    pub fn is_face(&self, set: &[usize]) -> bool {
        self.max_cones
            .iter()
            .any(|c| set.iter().all(|r| c.contains(r)))
    }

    /// First full-dimensional unimodular maximal cone, in input order.
    pub fn lead_cone(&self) -> Option<&[usize]> {
        self.max_cones
            .iter()
            .find(|c| c.len() == self.dim() && self.is_unimodular_cone(c))
            .map(|c| c.as_slice())
    }

    /// Linear forms `sum_r <beta_i, r> c_r` for a basis `beta` of the dual
    /// lattice, as coefficient rows indexed by ray. The basis is dual to the
    /// lead cone when there is one, so row `i` has coefficient 1 on the
    /// `i`-th lead ray and 0 on the others; otherwise it is dual to the HNF
    /// basis of the fan lattice.
    pub fn linear_relations(&self) -> Vec<Vec<Int>> {
        let d = self.dim();
        let coords: Vec<Vec<Int>> = (0..self.rays.len())
            .map(|i| self.local_coordinates(i))
            .collect();
        match self.lead_cone() {
            Some(cone) => {
                // a_i(r): coordinates of r in the basis of cone rays, via R^{-1}
                let s = snf(&self.cone_matrix(cone), true);
                let inv = s.right.as_ref().unwrap().mul(s.left.as_ref().unwrap());
                (0..d)
                    .map(|i| {
                        coords
                            .iter()
                            .map(|r| inv.left_apply(r)[i].clone())
                            .collect()
                    })
                    .collect()
            }
            None => (0..d)
                .map(|i| coords.iter().map(|r| r[i].clone()).collect())
                .collect(),
        }
    }

    /// Deterministic completeness probe: every nonzero integer direction
    /// with entries in `[-bound, bound]` must lie in some full-dimensional
    /// maximal cone. Not a proof of completeness.
    pub fn coverage_probe(&self, bound: i64) -> bool {
        let d = self.dim();
        if d == 0 {
            return true;
        }
        let full: Vec<(IntMatrix, Int)> = self
            .max_cones
            .iter()
            .filter(|c| c.len() == d)
            .map(|c| {
                let m = self.cone_matrix(c).transpose();
                let det = m.determinant();
                (m, det)
            })
            .collect();
        let mut v = vec![-bound; d];
        loop {
            if v.iter().any(|&x| x != 0) {
                let w: Vec<Int> = v.iter().map(|&x| Int::from(x)).collect();
                if !full.iter().any(|(m, det)| in_simplicial_cone(m, det, &w)) {
                    return false;
                }
            }
            let mut k = 0;
            while k < d && v[k] == bound {
                v[k] = -bound;
                k += 1;
            }
            if k == d {
                return true;
            }
            v[k] += 1;
        }
    }
}

/// `w` in the cone spanned by the columns of the square matrix `m`,
/// by Cramer's rule.
fn in_simplicial_cone(m: &IntMatrix, det: &Int, w: &[Int]) -> bool {
    if det.is_zero() {
        return false;
    }
    let n = m.rows();
    (0..n).all(|j| {
        let mut mj = m.clone();
        for (i, wi) in w.iter().enumerate() {
            mj.set(i, j, wi.clone());
        }
        let dj = mj.determinant();
        dj.is_zero() || dj.is_positive() == det.is_positive()
    })
}

/// `Delta ∩ Ann(Gamma)`: the cones all of whose rays annihilate `gamma`.
pub fn restrict_fan(f: &Fan, gamma: &Sublattice) -> Fan {
    let ann = annihilator(&gamma.sum(&annihilator(&f.lattice)));
    let chars = gamma.basis_rows();
    let keep: Vec<usize> = (0..f.rays.len())
        .filter(|&i| chars.iter().all(|c| dot(c, &f.rays[i]).is_zero()))
        .collect();
    let local = |i: usize| keep.iter().position(|&k| k == i).unwrap();
    // restricted cones keep the input order of cones and of rays within them
    let mut cones: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for c in &f.max_cones {
        let v: Vec<usize> = c
            .iter()
            .copied()
            .filter(|i| keep.contains(i))
            .map(local)
            .collect();
        let mut key = v.clone();
        key.sort_unstable();
        if !seen.contains(&key) {
            seen.push(key);
            cones.push(v);
        }
    }
    let all = seen.clone();
    let cones: Vec<Vec<usize>> = cones
        .into_iter()
        .zip(seen)
        .filter(|(_, key)| {
            !all.iter()
                .any(|d| d != key && key.iter().all(|x| d.contains(x)))
        })
        .map(|(c, _)| c)
        .collect();
    let rays = keep.iter().map(|&i| f.rays[i].clone()).collect();
    let ids = keep.iter().map(|&i| f.ray_ids[i]).collect();
    Fan::with_lattice(ann, rays, ids, cones).expect("restriction of a valid fan is valid")
}

/// Nonnegative elementary vectors of the kernel of `a` (columns = rays).
fn positive_circuit_support(a: &IntMatrix) -> BTreeSet<usize> {
    let k = a.cols();
    let mut support = BTreeSet::new();
    for mask in 1u64..(1 << k) {
        let cols: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let sub = IntMatrix::from_rows(
            cols.len(),
            &(0..a.rows())
                .map(|r| cols.iter().map(|&c| a.get(r, c).clone()).collect())
                .collect::<Vec<_>>(),
        );
        let rows = Sublattice::from_matrix(&sub);
        let ker = annihilator(&rows);
        if ker.rank() != 1 {
            continue;
        }
        let v = ker.basis_rows().remove(0);
        if v.iter().any(Zero::is_zero) {
            continue; // not a circuit on exactly these columns
        }
        if v.iter().all(Signed::is_positive) || v.iter().all(Signed::is_negative) {
            support.extend(cols);
        }
    }
    support
}

/// For every cone: if its relative interior meets `Ann(gamma)`, the whole
/// cone lies in `Ann(gamma)`. The relative interior meets the annihilator
/// iff the kernel of the pairing matrix has a strictly positive vector,
/// iff positive circuits cover all rays of the cone.
pub fn interior_condition(f: &Fan, gamma: &Sublattice) -> bool {
    let chars = gamma.basis_rows();
    f.all_cones().iter().filter(|c| !c.is_empty()).all(|c| {
        let rows: Vec<Vec<Int>> = chars
            .iter()
            .map(|chi| c.iter().map(|&i| dot(chi, &f.rays[i])).collect())
            .collect();
        let a = IntMatrix::from_rows(c.len(), &rows);
        if a.is_zero() {
            return true;
        }
        positive_circuit_support(&a).len() < c.len()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqualSign {
    Found(Vec<Vec<Int>>),
    Inconclusive,
    Refuted,
}

fn single_signed(chi: &[Int], rays: &[Vec<Int>]) -> bool {
    let vals: Vec<Int> = rays.iter().map(|r| dot(chi, r)).collect();
    vals.iter().all(|v| !v.is_negative()) || vals.iter().all(|v| !v.is_positive())
}

/// Searches for a basis of `gamma` whose members are each single-signed on
/// `rays`. Candidates are combinations of the HNF basis with coefficients in
/// `[-bound, bound]`. In rank 1 the answer is exact.
pub fn equal_sign_search(gamma: &Sublattice, rays: &[Vec<Int>], bound: i64) -> EqualSign {
    let t = gamma.rank();
    let h = gamma.basis_rows();
    if t == 0 {
        return EqualSign::Found(Vec::new());
    }
    if t == 1 {
        return if single_signed(&h[0], rays) {
            EqualSign::Found(h)
        } else {
            EqualSign::Refuted
        };
    }
    let mut coeffs = vec![-bound; t];
    let mut cands: Vec<Vec<Int>> = Vec::new(); // coefficient vectors
    loop {
        let first = coeffs.iter().find(|&&x| x != 0);
        if first.is_some_and(|&x| x > 0) {
            let c: Vec<Int> = coeffs.iter().map(|&x| Int::from(x)).collect();
            let chi = IntMatrix::from_rows(gamma.ambient_rank(), &h).left_apply(&c);
            if single_signed(&chi, rays) {
                cands.push(c);
            }
        }
        let mut k = 0;
        while k < t && coeffs[k] == bound {
            coeffs[k] = -bound;
            k += 1;
        }
        if k == t {
            break;
        }
        coeffs[k] += 1;
    }
    fn pick(cands: &[Vec<Int>], t: usize, start: usize, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == t {
            let rows: Vec<Vec<Int>> = chosen.iter().map(|&i| cands[i].clone()).collect();
            return IntMatrix::from_rows(t, &rows).determinant().abs().is_one();
        }
        for i in start..cands.len() {
            chosen.push(i);
            let rows: Vec<Vec<Int>> = chosen.iter().map(|&i| cands[i].clone()).collect();
            if IntMatrix::from_rows(t, &rows).rank() == chosen.len()
                && pick(cands, t, i + 1, chosen)
            {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    if pick(&cands, t, 0, &mut chosen) {
        let hm = IntMatrix::from_rows(gamma.ambient_rank(), &h);
        EqualSign::Found(chosen.iter().map(|&i| hm.left_apply(&cands[i])).collect())
    } else {
        EqualSign::Inconclusive
    }
}
