//! Graded polynomials over the integers, weighted DegRevLex, strong Gröbner
//! bases over `Z`, standard monomials and an independent rank oracle.
//!
//! Variables are indexed so that index 0 is the largest. Monomials carry
//! their weighted degree, which makes the order intrinsic: compare degrees,
//! then look at the smallest variable where the exponents differ; the
//! monomial with the larger exponent there is the smaller one.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intlinalg::{snf, Int, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("generator {0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("degree {degree} has {count} monomials, above the limit {limit}")]
    TooManyMonomials {
        degree: u32,
        count: usize,
        limit: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableTable {
    names: Vec<String>,
    weights: Vec<u32>,
}

impl VariableTable {
    /// Variables in decreasing order of rank.
    pub fn new(names: Vec<String>, weights: Vec<u32>) -> Self {
        assert_eq!(names.len(), weights.len());
        assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
        VariableTable { names, weights }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn one(&self) -> Monomial {
        Monomial {
            exps: vec![0; self.len()],
            deg: 0,
        }
    }

    pub fn var(&self, i: usize) -> Monomial {
        let mut exps = vec![0; self.len()];
        exps[i] = 1;
        Monomial {
            exps,
            deg: self.weights[i],
        }
    }

    pub fn monomial(&self, exps: Vec<u16>) -> Monomial {
        assert_eq!(exps.len(), self.len());
        let deg = exps
            .iter()
            .zip(&self.weights)
            .map(|(&e, &w)| e as u32 * w)
            .sum();
        Monomial { exps, deg }
    }

    /// Product of variables given as (index, exponent) pairs.
    pub fn monomial_from(&self, factors: &[(usize, u16)]) -> Monomial {
        let mut exps = vec![0; self.len()];
        for &(i, e) in factors {
            exps[i] += e;
        }
        self.monomial(exps)
    }

    /// All monomials of weighted degree `d`, in decreasing order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.monomials_of_degree_in(&all, d)
    }

    /// Degree-`d` monomials supported on `vars`, sorted descending.
    pub fn monomials_of_degree_in(&self, vars: &[usize], d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u16; self.len()];
        self.fill(vars, d, &mut exps, &mut out);
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    fn fill(&self, vars: &[usize], left: u32, exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        let Some((&i, rest)) = vars.split_first() else {
            if left == 0 {
                out.push(self.monomial(exps.clone()));
            }
            return;
        };
        let w = self.weights[i];
        let mut e = 0;
        while e * w <= left {
            exps[i] = e as u16;
            self.fill(rest, left - e * w, exps, out);
            e += 1;
        }
        exps[i] = 0;
    }

    pub fn count_monomials_of_degree(&self, d: u32) -> usize {
        // number of solutions of sum w_i e_i = d
        let mut ways = vec![0usize; d as usize + 1];
        ways[0] = 1;
        for &w in &self.weights {
            for k in w as usize..=d as usize {
                ways[k] = ways[k].saturating_add(ways[k - w as usize]);
            }
        }
        ways[d as usize]
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        let parts: Vec<String> = m
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.names[i].clone()
                } else {
                    format!("{}^{}", self.names[i], e)
                }
            })
            .collect();
        parts.join("*")
    }

    pub fn format(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in p.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&self.format_monomial(m));
            } else {
                s.push_str(&format!("{}*{}", a, self.format_monomial(m)));
            }
        }
        s
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u16>,
    deg: u32,
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

impl Monomial {
    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: other
                .exps
                .iter()
                .zip(&self.exps)
                .map(|(a, b)| a - b)
                .collect(),
            deg: other.deg - self.deg,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
            deg: self.deg + other.deg,
        }
    }

    pub fn lcm(&self, other: &Monomial, weights: &[u32]) -> Monomial {
        let exps: Vec<u16> = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(&a, &b)| a.max(b))
            .collect();
        let deg = exps.iter().zip(weights).map(|(&e, &w)| e as u32 * w).sum();
        Monomial { exps, deg }
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(&a, &b)| a == 0 || b == 0)
    }

    /// Variables with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.exps.len()).filter(|&i| self.exps[i] > 0).collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| {
            for i in (0..self.exps.len()).rev() {
                if self.exps[i] != other.exps[i] {
                    return other.exps[i].cmp(&self.exps[i]);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weighted DegRevLex comparison.
pub fn compare(m1: &Monomial, m2: &Monomial) -> Ordering {
    m1.cmp(m2)
}

/// Polynomial with terms sorted by decreasing monomial and no zero
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    terms: Vec<(Monomial, Int)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn term(m: Monomial, c: Int) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial {
                terms: vec![(m, c)],
            }
        }
    }

    pub fn from_terms(terms: Vec<(Monomial, Int)>) -> Self {
        let mut map: BTreeMap<Monomial, Int> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(Int::zero) += c;
        }
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<Monomial, Int>) -> Self {
        Polynomial {
            terms: map
                .into_iter()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(Monomial, Int)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &Int {
        &self.terms[0].1
    }

    pub fn degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.0.deg)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.iter().all(|t| t.0.deg == self.terms[0].0.deg)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut all = self.terms.clone();
        all.extend(other.terms.iter().cloned());
        Self::from_terms(all)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Int) -> Polynomial {
        if k.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut map: BTreeMap<Monomial, Int> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *map.entry(m1.mul(m2)).or_insert_with(Int::zero) += c1 * c2;
            }
        }
        Self::from_map(map)
    }

    /// Same polynomial with a positive leading coefficient.
    pub fn normalized_sign(self) -> Polynomial {
        if !self.is_zero() && self.lc().is_negative() {
            self.neg()
        } else {
            self
        }
    }

    /// Substitutes each variable by a polynomial (a ring map).
    pub fn substitute(&self, images: &[Polynomial], one: &Monomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut t = Polynomial::term(one.clone(), c.clone());
            for (i, &e) in m.exps.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&images[i]);
                    if t.is_zero() {
                        break;
                    }
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

/// Index of the first basis element whose leading term reduces `c*m`, with
/// quotient `q != 0` under division with nonnegative remainder.
fn find_reducer<'a>(
    m: &Monomial,
    c: &Int,
    basis: &'a [Polynomial],
) -> Option<(&'a Polynomial, Int)> {
    for g in basis {
        if g.lm().divides(m) {
            let q = c.div_floor(g.lc());
            if !q.is_zero() {
                return Some((g, q));
            }
        }
    }
    None
}

/// Full reduction of `f` by `basis`: every term is reduced as far as
/// possible, reducers taken in list order. The coefficient of a term is
/// replaced by its remainder modulo the reducer's leading coefficient.
pub fn normal_form(f: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let mut rest: BTreeMap<Monomial, Int> = f.terms.iter().cloned().collect();
    let mut done: Vec<(Monomial, Int)> = Vec::new();
    while let Some((m, mut c)) = rest.pop_last() {
        while let Some((g, q)) = find_reducer(&m, &c, basis) {
            let shift = g.lm().quotient_of(&m);
            c -= &q * g.lc();
            for (t, d) in &g.terms[1..] {
                let key = t.mul(&shift);
                let e = rest.entry(key).or_insert_with(Int::zero);
                *e -= &q * d;
                if e.is_zero() {
                    let key = t.mul(&shift);
                    rest.remove(&key);
                }
            }
            if c.is_zero() {
                break;
            }
        }
        if !c.is_zero() {
            done.push((m, c));
        }
    }
    Polynomial { terms: done }
}

/// S-polynomial with the lcm of monomials and of coefficients.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, weights: &[u32]) -> Polynomial {
    let l = f.lm().lcm(g.lm(), weights);
    let (a, b) = (f.lc(), g.lc());
    let lc = a.lcm(b);
    let left = f.mul_monomial(&f.lm().quotient_of(&l)).scale(&(&lc / a));
    let right = g.mul_monomial(&g.lm().quotient_of(&l)).scale(&(&lc / b));
    left.sub(&right)
}

/// Bézout combination with leading term `gcd(lc f, lc g) * lcm(lm f, lm g)`,
/// or `None` when one leading coefficient divides the other.
pub fn g_polynomial(f: &Polynomial, g: &Polynomial, weights: &[u32]) -> Option<Polynomial> {
    let (a, b) = (f.lc(), g.lc());
    if b.is_multiple_of(a) || a.is_multiple_of(b) {
        return None;
    }
    let e = a.extended_gcd(b);
    let l = f.lm().lcm(g.lm(), weights);
    let left = f.mul_monomial(&f.lm().quotient_of(&l)).scale(&e.x);
    let right = g.mul_monomial(&g.lm().quotient_of(&l)).scale(&e.y);
    Some(left.add(&right))
}

fn check_homogeneous(gens: &[Polynomial]) -> Result<(), PolyError> {
    match gens.iter().position(|g| !g.is_homogeneous()) {
        Some(i) => Err(PolyError::NotHomogeneous(i)),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroebnerStats {
    pub pairs_considered: usize,
    pub product_skips: usize,
    pub chain_skips: usize,
    pub reductions_to_zero: usize,
    pub added: usize,
}

/// Strong Gröbner basis over `Z`, truncated at weighted degree `cap` (pairs
/// whose lcm has larger degree are not processed). Inputs must be
/// homogeneous. The output is interreduced, sorted by decreasing leading
/// term and has positive leading coefficients.
pub fn buchberger(
    gens: &[Polynomial],
    weights: &[u32],
    cap: Option<u32>,
) -> Result<Vec<Polynomial>, PolyError> {
    buchberger_with_stats(gens, weights, cap).map(|r| r.0)
}

pub fn buchberger_with_stats(
    gens: &[Polynomial],
    weights: &[u32],
    cap: Option<u32>,
) -> Result<(Vec<Polynomial>, GroebnerStats), PolyError> {
    check_homogeneous(gens)?;
    let mut stats = GroebnerStats::default();
    let mut basis: Vec<Polynomial> = Vec::new();
    // pending pairs keyed by (lcm degree, insertion counter)
    let mut queue: BTreeSet<(u32, usize, usize, usize)> = BTreeSet::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut counter = 0usize;
    let mut seed: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    seed.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.lm().cmp(b.lm())));
    let mut add = |p: Polynomial,
                   basis: &mut Vec<Polynomial>,
                   queue: &mut BTreeSet<(u32, usize, usize, usize)>,
                   pending: &mut BTreeSet<(usize, usize)>| {
        let k = basis.len();
        for (i, g) in basis.iter().enumerate() {
            let d = g.lm().lcm(p.lm(), weights).degree();
            if cap.is_none_or(|c| d <= c) {
                queue.insert((d, counter, i, k));
                pending.insert((i, k));
                counter += 1;
            }
        }
        basis.push(p);
    };
    for g in seed {
        let r = normal_form(&g, &basis);
        if !r.is_zero() {
            add(r.normalized_sign(), &mut basis, &mut queue, &mut pending);
        }
    }
    while let Some(&key) = queue.iter().next() {
        queue.remove(&key);
        let (_, _, i, j) = key;
        pending.remove(&(i, j));
        stats.pairs_considered += 1;
        let (f, g) = (&basis[i], &basis[j]);
        let units = f.lc().abs().is_one() && g.lc().abs().is_one();
        if units && f.lm().coprime(g.lm()) {
            stats.product_skips += 1;
            continue;
        }
        let l = f.lm().lcm(g.lm(), weights);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lc().abs().is_one()
                && basis[k].lm().divides(&l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
                && basis[k].lm().lcm(f.lm(), weights) != l
                && basis[k].lm().lcm(g.lm(), weights) != l
        });
        if chain && units {
            stats.chain_skips += 1;
            continue;
        }
        let mut news = vec![s_polynomial(f, g, weights)];
        if let Some(gp) = g_polynomial(f, g, weights) {
            news.push(gp);
        }
        for h in news {
            let r = normal_form(&h, &basis);
            if r.is_zero() {
                stats.reductions_to_zero += 1;
            } else {
                stats.added += 1;
                add(r.normalized_sign(), &mut basis, &mut queue, &mut pending);
            }
        }
    }
    Ok((interreduce(basis), stats))
}

/// Minimal, tail-reduced form of a strong Gröbner basis: drops elements
/// whose leading term is divisible (monomial and coefficient) by another's,
/// reduces tails, and sorts by decreasing leading monomial.
pub fn interreduce(basis: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut keep: Vec<Polynomial> = Vec::new();
    let mut sorted = basis;
    sorted.sort_by(|a, b| {
        a.lm()
            .cmp(b.lm())
            .then_with(|| a.lc().abs().cmp(&b.lc().abs()))
    });
    for p in sorted {
        let covered = keep
            .iter()
            .any(|q| q.lm().divides(p.lm()) && p.lc().is_multiple_of(q.lc()));
        if !covered {
            keep.push(p);
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for (i, p) in keep.iter().enumerate() {
        let others: Vec<Polynomial> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.clone())
            .collect();
        let head = Polynomial::term(p.lm().clone(), p.lc().clone());
        let tail = Polynomial {
            terms: p.terms[1..].to_vec(),
        };
        out.push(head.add(&normal_form(&tail, &others)).normalized_sign());
    }
    out.sort_by(|a, b| b.lm().cmp(a.lm()).then_with(|| a.lc().cmp(b.lc())));
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroebnerCheck {
    pub pairs_checked: usize,
    pub failures: Vec<(usize, usize, &'static str)>,
}

impl GroebnerCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every S-polynomial and G-polynomial with lcm degree at most
/// `cap` reduces to zero. No pair criteria are used; only pairs of terms
/// whose S-polynomial vanishes identically are skipped.
pub fn is_groebner(
    set: &[Polynomial],
    weights: &[u32],
    cap: Option<u32>,
) -> Result<GroebnerCheck, PolyError> {
    check_homogeneous(set)?;
    let basis: Vec<Polynomial> = set.iter().filter(|p| !p.is_zero()).cloned().collect();
    let mut check = GroebnerCheck::default();
    for j in 0..basis.len() {
        for i in 0..j {
            let (f, g) = (&basis[i], &basis[j]);
            let l = f.lm().lcm(g.lm(), weights);
            if cap.is_some_and(|c| l.degree() > c) {
                continue;
            }
            check.pairs_checked += 1;
            if !(f.is_monomial() && g.is_monomial())
                && !normal_form(&s_polynomial(f, g, weights), &basis).is_zero()
            {
                check.failures.push((i, j, "S"));
            }
            if let Some(gp) = g_polynomial(f, g, weights) {
                if !normal_form(&gp, &basis).is_zero() {
                    check.failures.push((i, j, "G"));
                }
            }
        }
    }
    Ok(check)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StandardMonomials {
    /// Not divisible by any leading monomial.
    pub free: Vec<Monomial>,
    /// Divisible only by leading monomials with non-unit coefficients.
    pub torsion_suspect: Vec<Monomial>,
}

/// Standard monomials of degree `d` for a Gröbner basis.
pub fn standard_monomials(
    basis: &[Polynomial],
    table: &VariableTable,
    d: u32,
) -> StandardMonomials {
    let mut out = StandardMonomials::default();
    let unit: Vec<&Monomial> = basis
        .iter()
        .filter(|g| g.lc().abs().is_one())
        .map(|g| g.lm())
        .collect();
    let other: Vec<&Monomial> = basis
        .iter()
        .filter(|g| !g.lc().abs().is_one())
        .map(|g| g.lm())
        .collect();
    for m in table.monomials_of_degree(d) {
        if unit.iter().any(|u| u.divides(&m)) {
            continue;
        }
        if other.iter().any(|u| u.divides(&m)) {
            out.torsion_suspect.push(m);
        } else {
            out.free.push(m);
        }
    }
    out
}

/// Per-degree counts of free standard monomials for degrees `0..=up_to`.
pub fn hilbert(basis: &[Polynomial], table: &VariableTable, up_to: u32) -> Vec<usize> {
    (0..=up_to)
        .map(|d| standard_monomials(basis, table, d).free.len())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRank {
    pub degree: u32,
    pub monomials: usize,
    pub free_rank: usize,
    /// Invariant factors of the quotient different from 1.
    pub torsion: Vec<Int>,
}

/// Multiplies `g` by every monomial completing it to degree `d`.
fn degree_multiples(g: &Polynomial, table: &VariableTable, d: u32) -> Vec<Polynomial> {
    if g.degree() > d {
        return Vec::new();
    }
    table
        .monomials_of_degree(d - g.degree())
        .iter()
        .map(|m| g.mul_monomial(m))
        .collect()
}

/// Rank and torsion of the degree-`d` part of `Z[x] / (gens)` computed by
/// integer row reduction of the matrix of all products `m * g` of degree
/// `d`, independently of any Gröbner computation.
pub fn graded_rank_oracle(
    gens: &[Polynomial],
    table: &VariableTable,
    d: u32,
    limit: usize,
) -> Result<OracleRank, PolyError> {
    check_homogeneous(gens)?;
    let count = table.count_monomials_of_degree(d);
    if count > limit {
        return Err(PolyError::TooManyMonomials {
            degree: d,
            count,
            limit,
        });
    }
    let cols = table.monomials_of_degree(d);
    let col_of: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    // pivot rows keyed by leading column; rows are sparse sorted (col, coef)
    let mut pivots: BTreeMap<usize, Vec<(usize, Int)>> = BTreeMap::new();
    for g in gens.iter().filter(|g| !g.is_zero() && g.degree() <= d) {
        for p in degree_multiples(g, table, d) {
            let mut row: Vec<(usize, Int)> = p
                .terms
                .iter()
                .map(|(m, c)| (col_of[m], c.clone()))
                .collect();
            row.sort_by_key(|t| t.0);
            insert_row(&mut pivots, row);
        }
    }
    let rank = pivots.len();
    let nonunit: Vec<usize> = pivots
        .iter()
        .filter(|(_, r)| !r[0].1.abs().is_one())
        .map(|(&c, _)| c)
        .collect();
    let mut torsion = Vec::new();
    if !nonunit.is_empty() {
        // unit pivots split off; the rest of the cokernel is a small SNF
        let unit_cols: BTreeSet<usize> = pivots
            .iter()
            .filter(|(_, r)| r[0].1.abs().is_one())
            .map(|(&c, _)| c)
            .collect();
        let mut small_rows = Vec::new();
        for &c in &nonunit {
            let mut row = pivots[&c].clone();
            loop {
                let hit = row
                    .iter()
                    .find(|t| unit_cols.contains(&t.0))
                    .map(|t| (t.0, t.1.clone()));
                let Some((uc, coef)) = hit else { break };
                let prow = &pivots[&uc];
                let q = &coef * &prow[0].1; // pivot is +-1
                row = axpy(&row, &(-q), prow);
            }
            small_rows.push(row);
        }
        let rest_cols: Vec<usize> = (0..cols.len()).filter(|c| !unit_cols.contains(c)).collect();
        let m = IntMatrix::from_rows(
            rest_cols.len(),
            &small_rows
                .iter()
                .map(|r| {
                    rest_cols
                        .iter()
                        .map(|c| {
                            r.iter()
                                .find(|t| t.0 == *c)
                                .map_or_else(Int::zero, |t| t.1.clone())
                        })
                        .collect()
                })
                .collect::<Vec<_>>(),
        );
        torsion = snf(&m, false)
            .invariant_factors
            .into_iter()
            .filter(|f| !f.is_one())
            .collect();
    }
    Ok(OracleRank {
        degree: d,
        monomials: cols.len(),
        free_rank: cols.len() - rank,
        torsion,
    })
}

/// `a + k * b` on sparse rows.
fn axpy(a: &[(usize, Int)], k: &Int, b: &[(usize, Int)]) -> Vec<(usize, Int)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = k * &b[j].1;
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = &a[i].1 + k * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Adds a row to an echelon family over `Z`, keeping one pivot row per
/// leading column (2x2 unimodular gcd steps when neither lead divides).
fn insert_row(pivots: &mut BTreeMap<usize, Vec<(usize, Int)>>, mut row: Vec<(usize, Int)>) {
    while let Some(&(c, ref b)) = row.first() {
        let b = b.clone();
        let Some(p) = pivots.get(&c) else {
            if b.is_negative() {
                row = row.into_iter().map(|(i, v)| (i, -v)).collect();
            }
            pivots.insert(c, row);
            return;
        };
        let a = p[0].1.clone();
        if b.is_multiple_of(&a) {
            let q = &b / &a;
            row = axpy(&row, &-q, p);
        } else {
            let e = a.extended_gcd(&b);
            let p = pivots.remove(&c).expect("pivot exists");
            let newp = axpy(
                &p.iter().map(|(i, v)| (*i, v * &e.x)).collect::<Vec<_>>(),
                &e.y,
                &row,
            );
            let rest = axpy(
                &row.iter()
                    .map(|(i, v)| (*i, v * (&a / &e.gcd)))
                    .collect::<Vec<_>>(),
                &-(&b / &e.gcd),
                &p,
            );
            let newp = if newp[0].1.is_negative() {
                newp.into_iter().map(|(i, v)| (i, -v)).collect()
            } else {
                newp
            };
            pivots.insert(c, newp);
            row = rest;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::int;

    fn xy() -> VariableTable {
        VariableTable::new(vec!["x".into(), "y".into()], vec![1, 1])
    }

    #[test]
    fn revlex_on_two_variables() {
        let t = xy();
        let x2 = t.monomial(vec![2, 0]);
        let xy_ = t.monomial(vec![1, 1]);
        let y2 = t.monomial(vec![0, 2]);
        assert!(x2 > xy_ && xy_ > y2);
        assert!(t.monomial(vec![0, 2]) > t.monomial(vec![1, 0]));
        assert_eq!(t.count_monomials_of_degree(3), 4);
    }

    #[test]
    fn weighted_degree_dominates() {
        let t = VariableTable::new(vec!["t".into(), "c".into()], vec![2, 1]);
        assert!(t.var(0) > t.var(1));
        assert_eq!(
            t.monomials_of_degree(2),
            vec![t.var(0), t.monomial(vec![0, 2])]
        );
    }

    #[test]
    fn normal_form_keeps_remainder() {
        let t = VariableTable::new(vec!["x".into()], vec![1]);
        let two_x = Polynomial::term(t.var(0), int(2));
        let three_x = Polynomial::term(t.var(0), int(3));
        assert_eq!(normal_form(&two_x, std::slice::from_ref(&three_x)), two_x);
        assert_eq!(
            normal_form(&Polynomial::zero(), &[three_x]),
            Polynomial::zero()
        );
    }

    #[test]
    fn gcd_polynomial_appears() {
        let t = VariableTable::new(vec!["x".into()], vec![1]);
        let gens = vec![
            Polynomial::term(t.var(0), int(2)),
            Polynomial::term(t.var(0), int(3)),
        ];
        let gb = buchberger(&gens, t.weights(), Some(3)).unwrap();
        assert_eq!(gb, vec![Polynomial::term(t.var(0), int(1))]);
    }

    #[test]
    fn single_monomial_is_groebner() {
        let t = xy();
        let g = vec![Polynomial::term(t.monomial(vec![1, 1]), int(1))];
        assert!(is_groebner(&g, t.weights(), Some(4)).unwrap().ok());
        assert_eq!(hilbert(&g, &t, 3), vec![1, 2, 2, 2]);
    }

    #[test]
    fn oracle_sees_torsion() {
        let t = xy();
        let g = vec![Polynomial::term(t.var(0), int(2))];
        let r = graded_rank_oracle(&g, &t, 1, 100).unwrap();
        assert_eq!(r.free_rank, 1);
        assert_eq!(r.torsion, vec![int(2)]);
        let r0 = graded_rank_oracle(&g, &t, 0, 100).unwrap();
        assert_eq!((r0.free_rank, r0.torsion.len()), (1, 0));
    }

    #[test]
    fn nonhomogeneous_rejected() {
        let t = xy();
        let p = Polynomial::from_terms(vec![(t.var(0), int(1)), (t.monomial(vec![0, 2]), int(1))]);
        assert_eq!(
            buchberger(&[p], t.weights(), Some(3)),
            Err(PolyError::NotHomogeneous(0))
        );
    }
}
