//! Ranked posets with a minimum, building sets, nested sets and
//! combinatorial blowups.
//!
//! Joins and meets are multi-valued: `joins(x, y)` is the set of minimal
//! common upper bounds, which may be empty or have several elements.
//! Element `0` of every [`RankedPoset`] is its minimum.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("element 0 is not the unique minimum")]
    NoMinimum,
    #[error("relation is not antisymmetric between {0} and {1}")]
    NotAntisymmetric(String, String),
    #[error("rank decreases from {0} to {1}")]
    RankNotMonotone(String, String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("the minimum cannot be used here")]
    MinimumNotAllowed,
    #[error("order on the building set does not refine the poset order ({0} listed before {1})")]
    BadOrder(String, String),
    #[error("not a building set")]
    NotBuilding,
}

#[derive(Clone, Debug)]
pub struct RankedPoset {
    labels: Vec<String>,
    ranks: Vec<usize>,
    leq: Vec<Vec<bool>>,
    up_covers: Vec<Vec<usize>>,
    down_covers: Vec<Vec<usize>>,
}

impl RankedPoset {
    /// Builds a poset from generating relations `(x, y)` meaning `x <= y`;
    /// the order is their reflexive-transitive closure.
    pub fn from_relations(
        labels: Vec<String>,
        ranks: Vec<usize>,
        relations: &[(usize, usize)],
    ) -> Result<Self, PosetError> {
        let n = labels.len();
        assert_eq!(ranks.len(), n);
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(x, y) in relations {
            leq[x][y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::from_leq(labels, ranks, leq)
    }

    /// Builds a poset from a full, already transitive order matrix.
    pub fn from_leq(
        labels: Vec<String>,
        ranks: Vec<usize>,
        leq: Vec<Vec<bool>>,
    ) -> Result<Self, PosetError> {
        let n = labels.len();
        if n == 0 || (0..n).any(|x| !leq[0][x]) {
            return Err(PosetError::NoMinimum);
        }
        if ranks[0] != 0 {
            return Err(PosetError::NoMinimum);
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && leq[x][y] {
                    if leq[y][x] {
                        return Err(PosetError::NotAntisymmetric(
                            labels[x].clone(),
                            labels[y].clone(),
                        ));
                    }
                    if ranks[x] > ranks[y] {
                        return Err(PosetError::RankNotMonotone(
                            labels[x].clone(),
                            labels[y].clone(),
                        ));
                    }
                }
            }
        }
        let mut up_covers = vec![Vec::new(); n];
        let mut down_covers = vec![Vec::new(); n];
        for x in 0..n {
            for y in 0..n {
                if x != y
                    && leq[x][y]
                    && !(0..n).any(|z| z != x && z != y && leq[x][z] && leq[z][y])
                {
                    up_covers[x].push(y);
                    down_covers[y].push(x);
                }
            }
        }
        Ok(RankedPoset {
            labels,
            ranks,
            leq,
            up_covers,
            down_covers,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn set_label(&mut self, x: usize, label: &str) {
        self.labels[x] = label.to_string();
    }

    pub fn rank(&self, x: usize) -> usize {
        self.ranks[x]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq[x][y]
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq[x][y] || self.leq[y][x]
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.up_covers[x]
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.down_covers[x]
    }

    /// All cover pairs `(x, y)` with `x ⋖ y`, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for &y in &self.up_covers[x] {
                out.push((x, y));
            }
        }
        out
    }

    pub fn atoms(&self) -> Vec<usize> {
        self.up_covers[0].clone()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.up_covers[x].is_empty())
            .collect()
    }

    /// The lower interval `[0, x]`, in index order.
    pub fn below(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&z| self.leq[z][x]).collect()
    }

    /// The upper set `L_{>= x}`, in index order.
    pub fn above(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&z| self.leq[x][z]).collect()
    }

    pub fn minimal_of(&self, set: &[usize]) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&x| !set.iter().any(|&y| self.lt(y, x)))
            .collect()
    }

    pub fn maximal_of(&self, set: &[usize]) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&x| !set.iter().any(|&y| self.lt(x, y)))
            .collect()
    }

    /// Minimal common upper bounds of `set` (for the empty set: the minimum).
    pub fn joins_of(&self, set: &[usize]) -> Vec<usize> {
        let common: Vec<usize> = (0..self.len())
            .filter(|&z| set.iter().all(|&s| self.leq[s][z]))
            .collect();
        self.minimal_of(&common)
    }

    pub fn joins(&self, x: usize, y: usize) -> Vec<usize> {
        self.joins_of(&[x, y])
    }

    pub fn meets(&self, x: usize, y: usize) -> Vec<usize> {
        let common: Vec<usize> = (0..self.len())
            .filter(|&z| self.leq[z][x] && self.leq[z][y])
            .collect();
        self.maximal_of(&common)
    }

    /// The join of `set` inside the interval `[0, top]`, when it exists and
    /// is unique.
    pub fn join_below(&self, set: &[usize], top: usize) -> Option<usize> {
        let common: Vec<usize> = (0..self.len())
            .filter(|&z| self.leq[z][top] && set.iter().all(|&s| self.leq[s][z]))
            .collect();
        match self.minimal_of(&common).as_slice() {
            [j] => Some(*j),
            _ => None,
        }
    }

    /// True iff every lower interval is a lattice.
    pub fn is_local_lattice(&self) -> bool {
        (0..self.len()).all(|x| {
            let below = self.below(x);
            below.iter().enumerate().all(|(i, &u)| {
                below[i + 1..]
                    .iter()
                    .all(|&v| self.join_below(&[u, v], x).is_some() && self.meets(u, v).len() == 1)
            })
        })
    }

    /// True iff every lower interval `[0, x]` is a boolean lattice on its
    /// atoms, with rank equal to the number of atoms below.
    pub fn is_locally_boolean(&self) -> bool {
        let atoms = self.atoms();
        (0..self.len()).all(|x| {
            let below = self.below(x);
            let a: Vec<usize> = atoms.iter().copied().filter(|&t| self.leq[t][x]).collect();
            if a.len() >= usize::BITS as usize
                || below.len() != 1usize << a.len()
                || self.ranks[x] != a.len()
            {
                return false;
            }
            // each element is determined by the atoms below it
            let mut seen = BTreeSet::new();
            below.iter().all(|&z| {
                let key: Vec<usize> = a.iter().copied().filter(|&t| self.leq[t][z]).collect();
                seen.insert(key)
            })
        })
    }

    /// Induced subposet on `elements` (the first listed must be its minimum),
    /// with ranks shifted down by `rank_shift`.
    pub fn subposet(
        &self,
        elements: &[usize],
        rank_shift: usize,
    ) -> Result<RankedPoset, PosetError> {
        let labels = elements.iter().map(|&x| self.labels[x].clone()).collect();
        let ranks = elements
            .iter()
            .map(|&x| self.ranks[x] - rank_shift)
            .collect();
        let leq = elements
            .iter()
            .map(|&x| elements.iter().map(|&y| self.leq[x][y]).collect())
            .collect();
        RankedPoset::from_leq(labels, ranks, leq)
    }

    /// Checks that `map` (indices of `self` to indices of `other`) is an
    /// order isomorphism.
    pub fn is_isomorphism(&self, other: &RankedPoset, map: &[usize]) -> bool {
        if self.len() != other.len() || map.len() != self.len() {
            return false;
        }
        let mut hit = vec![false; other.len()];
        for &m in map {
            if m >= other.len() || std::mem::replace(&mut hit[m], true) {
                return false;
            }
        }
        (0..self.len())
            .all(|x| (0..self.len()).all(|y| self.leq[x][y] == other.leq[map[x]][map[y]]))
    }
}

/// A building set together with its total order: `members[0]` is the
/// largest, and no member is listed after a member it lies below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingSet {
    members: Vec<usize>,
}

impl BuildingSet {
    /// Orders `members` by a deterministic linear extension of the opposite
    /// poset order (larger rank first, then smaller index). Validity as a
    /// building set is not checked here.
    pub fn new(p: &RankedPoset, members: &[usize]) -> Result<Self, PosetError> {
        if members.contains(&0) {
            return Err(PosetError::MinimumNotAllowed);
        }
        let mut rest: Vec<usize> = members
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut order = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut tops: Vec<usize> = rest
                .iter()
                .copied()
                .filter(|&x| !rest.iter().any(|&y| p.lt(x, y)))
                .collect();
            tops.sort_by_key(|&x| (std::cmp::Reverse(p.rank(x)), x));
            let pick = tops[0];
            order.push(pick);
            rest.retain(|&x| x != pick);
        }
        Ok(BuildingSet { members: order })
    }

    /// Uses the given listing order, which must refine the opposite order.
    pub fn with_order(p: &RankedPoset, members: &[usize]) -> Result<Self, PosetError> {
        if members.contains(&0) {
            return Err(PosetError::MinimumNotAllowed);
        }
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                if p.leq(x, y) {
                    return Err(PosetError::BadOrder(
                        p.label(x).to_string(),
                        p.label(y).to_string(),
                    ));
                }
            }
        }
        Ok(BuildingSet {
            members: members.to_vec(),
        })
    }

    pub fn from_labels(p: &RankedPoset, labels: &[&str]) -> Result<Self, PosetError> {
        let idx = labels
            .iter()
            .map(|l| {
                p.index_of(l)
                    .ok_or_else(|| PosetError::UnknownElement(l.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_order(p, &idx)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }

    /// Listing position (0 = largest).
    pub fn position(&self, x: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == x)
    }

    pub fn last(&self) -> Option<usize> {
        self.members.last().copied()
    }

    pub fn sorted_members(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }
}

/// `F(G, x) = max(G_{<= x})`.
pub fn g_factors(p: &RankedPoset, members: &[usize], x: usize) -> Vec<usize> {
    let below: Vec<usize> = members.iter().copied().filter(|&g| p.leq(g, x)).collect();
    let mut f = p.maximal_of(&below);
    f.sort_unstable();
    f
}

/// Checks that joining one element from each `[0, f]`, `f` in `factors`,
/// is an order isomorphism onto `[0, x]`.
fn join_map_is_isomorphism(p: &RankedPoset, factors: &[usize], x: usize) -> bool {
    let target = p.below(x);
    let intervals: Vec<Vec<usize>> = factors.iter().map(|&f| p.below(f)).collect();
    let size = intervals
        .iter()
        .try_fold(1usize, |acc, iv| acc.checked_mul(iv.len()));
    if size != Some(target.len()) {
        return false;
    }
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for iv in &intervals {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                iv.iter().map(move |&y| {
                    let mut t = t.clone();
                    t.push(y);
                    t
                })
            })
            .collect();
    }
    let mut image = Vec::with_capacity(tuples.len());
    let mut seen = BTreeSet::new();
    for t in &tuples {
        match p.join_below(t, x) {
            Some(j) if seen.insert(j) => image.push(j),
            _ => return false,
        }
    }
    for (i, s) in tuples.iter().enumerate() {
        for (j, t) in tuples.iter().enumerate() {
            let prod = s.iter().zip(t).all(|(&a, &b)| p.leq(a, b));
            if prod != p.leq(image[i], image[j]) {
                return false;
            }
        }
    }
    true
}

/// Building-set test. With `geometric`, also requires the factor ranks of
/// every element to add up to its rank.
pub fn is_building_set(p: &RankedPoset, members: &[usize], geometric: bool) -> bool {
    if members.contains(&0) {
        return false;
    }
    (1..p.len()).all(|x| {
        let f = g_factors(p, members, x);
        if f.is_empty() || !join_map_is_isomorphism(p, &f, x) {
            return false;
        }
        !geometric || f.iter().map(|&g| p.rank(g)).sum::<usize>() == p.rank(x)
    })
}

/// Elements whose lower interval admits no decomposition as a product of two
/// proper lower intervals via joins. Two factors suffice: any finer
/// decomposition can be regrouped into two.
pub fn minimal_building_set(p: &RankedPoset) -> Vec<usize> {
    (1..p.len())
        .filter(|&x| {
            let below = p.below(x);
            let n = below.len();
            let proper: Vec<usize> = below
                .iter()
                .copied()
                .filter(|&u| u != 0 && u != x)
                .collect();
            !proper.iter().enumerate().any(|(i, &u)| {
                let nu = p.below(u).len();
                n.is_multiple_of(nu)
                    && proper[i + 1..].iter().any(|&v| {
                        p.below(v).len() * nu == n && join_map_is_isomorphism(p, &[u, v], x)
                    })
            })
        })
        .collect()
}

/// Visits every subset of `members` (size >= 2) having a common upper bound,
/// passing its set of minimal common upper bounds.
fn for_each_joinable_subset(
    p: &RankedPoset,
    members: &[usize],
    mut visit: impl FnMut(&[usize], &[usize]) -> bool,
) -> bool {
    fn rec(
        p: &RankedPoset,
        members: &[usize],
        start: usize,
        chosen: &mut Vec<usize>,
        upper: &[usize],
        visit: &mut dyn FnMut(&[usize], &[usize]) -> bool,
    ) -> bool {
        for i in start..members.len() {
            let g = members[i];
            let next: Vec<usize> = upper.iter().copied().filter(|&z| p.leq(g, z)).collect();
            if next.is_empty() {
                continue;
            }
            chosen.push(g);
            if chosen.len() >= 2 && !visit(chosen, &p.minimal_of(&next)) {
                chosen.pop();
                return false;
            }
            if !rec(p, members, i + 1, chosen, &next, visit) {
                chosen.pop();
                return false;
            }
            chosen.pop();
        }
        true
    }
    let all: Vec<usize> = (0..p.len()).collect();
    rec(p, members, 0, &mut Vec::new(), &all, &mut visit)
}

/// True iff every multi-valued join of members lies inside the set.
pub fn is_well_connected(p: &RankedPoset, members: &[usize]) -> bool {
    for_each_joinable_subset(p, members, |_, j| {
        j.len() < 2 || j.iter().all(|z| members.contains(z))
    })
}

/// Smallest well-connected building set containing `start`, by closing
/// under multi-valued joins until nothing changes.
pub fn minimal_well_connected(p: &RankedPoset, start: &[usize]) -> Result<Vec<usize>, PosetError> {
    let mut g: BTreeSet<usize> = start.iter().copied().collect();
    loop {
        let current: Vec<usize> = g.iter().copied().collect();
        let mut extra = BTreeSet::new();
        for_each_joinable_subset(p, &current, |_, j| {
            if j.len() >= 2 {
                extra.extend(j.iter().copied().filter(|z| !g.contains(z)));
            }
            true
        });
        if extra.is_empty() {
            break;
        }
        g.extend(extra);
        if !is_building_set(p, &g.iter().copied().collect::<Vec<_>>(), false) {
            return Err(PosetError::NotBuilding);
        }
    }
    Ok(g.into_iter().collect())
}

/// A nested set `(S, x)`: `members` are poset indices sorted by their
/// listing position in the building set, `top` is `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NestedSet {
    pub members: Vec<usize>,
    pub top: usize,
}

impl NestedSet {
    pub fn empty() -> Self {
        NestedSet {
            members: Vec::new(),
            top: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn label(&self, p: &RankedPoset) -> String {
        if self.members.is_empty() {
            return "0".to_string();
        }
        let names: Vec<&str> = self.members.iter().map(|&m| p.label(m)).collect();
        format!("({{{}}},{})", names.join(","), p.label(self.top))
    }
}

fn antichains_nested(p: &RankedPoset, g: &BuildingSet, set: &[usize], top: usize) -> bool {
    // every antichain of size >= 2 must have a join below top outside G
    let n = set.len();
    if n >= usize::BITS as usize {
        return false;
    }
    for mask in 1usize..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let a: Vec<usize> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| set[i])
            .collect();
        let antichain = a
            .iter()
            .enumerate()
            .all(|(i, &x)| a[i + 1..].iter().all(|&y| !p.comparable(x, y)));
        if !antichain {
            continue;
        }
        match p.join_below(&a, top) {
            Some(j) if !g.contains(j) => {}
            _ => return false,
        }
    }
    true
}

/// All nonempty nested sets, sorted by (size, listing positions, top).
pub fn nested_sets(p: &RankedPoset, g: &BuildingSet) -> Vec<NestedSet> {
    let mut out = Vec::new();
    fn rec(
        p: &RankedPoset,
        g: &BuildingSet,
        start: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<NestedSet>,
    ) {
        for i in start..g.len() {
            chosen.push(g.members()[i]);
            let tops: Vec<usize> = p
                .joins_of(chosen)
                .into_iter()
                .filter(|&x| antichains_nested(p, g, chosen, x))
                .collect();
            if !tops.is_empty() {
                for &x in &tops {
                    out.push(NestedSet {
                        members: chosen.clone(),
                        top: x,
                    });
                }
                rec(p, g, i + 1, chosen, out);
            }
            chosen.pop();
        }
    }
    rec(p, g, 0, &mut Vec::new(), &mut out);
    let key = |s: &NestedSet| -> (usize, Vec<usize>, usize) {
        (
            s.members.len(),
            s.members.iter().map(|&m| g.position(m).unwrap()).collect(),
            s.top,
        )
    };
    out.sort_by_key(key);
    out
}

/// The blowup `Bl_G(L)` realised as the face poset of the nested-set
/// complex. Index 0 is the empty nested set.
#[derive(Clone, Debug)]
pub struct BlowupPoset {
    pub poset: RankedPoset,
    pub nested: Vec<NestedSet>,
}

impl BlowupPoset {
    pub fn projection(&self, a: usize) -> usize {
        self.nested[a].top
    }

    pub fn index_of(&self, s: &NestedSet) -> Option<usize> {
        self.nested.iter().position(|t| t == s)
    }

    /// Index of the atom `({g}, g)`.
    pub fn atom_of(&self, g: usize) -> Option<usize> {
        self.index_of(&NestedSet {
            members: vec![g],
            top: g,
        })
    }

    pub fn len(&self) -> usize {
        self.nested.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nested.is_empty()
    }
}

pub fn blowup_building(p: &RankedPoset, g: &BuildingSet) -> BlowupPoset {
    let mut nested = vec![NestedSet::empty()];
    nested.extend(nested_sets(p, g));
    let labels = nested.iter().map(|s| s.label(p)).collect();
    let ranks = nested.iter().map(NestedSet::rank).collect();
    let leq = nested
        .iter()
        .map(|t| {
            nested
                .iter()
                .map(|s| p.leq(t.top, s.top) && t.members.iter().all(|m| s.members.contains(m)))
                .collect()
        })
        .collect();
    let poset =
        RankedPoset::from_leq(labels, ranks, leq).expect("nested-set order is a ranked poset");
    BlowupPoset { poset, nested }
}

/// An element of a single raw blowup `Bl_p(L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RawElement {
    Old(usize),
    /// `(p, x, y)` with `y` one of the joins of `p` and `x`.
    New {
        x: usize,
        y: usize,
    },
}

#[derive(Clone, Debug)]
pub struct RawBlowup {
    pub poset: RankedPoset,
    pub elements: Vec<RawElement>,
}

impl RawBlowup {
    pub fn projection(&self, e: usize) -> usize {
        match self.elements[e] {
            RawElement::Old(x) => x,
            RawElement::New { y, .. } => y,
        }
    }
}

/// Blowup of a poset at one element, directly from the definition. The rank
/// of `(p, x, y)` is `rk(x) + 1`.
pub fn blowup_at(p: &RankedPoset, at: usize) -> Result<RawBlowup, PosetError> {
    if at == 0 {
        return Err(PosetError::MinimumNotAllowed);
    }
    if at >= p.len() {
        return Err(PosetError::UnknownElement(at.to_string()));
    }
    let mut elements = Vec::new();
    for x in 0..p.len() {
        if !p.leq(at, x) {
            elements.push(RawElement::Old(x));
        }
    }
    let kept: Vec<usize> = elements
        .iter()
        .map(|e| match e {
            RawElement::Old(x) => *x,
            RawElement::New { .. } => unreachable!(),
        })
        .collect();
    for &x in &kept {
        for y in p.joins(at, x) {
            elements.push(RawElement::New { x, y });
        }
    }
    let labels = elements
        .iter()
        .map(|e| match *e {
            RawElement::Old(x) => p.label(x).to_string(),
            RawElement::New { x, y } => {
                if p.joins(at, x).len() == 1 {
                    format!("({},{})", p.label(at), p.label(x))
                } else {
                    format!("({},{},{})", p.label(at), p.label(x), p.label(y))
                }
            }
        })
        .collect();
    let ranks = elements
        .iter()
        .map(|e| match *e {
            RawElement::Old(x) => p.rank(x),
            RawElement::New { x, .. } => p.rank(x) + 1,
        })
        .collect();
    let leq = elements
        .iter()
        .map(|&a| {
            elements
                .iter()
                .map(|&b| match (a, b) {
                    (RawElement::Old(x1), RawElement::Old(x2)) => p.leq(x1, x2),
                    (RawElement::New { x: x1, y: y1 }, RawElement::New { x: x2, y: y2 }) => {
                        p.leq(x1, x2) && p.leq(y1, y2)
                    }
                    (RawElement::Old(x1), RawElement::New { x: x2, .. }) => p.leq(x1, x2),
                    (RawElement::New { .. }, RawElement::Old(_)) => false,
                })
                .collect()
        })
        .collect();
    let poset = RankedPoset::from_leq(labels, ranks, leq)?;
    Ok(RawBlowup { poset, elements })
}

/// Literal iterated blowup along the listing order of `g` (largest first).
/// Returns the final poset and, for each of its elements, the nested set it
/// corresponds to: the members whose exceptional atoms lie below it, and the
/// composed projection.
pub fn iterated_blowup(
    p: &RankedPoset,
    g: &BuildingSet,
) -> Result<(RankedPoset, Vec<NestedSet>), PosetError> {
    let mut q = p.clone();
    let mut proj: Vec<usize> = (0..p.len()).collect();
    let mut original: Vec<Option<usize>> = (0..p.len()).map(Some).collect();
    let mut atoms: Vec<(usize, usize)> = Vec::new(); // (member, current index)
    for &m in g.members() {
        let at = original
            .iter()
            .position(|&o| o == Some(m))
            .ok_or(PosetError::NotBuilding)?;
        let b = blowup_at(&q, at)?;
        let mut old_to_new = HashMap::new();
        let mut new_proj = Vec::with_capacity(b.elements.len());
        let mut new_original = Vec::with_capacity(b.elements.len());
        let mut new_atom = None;
        for (i, e) in b.elements.iter().enumerate() {
            match *e {
                RawElement::Old(x) => {
                    old_to_new.insert(x, i);
                    new_proj.push(proj[x]);
                    new_original.push(original[x]);
                }
                RawElement::New { x, y } => {
                    new_proj.push(proj[y]);
                    new_original.push(None);
                    if x == 0 {
                        new_atom = Some(i);
                    }
                }
            }
        }
        for a in atoms.iter_mut() {
            a.1 = *old_to_new.get(&a.1).ok_or(PosetError::NotBuilding)?;
        }
        atoms.push((m, new_atom.ok_or(PosetError::NotBuilding)?));
        q = b.poset;
        proj = new_proj;
        original = new_original;
    }
    let labels: Vec<NestedSet> = (0..q.len())
        .map(|e| {
            let mut members: Vec<usize> = atoms
                .iter()
                .filter(|a| q.leq(a.1, e))
                .map(|a| a.0)
                .collect();
            members.sort_by_key(|&m| g.position(m));
            NestedSet {
                members,
                top: proj[e],
            }
        })
        .collect();
    Ok((q, labels))
}

/// Contraction `L_{>= X}` with ranks shifted by `rk(X)`, and the induced
/// building set `G_X`. `map[i]` is the index in `L` of element `i`.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub poset: RankedPoset,
    pub building: BuildingSet,
    pub map: Vec<usize>,
}

pub fn contraction(p: &RankedPoset, g: &BuildingSet, x: usize) -> Result<Contraction, PosetError> {
    if x >= p.len() {
        return Err(PosetError::UnknownElement(x.to_string()));
    }
    if x == 0 {
        return Err(PosetError::MinimumNotAllowed);
    }
    let map = p.above(x);
    let poset = p.subposet(&map, p.rank(x))?;
    let mut gx = BTreeSet::new();
    for &m in g.members() {
        if !p.leq(m, x) {
            gx.extend(p.joins(m, x));
        }
    }
    let members: Vec<usize> = gx
        .iter()
        .map(|z| map.iter().position(|m| m == z).unwrap())
        .collect();
    let building = BuildingSet::new(&poset, &members)?;
    Ok(Contraction {
        poset,
        building,
        map,
    })
}

/// Deletion of the last member `G` of `g`: the subposet of elements of
/// which `G` is not a factor, with building set `g` minus `G` (same order).
#[derive(Clone, Debug)]
pub struct Deletion {
    pub poset: RankedPoset,
    pub building: BuildingSet,
    pub map: Vec<usize>,
}

pub fn deletion(p: &RankedPoset, g: &BuildingSet) -> Result<Deletion, PosetError> {
    let last = g.last().ok_or(PosetError::NotBuilding)?;
    deletion_of(p, g, last)
}

/// Deletion of an arbitrary member; the remaining members keep their order.
pub fn deletion_of(
    p: &RankedPoset,
    g: &BuildingSet,
    member: usize,
) -> Result<Deletion, PosetError> {
    if !g.contains(member) {
        return Err(PosetError::UnknownElement(p.label(member).to_string()));
    }
    let map: Vec<usize> = (0..p.len())
        .filter(|&f| f == 0 || !g_factors(p, g.members(), f).contains(&member))
        .collect();
    let poset = p.subposet(&map, 0)?;
    let members: Vec<usize> = g
        .members()
        .iter()
        .filter(|&&z| z != member)
        .map(|z| {
            map.iter()
                .position(|m| m == z)
                .ok_or(PosetError::NotBuilding)
        })
        .collect::<Result<_, _>>()?;
    let building = BuildingSet::with_order(&poset, &members)?;
    Ok(Deletion {
        poset,
        building,
        map,
    })
}

/// Nested sets `(S, X)` with `S` maximal among nested sets over `X`.
pub fn maximal_nested_over(bl: &BlowupPoset, x: usize) -> Vec<usize> {
    let over: Vec<usize> = (1..bl.len()).filter(|&i| bl.nested[i].top == x).collect();
    over.iter()
        .copied()
        .filter(|&i| {
            !over.iter().any(|&j| {
                j != i
                    && bl.nested[i]
                        .members
                        .iter()
                        .all(|m| bl.nested[j].members.contains(m))
            })
        })
        .collect()
}

/// The bijection `Bl_G(L)_{>= (S,X)} -> Bl_{G_X}(L_{>= X})` sending `(T, Y)`
/// to `({(t v X) in [0,Y] : t in T \ G_{<= X}}, Y)`, checked to be an order
/// isomorphism. Returns the pairs (index in `bl`, index in the contracted
/// blowup) on success.
pub fn contraction_isomorphism(
    p: &RankedPoset,
    g: &BuildingSet,
    bl: &BlowupPoset,
    base: usize,
) -> Result<Vec<(usize, usize)>, String> {
    let x = bl.projection(base);
    let c = contraction(p, g, x).map_err(|e| e.to_string())?;
    let cbl = blowup_building(&c.poset, &c.building);
    let upper: Vec<usize> = bl.poset.above(base);
    let to_local: BTreeMap<usize, usize> = c.map.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let mut pairs = Vec::new();
    for &e in &upper {
        let t = &bl.nested[e];
        let y = t.top;
        let mut image = Vec::new();
        for &m in &t.members {
            if p.leq(m, x) {
                continue;
            }
            let j = p
                .join_below(&[m, x], y)
                .ok_or_else(|| format!("no join of {} and X below {}", p.label(m), p.label(y)))?;
            image.push(to_local[&j]);
        }
        image.sort_by_key(|&z| c.building.position(z));
        image.dedup();
        let target = NestedSet {
            members: image,
            top: to_local[&y],
        };
        let idx = cbl
            .index_of(&target)
            .ok_or_else(|| format!("image of {} is not nested", t.label(p)))?;
        pairs.push((e, idx));
    }
    if pairs.len() != cbl.len() {
        return Err(format!(
            "size mismatch: {} above base, {} in contracted blowup",
            pairs.len(),
            cbl.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for &(_, j) in &pairs {
        if !seen.insert(j) {
            return Err("map is not injective".into());
        }
    }
    for &(a, fa) in &pairs {
        for &(b, fb) in &pairs {
            if bl.poset.leq(a, b) != cbl.poset.leq(fa, fb) {
                return Err(format!(
                    "order not preserved between {} and {}",
                    bl.poset.label(a),
                    bl.poset.label(b)
                ));
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_covers(labels: &[&str], ranks: &[usize], covers: &[(&str, &str)]) -> RankedPoset {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| labels.iter().position(|l| l == s).unwrap();
        let rel: Vec<(usize, usize)> = covers.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
        RankedPoset::from_relations(labels.clone(), ranks.to_vec(), &rel).unwrap()
    }

    fn b2() -> RankedPoset {
        from_covers(
            &["0", "x", "y", "T"],
            &[0, 1, 1, 2],
            &[("0", "x"), ("0", "y"), ("x", "T"), ("y", "T")],
        )
    }

    #[test]
    fn three_atoms_two_tops_is_not_local_lattice() {
        // without a top every lower interval is still a lattice
        let open = from_covers(
            &["0", "u", "v", "w", "s", "t"],
            &[0, 1, 1, 1, 2, 2],
            &[
                ("0", "u"),
                ("0", "v"),
                ("0", "w"),
                ("u", "s"),
                ("v", "s"),
                ("w", "s"),
                ("u", "t"),
                ("v", "t"),
                ("w", "t"),
            ],
        );
        assert!(open.is_local_lattice());
        assert_eq!(open.joins(1, 2), vec![4, 5]);
        let closed = from_covers(
            &["0", "u", "v", "w", "s", "t", "top"],
            &[0, 1, 1, 1, 2, 2, 3],
            &[
                ("0", "u"),
                ("0", "v"),
                ("0", "w"),
                ("u", "s"),
                ("v", "s"),
                ("w", "s"),
                ("u", "t"),
                ("v", "t"),
                ("w", "t"),
                ("s", "top"),
                ("t", "top"),
            ],
        );
        assert!(!closed.is_local_lattice());
    }

    #[test]
    fn boolean_two_atoms() {
        let p = b2();
        assert!(p.is_local_lattice());
        assert_eq!(minimal_building_set(&p), vec![1, 2]);
        assert!(is_building_set(&p, &[1, 2], true));
        assert!(is_building_set(&p, &[1, 2, 3], true));
        assert!(!is_building_set(&p, &[1], false));
    }

    #[test]
    fn blowup_b2_at_top() {
        let p = b2();
        let b = blowup_at(&p, 3).unwrap();
        let mut labels: Vec<&str> = b.poset.labels().iter().map(|s| s.as_str()).collect();
        labels.sort_unstable();
        assert_eq!(labels, vec!["(T,0)", "(T,x)", "(T,y)", "0", "x", "y"]);
        assert!(b.poset.is_local_lattice());
        assert!(blowup_at(&p, 0).is_err());
    }

    #[test]
    fn blowup_at_atom_relabels() {
        let p = b2();
        let b = blowup_at(&p, 1).unwrap();
        // (x,0) replaces x, (x,y) replaces T
        assert_eq!(b.poset.len(), 4);
        let labels: BTreeSet<&str> = b.poset.labels().iter().map(|s| s.as_str()).collect();
        assert_eq!(labels, ["0", "y", "(x,0)", "(x,y)"].into_iter().collect());
    }

    #[test]
    fn empty_building_set_blowup() {
        let p = b2();
        let g = BuildingSet::new(&p, &[]).unwrap();
        let bl = blowup_building(&p, &g);
        assert_eq!(bl.len(), 1);
    }

    #[test]
    fn order_must_refine() {
        let p = b2();
        assert!(BuildingSet::with_order(&p, &[1, 3]).is_err());
        assert!(BuildingSet::with_order(&p, &[3, 1]).is_ok());
        assert_eq!(
            BuildingSet::new(&p, &[1, 2, 3]).unwrap().members(),
            &[3, 1, 2]
        );
    }

    #[test]
    fn single_divisor_deletion() {
        let p = from_covers(&["0", "H"], &[0, 1], &[("0", "H")]);
        let g = BuildingSet::new(&p, &[1]).unwrap();
        let d = deletion(&p, &g).unwrap();
        assert_eq!(d.poset.len(), 1);
        assert!(d.building.is_empty());
        let c = contraction(&p, &g, 1).unwrap();
        assert_eq!(c.poset.len(), 1);
        assert!(c.building.is_empty());
    }
}
