//! Worked examples used by tests, the acceptance suite and the CLI.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::arrangement::{intersect_layers, poset_of_layers, LayerPoset, ToricArrangement};
use crate::fan::Fan;
use crate::intlinalg::{int_vec, Int};
use crate::poset::RankedPoset;

/// Three subtori in `(C*)^3`: `a: x = 1`, `b: x = y^3`, `c: x = z, x^2 = y^3`.
pub fn running_arrangement() -> ToricArrangement {
    let mut a = ToricArrangement::new(3);
    a.add_i64("a", &[&[1, 0, 0]], &[(0, 1)])
        .expect("valid subtorus");
    a.add_i64("b", &[&[1, -3, 0]], &[(0, 1)])
        .expect("valid subtorus");
    a.add_i64("c", &[&[1, 0, -1], &[2, -3, 0]], &[(0, 1), (0, 1)])
        .expect("valid subtorus");
    a
}

/// Poset of layers of the running arrangement with the names `L1..L3` for
/// the components of `a ∩ b` (in phase order) and `Pi` for the point above
/// `Li`.
pub fn running_layers() -> LayerPoset {
    let arr = running_arrangement();
    let mut lp = poset_of_layers(&arr).expect("running arrangement");
    let subtori = arr.subtori();
    let comps = intersect_layers(&subtori[0].layer, &subtori[1].layer).expect("same ambient rank");
    for (i, l) in comps.iter().enumerate() {
        let li = lp.find(l).expect("component is a layer");
        lp.poset.set_label(li, &format!("L{}", i + 1));
        let above: Vec<usize> = (0..lp.poset.len())
            .filter(|&z| lp.poset.lt(li, z))
            .collect();
        assert_eq!(above.len(), 1, "each L_i lies below exactly one point");
        lp.poset.set_label(above[0], &format!("P{}", i + 1));
    }
    lp
}

pub const RUNNING_RAYS: [[i64; 3]; 14] = [
    [3, 1, 3],
    [-3, -1, -3],
    [3, 2, 3],
    [-3, -2, -3],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
    [1, 1, 1],
    [2, 1, 2],
    [1, 0, 1],
    [-1, -1, -1],
    [-2, -1, -2],
    [-1, 0, -1],
];

fn half(p: &(Int, Int)) -> u8 {
    // 0 for angles in [0, pi), 1 for [pi, 2pi)
    if p.1.is_positive() || (p.1.is_zero() && p.0.is_positive()) {
        0
    } else {
        1
    }
}

/// Indices of nonzero plane vectors sorted by angle in `[0, 2pi)`, using
/// exact cross products.
pub fn angular_order(points: &[(Int, Int)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        let (p, q) = (&points[i], &points[j]);
        half(p).cmp(&half(q)).then_with(|| {
            let cross = &p.0 * &q.1 - &p.1 * &q.0;
            if cross.is_positive() {
                Ordering::Less
            } else if cross.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
    idx
}

/// Maximal cones of the running fan: the twelve rays in the plane `v1 = v3`
/// in angular order, consecutive pairs joined with `r7` and with `r8`. The
/// cyclic listing starts at `r4`, so the first cone is `{r4, r12, r7}`.
pub fn running_max_cones() -> Vec<Vec<usize>> {
    let plane: Vec<usize> = (0..14).filter(|&i| i != 6 && i != 7).collect();
    let pts: Vec<(Int, Int)> = plane
        .iter()
        .map(|&i| (Int::from(RUNNING_RAYS[i][0]), Int::from(RUNNING_RAYS[i][1])))
        .collect();
    let mut cyc: Vec<usize> = angular_order(&pts).into_iter().map(|k| plane[k]).collect();
    let start = cyc.iter().position(|&i| i == 3).expect("r4 is a plane ray");
    cyc.rotate_left(start);
    let mut cones = Vec::new();
    for k in 0..cyc.len() {
        let (u, v) = (cyc[k], cyc[(k + 1) % cyc.len()]);
        cones.push(vec![u, v, 6]);
        cones.push(vec![u, v, 7]);
    }
    cones
}

pub fn running_fan() -> Fan {
    let rays = RUNNING_RAYS.iter().map(|r| int_vec(r)).collect();
    Fan::new(3, rays, running_max_cones()).expect("running fan is valid")
}

/// `A(n, c)`: `H1 = {t1 = 1}` and `Hi = {t1 * ti^c = 1}` for `i >= 2`.
pub fn a_nc(n: usize, c: i64) -> ToricArrangement {
    let mut a = ToricArrangement::new(n);
    for i in 0..n {
        let mut chi = vec![0i64; n];
        chi[0] = 1;
        if i > 0 {
            chi[i] = c;
        }
        a.add_i64(&format!("H{}", i + 1), &[&chi], &[(0, 1)])
            .expect("valid subtorus");
    }
    a
}

/// A smooth complete fan in `Z^2` containing the annihilators of `(1,0)`
/// and `(1,2)` as rays, suitable for `A(2,2)`.
pub fn a22_fan() -> Fan {
    Fan::from_i64(
        2,
        &[
            &[1, 0],
            &[0, 1],
            &[-1, 1],
            &[-2, 1],
            &[-1, 0],
            &[0, -1],
            &[1, -1],
            &[2, -1],
        ],
        &[
            &[0, 1],
            &[1, 2],
            &[2, 3],
            &[3, 4],
            &[4, 5],
            &[5, 6],
            &[6, 7],
            &[7, 0],
        ],
    )
    .expect("valid fan")
}

/// The projective line as a fan in `Z^1`.
pub fn p1_fan() -> Fan {
    Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]).expect("valid fan")
}

pub fn a1_point() -> ToricArrangement {
    let mut a = ToricArrangement::new(1);
    a.add_i64("pt", &[&[1]], &[(0, 1)]).expect("valid subtorus");
    a
}

fn poset_from_covers(labels: &[&str], ranks: &[usize], covers: &[(&str, &str)]) -> RankedPoset {
    let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let idx = |s: &str| labels.iter().position(|l| l == s).expect("known label");
    let rel: Vec<(usize, usize)> = covers.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
    RankedPoset::from_relations(labels.clone(), ranks.to_vec(), &rel).expect("valid poset")
}

/// Flats of three divisors in a blown-up projective space whose triple
/// intersection is a line plus a point.
pub fn triple_divisor_poset() -> RankedPoset {
    poset_from_covers(
        &["0", "H", "Q1", "Q2", "l0", "l1", "l2", "C", "p"],
        &[0, 1, 1, 1, 2, 2, 2, 2, 3],
        &[
            ("0", "H"),
            ("0", "Q1"),
            ("0", "Q2"),
            ("H", "l0"),
            ("Q1", "l0"),
            ("Q2", "l0"),
            ("H", "l1"),
            ("Q1", "l1"),
            ("H", "l2"),
            ("Q2", "l2"),
            ("Q1", "C"),
            ("Q2", "C"),
            ("l1", "p"),
            ("l2", "p"),
            ("C", "p"),
        ],
    )
}

/// Boolean lattice on `k` atoms `e0..`, elements indexed by bitmask.
pub fn boolean_poset(k: usize) -> RankedPoset {
    let n = 1usize << k;
    let labels = (0..n)
        .map(|m| {
            if m == 0 {
                "0".to_string()
            } else {
                (0..k)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| format!("e{i}"))
                    .collect::<Vec<_>>()
                    .join("+")
            }
        })
        .collect();
    let ranks = (0..n).map(|m| m.count_ones() as usize).collect();
    let leq = (0..n)
        .map(|a| (0..n).map(|b| a & b == a).collect())
        .collect();
    RankedPoset::from_leq(labels, ranks, leq).expect("boolean lattice")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_order_of_plane_rays() {
        let order: Vec<usize> = running_max_cones()
            .iter()
            .step_by(2)
            .map(|c| c[0] + 1)
            .collect();
        assert_eq!(order, vec![4, 12, 6, 11, 1, 10, 3, 9, 5, 14, 2, 13]);
    }

    #[test]
    fn running_names() {
        let lp = running_layers();
        for name in ["a", "b", "c", "L1", "L2", "L3", "P1", "P2", "P3"] {
            assert!(lp.poset.index_of(name).is_some(), "{name}");
        }
    }
}
