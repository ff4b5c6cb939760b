use num_traits::{One, Signed, Zero};
use wonder_core::arrangement::poset_of_layers;
use wonder_core::fixtures::{a22_fan, a_nc, p1_fan, running_fan, running_layers};
use wonder_core::intlinalg::{dot, Int};
use wonder_core::polyring::{
    buchberger, graded_rank_oracle, normal_form, Polynomial, VariableTable,
};
use wonder_core::poset::{minimal_building_set, BuildingSet};
use wonder_core::presentation::*;

const ORACLE_LIMIT: usize = 400_000;

fn running(order: &[&str]) -> ModelData {
    let lp = running_layers();
    let g = BuildingSet::from_labels(&lp.poset, order).unwrap();
    ModelData::from_layers(&lp, g, running_fan()).unwrap()
}

fn running_min() -> ModelData {
    running(&["P1", "P2", "P3", "a", "b", "c"])
}

fn a22() -> ModelData {
    let lp = poset_of_layers(&a_nc(2, 2)).unwrap();
    let g = BuildingSet::new(&lp.poset, &minimal_building_set(&lp.poset)).unwrap();
    ModelData::from_layers(&lp, g, a22_fan()).unwrap()
}

fn var_poly(t: &VariableTable, name: &str, exp: u16) -> Polynomial {
    let i = t.index_of(name).unwrap_or_else(|| panic!("{name}"));
    Polynomial::term(t.monomial_from(&[(i, exp)]), Int::one())
}

#[test]
fn toric_betti_of_running_fan() {
    let f = running_fan();
    assert_eq!(toric_betti(&f).unwrap(), vec![1, 11, 11, 1]);
    // independent route: SNF ranks of the toric ideal alone
    let (table, _) = toric_basis(&f, &c_order(&f).unwrap()).unwrap();
    let mut vars = vec![0; f.rays().len()];
    for (k, r) in c_order(&f).unwrap().into_iter().enumerate() {
        vars[r] = k;
    }
    let gens = toric_relations(&f, &table, &vars);
    let ranks: Vec<usize> = (0..=4)
        .map(|d| {
            let o = graded_rank_oracle(&gens, &table, d, ORACLE_LIMIT).unwrap();
            assert!(o.torsion.is_empty(), "torsion in degree {d}");
            o.free_rank
        })
        .collect();
    assert_eq!(ranks, vec![1, 11, 11, 1, 0]);
}

#[test]
fn toric_bases_are_monic() {
    for f in [running_fan(), a22_fan(), p1_fan()] {
        let (table, gb) = toric_basis(&f, &c_order(&f).unwrap()).unwrap();
        for g in &gb {
            assert!(g.lc().abs().is_one(), "{}", table.format(g));
        }
    }
}

#[test]
fn ascending_ray_order_is_not_monic_on_running_fan() {
    // lead cone first, then the remaining rays by id
    let f = running_fan();
    let lead = f.lead_cone().unwrap().to_vec();
    let order: Vec<usize> = lead
        .iter()
        .copied()
        .chain((0..14).filter(|r| !lead.contains(r)))
        .collect();
    let (table, gb) = toric_basis(&f, &order).unwrap();
    let bad: Vec<String> = gb
        .iter()
        .filter(|g| !g.lc().abs().is_one())
        .map(|g| table.format(g))
        .collect();
    assert_eq!(bad, vec!["3*c5*c14 + c14^2"]);
}

#[test]
fn running_model_betti() {
    let m = ModelPresentation::new(running_min()).unwrap();
    assert_eq!(m.table.len(), 35);
    let r = m.betti(ORACLE_LIMIT).unwrap();
    assert!(r.consistent(), "{r:?}");
    assert_eq!(r.betti, vec![1, 15, 15, 1]);
    assert_eq!(r.escalier, vec![1, 15, 15, 1, 0]);
    for g in &m.alpha {
        assert!(g.lc().abs().is_one(), "{}", m.table.format(g));
    }
}

#[test]
fn running_model_escalier_in_degree_two() {
    let m = ModelPresentation::new(running_min()).unwrap();
    let esc = m.escalier();
    let mut t_part: Vec<String> = esc[2]
        .free
        .iter()
        .filter(|x| x.support().iter().any(|&v| m.element_of_var(v).is_some()))
        .map(|x| m.table.format_monomial(x))
        .collect();
    t_part.sort();
    assert_eq!(t_part, vec!["t{P1}^2", "t{P2}^2", "t{P3}^2", "t{c}*c3"]);
}

#[test]
fn betti_independent_of_building_order() {
    for order in [
        ["P3", "P2", "P1", "c", "b", "a"],
        ["P2", "P1", "P3", "b", "c", "a"],
    ] {
        let m = ModelPresentation::new(running(&order)).unwrap();
        let r = m.betti(ORACLE_LIMIT).unwrap();
        assert!(r.consistent(), "{order:?}: {r:?}");
        assert_eq!(r.betti, vec![1, 15, 15, 1]);
    }
}

#[test]
fn literal_order_is_not_groebner() {
    let m = ModelPresentation::with_order(running_min(), VariableOrder::Literal).unwrap();
    let check = m.verify_groebner().unwrap();
    assert_eq!(check.failures.len(), 41);
    // witness: t{P3,b} + t{P3}^2 lies in the ideal, but its leading
    // monomial t{P3}^2 is not divisible by any leading monomial of alpha
    let f = var_poly(&m.table, "t{P3,b}", 1).add(&var_poly(&m.table, "t{P3}", 2));
    assert_eq!(m.table.format_monomial(f.lm()), "t{P3}^2");
    assert!(m.alpha.iter().all(|g| !g.lm().divides(f.lm())));
    let split = ModelPresentation::new(running_min()).unwrap();
    let g = var_poly(&split.table, "t{P3,b}", 1).add(&var_poly(&split.table, "t{P3}", 2));
    assert!(split.normal_form(&g).is_zero());
}

#[test]
fn claimed_leading_monomials() {
    let lit = ModelPresentation::with_order(running_min(), VariableOrder::Literal).unwrap();
    assert!(lit.claim_mismatches().is_empty());
    let m = ModelPresentation::new(running_min()).unwrap();
    let bad: Vec<&str> = m
        .claim_mismatches()
        .iter()
        .map(|r| r.label.as_str())
        .collect();
    // under the split order the join variable leads for {Pi} against {a}, {b}
    assert_eq!(
        bad,
        vec![
            "t{P1}*t{a}",
            "t{P1}*t{b}",
            "t{P2}*t{a}",
            "t{P2}*t{b}",
            "t{P3}*t{a}",
            "t{P3}*t{b}"
        ]
    );
}

#[test]
fn vanishing_relations_follow_annihilators() {
    let data = running_min();
    let m = ModelPresentation::new(data.clone()).unwrap();
    let c = data.poset.index_of("c").unwrap();
    let gamma = &data.lattices[c];
    // rays orthogonal to both characters of c, by direct dot products
    let expected: Vec<String> = (0..14)
        .filter(|&r| {
            gamma
                .basis_rows()
                .iter()
                .any(|chi| !dot(chi, &data.fan.rays()[r]).is_zero())
        })
        .map(|r| format!("c{}*t{{c}}", r + 1))
        .collect();
    let mut got: Vec<String> = m
        .relations
        .iter()
        .filter(|r| r.kind == RelationKind::Vanishing && r.label.ends_with("*t{c}"))
        .map(|r| r.label.clone())
        .collect();
    got.sort();
    let mut expected = expected;
    expected.sort();
    assert_eq!(expected.len(), 12);
    assert_eq!(got, expected);
}

#[test]
fn relations_are_homogeneous() {
    let m = ModelPresentation::new(running_min()).unwrap();
    for r in &m.relations {
        assert!(r.poly.is_homogeneous(), "{}", r.label);
    }
    for g in &m.toric {
        assert!(g.is_homogeneous());
    }
}

#[test]
fn ideal_matches_alpha() {
    let m = ModelPresentation::new(running_min()).unwrap();
    let gens = m.ideal_generators();
    for g in &gens {
        assert!(m.normal_form(g).is_zero());
    }
    let gb = buchberger(&gens, m.table.weights(), Some(m.cap)).unwrap();
    for a in &m.alpha {
        assert!(normal_form(a, &gb).is_zero(), "{}", m.table.format(a));
    }
}

#[test]
fn negated_complement_basis_keeps_escalier() {
    let a = ModelPresentation::new(running_min()).unwrap();
    let b = ModelPresentation::with_chi(running_min(), ChiChoice::Negated).unwrap();
    let counts = |m: &ModelPresentation| {
        m.escalier()
            .iter()
            .map(|s| s.free.len())
            .collect::<Vec<_>>()
    };
    assert_eq!(counts(&a), counts(&b));
}

#[test]
fn restriction_map_is_well_defined() {
    let r = restriction_map_check(&running_min()).unwrap();
    assert!(r.ok(), "{:?}", r.failures);
    assert!(r.source_generators > 0);
}

#[test]
fn deletion_contraction_hilbert() {
    let data = running_min();
    let (del, _) = data.deleted().unwrap();
    let (con, _) = data.contracted().unwrap();
    let h = |d: &ModelData| -> Vec<i64> {
        ModelPresentation::new(d.clone())
            .unwrap()
            .betti(ORACLE_LIMIT)
            .unwrap()
            .betti
            .iter()
            .map(|&x| x as i64)
            .collect()
    };
    let (hy, hz) = (h(&del), h(&con));
    assert_eq!(hy, vec![1, 14, 14, 1]);
    assert_eq!(hz, vec![1, 1]);
    let c = data.poset.index_of("c").unwrap();
    assert_eq!(
        blowup_hilbert(&hy, &hz, data.poset.rank(c)).unwrap(),
        vec![1, 15, 15, 1]
    );
}

#[test]
fn blowup_hilbert_of_point_in_plane() {
    assert_eq!(blowup_hilbert(&[1, 2, 1], &[1], 2), Some(vec![1, 3, 1]));
    assert_eq!(blowup_hilbert(&[1], &[1], 0), None);
}

#[test]
fn a22_model() {
    let m = ModelPresentation::new(a22()).unwrap();
    let r = m.betti(ORACLE_LIMIT).unwrap();
    assert!(r.consistent(), "{r:?}");
    assert_eq!(r.betti, vec![1, 6, 1]);
}
