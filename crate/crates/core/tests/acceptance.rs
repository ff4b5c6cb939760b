//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::{One, Signed};
use wonder_core::admissible::{
    check_recursion, enumerate_am, enumerate_b, generating_function, peel_down, Series,
};
use wonder_core::arrangement::poset_of_layers;
use wonder_core::fixtures::{
    a1_point, a22_fan, a_nc, boolean_poset, p1_fan, running_fan, running_layers,
    triple_divisor_poset,
};
use wonder_core::poset::{
    blowup_at, blowup_building, contraction, contraction_isomorphism, is_well_connected,
    iterated_blowup, maximal_nested_over, minimal_building_set, minimal_well_connected,
    nested_sets, BuildingSet, RankedPoset,
};
use wonder_core::presentation::{
    c_order, restriction_map_check, toric_basis, toric_report, ModelData, ModelPresentation,
};

const ORACLE_LIMIT: usize = 400_000;

type Check = Result<(), String>;

/// Number, name, time budget in seconds, check.
type Criterion = (u32, &'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn labels(p: &RankedPoset, xs: &[usize]) -> BTreeSet<String> {
    xs.iter().map(|&x| p.label(x).to_string()).collect()
}

fn set(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn running_data() -> ModelData {
    let lp = running_layers();
    let g = BuildingSet::from_labels(&lp.poset, &["P1", "P2", "P3", "a", "b", "c"]).unwrap();
    ModelData::from_layers(&lp, g, running_fan()).unwrap()
}

fn min_data(
    arr: &wonder_core::arrangement::ToricArrangement,
    fan: wonder_core::fan::Fan,
) -> ModelData {
    let lp = poset_of_layers(arr).unwrap();
    let g = BuildingSet::new(&lp.poset, &minimal_building_set(&lp.poset)).unwrap();
    ModelData::from_layers(&lp, g, fan).unwrap()
}

fn c1() -> Check {
    let p = running_layers().poset;
    ensure(p.len() == 10, || {
        format!("{} layers including the torus", p.len())
    })?;
    let mut ranks = p.ranks()[1..].to_vec();
    ranks.sort_unstable();
    ensure(ranks == [1, 1, 2, 2, 2, 2, 3, 3, 3], || {
        format!("ranks {ranks:?}")
    })?;
    let covers: BTreeSet<(String, String)> = p
        .covers()
        .iter()
        .map(|&(x, y)| (p.label(x).to_string(), p.label(y).to_string()))
        .collect();
    let mut want = BTreeSet::new();
    for a in ["a", "b", "c"] {
        want.insert(("0".to_string(), a.to_string()));
    }
    for i in 1..=3 {
        want.insert(("a".into(), format!("L{i}")));
        want.insert(("b".into(), format!("L{i}")));
        want.insert((format!("L{i}"), format!("P{i}")));
        want.insert(("c".into(), format!("P{i}")));
    }
    ensure(covers == want, || format!("covers {covers:?}"))
}

fn c2() -> Check {
    let p = running_layers().poset;
    let gmin = minimal_building_set(&p);
    ensure(
        labels(&p, &gmin) == set(&["a", "b", "c", "P1", "P2", "P3"]),
        || format!("{:?}", labels(&p, &gmin)),
    )?;
    let wc = minimal_well_connected(&p, &gmin).map_err(|e| e.to_string())?;
    ensure(wc == (1..p.len()).collect::<Vec<_>>(), || {
        format!("{:?}", labels(&p, &wc))
    })?;
    ensure(
        is_well_connected(&p, &wc) && !is_well_connected(&p, &gmin),
        || "well-connectedness".into(),
    )
}

fn c3() -> Check {
    for (n, c) in [(2usize, 2i64), (2, 3), (3, 2)] {
        let p = poset_of_layers(&a_nc(n, c)).unwrap().poset;
        let gmin = minimal_building_set(&p);
        ensure(gmin.len() == n, || {
            format!("A({n},{c}) min size {}", gmin.len())
        })?;
        let wc = minimal_well_connected(&p, &gmin).map_err(|e| e.to_string())?;
        let formula = ((c + 1).pow(n as u32) - 1) / c;
        ensure(wc.len() as i64 == formula, || {
            format!("A({n},{c}) well-connected size {} vs {formula}", wc.len())
        })?;
    }
    Ok(())
}

fn c4() -> Check {
    let p = running_layers().poset;
    let g = BuildingSet::new(&p, &minimal_building_set(&p)).unwrap();
    let ns = nested_sets(&p, &g);
    ensure(ns.len() == 21, || format!("{} nested sets", ns.len()))?;
    let got: BTreeSet<String> = ns
        .iter()
        .map(|s| {
            let mut m: Vec<&str> = s.members.iter().map(|&x| p.label(x)).collect();
            m.sort_unstable();
            format!("{}|{}", m.join(","), p.label(s.top))
        })
        .collect();
    let mut want = BTreeSet::new();
    for x in ["a", "b", "c"] {
        want.insert(format!("{x}|{x}"));
    }
    for i in 1..=3 {
        want.insert(format!("P{i}|P{i}"));
        for x in ["a", "b", "c"] {
            want.insert(format!("P{i},{x}|P{i}"));
        }
        want.insert(format!("a,b|L{i}"));
        want.insert(format!("P{i},a,b|P{i}"));
    }
    ensure(got == want, || format!("labels {got:?}"))?;
    let reference = blowup_building(&p, &g);
    let orders = [
        ["P1", "P2", "P3", "a", "b", "c"],
        ["P3", "P2", "P1", "c", "b", "a"],
        ["P2", "P3", "P1", "b", "c", "a"],
    ];
    for order in orders {
        let go = BuildingSet::from_labels(&p, &order).unwrap();
        let (q, sets) = iterated_blowup(&p, &go).map_err(|e| e.to_string())?;
        let mut map = Vec::new();
        for s in sets {
            let mut s = s.clone();
            s.members.sort_by_key(|&m| g.position(m));
            map.push(
                reference
                    .index_of(&s)
                    .ok_or_else(|| format!("{order:?}: {s:?} missing"))?,
            );
        }
        ensure(q.is_isomorphism(&reference.poset, &map), || {
            format!("{order:?} not isomorphic")
        })?;
    }
    Ok(())
}

fn c5() -> Check {
    let p = running_layers().poset;
    let g = BuildingSet::from_labels(&p, &["P1", "P2", "P3", "a", "b", "c"]).unwrap();
    let c = p.index_of("c").unwrap();
    let con = contraction(&p, &g, c).map_err(|e| e.to_string())?;
    ensure(con.poset.len() == 4, || {
        format!("{} elements", con.poset.len())
    })?;
    ensure(
        labels(&con.poset, con.building.members()) == set(&["P1", "P2", "P3"]),
        || "G_c".into(),
    )?;
    let bl = blowup_building(&p, &g);
    let bases = maximal_nested_over(&bl, c);
    ensure(!bases.is_empty(), || "no nested set over c".into())?;
    for base in bases {
        contraction_isomorphism(&p, &g, &bl, base)?;
    }
    Ok(())
}

fn c6() -> Check {
    let r = toric_report(&running_fan(), ORACLE_LIMIT).map_err(|e| e.to_string())?;
    ensure(r.consistent(), || format!("{r:?}"))?;
    ensure(r.betti() == [1, 11, 11, 1], || format!("{:?}", r.betti()))
}

fn c7() -> Check {
    let m = ModelPresentation::new(running_data()).map_err(|e| e.to_string())?;
    let r = m.betti(ORACLE_LIMIT).map_err(|e| e.to_string())?;
    ensure(r.consistent(), || format!("{r:?}"))?;
    ensure(r.betti == [1, 15, 15, 1], || {
        format!("escalier {:?}", r.betti)
    })?;
    ensure(r.oracle[..4] == [1, 15, 15, 1], || {
        format!("oracle {:?}", r.oracle)
    })?;
    let b = enumerate_b(&m);
    let counts = generating_function(b.iter().map(|e| e.degree()));
    ensure(counts == [1, 15, 15, 1], || format!("|B| {counts:?}"))
}

fn c8() -> Check {
    let m = ModelPresentation::new(running_data()).map_err(|e| e.to_string())?;
    ensure(m.cap == 4, || format!("cap {}", m.cap))?;
    let check = m.verify_groebner().map_err(|e| e.to_string())?;
    ensure(check.ok(), || {
        format!(
            "{} of {} pairs fail",
            check.failures.len(),
            check.pairs_checked
        )
    })
}

fn c9() -> Check {
    let data = running_data();
    let m = ModelPresentation::new(data.clone()).map_err(|e| e.to_string())?;
    let am: BTreeSet<String> = enumerate_am(&data.poset, &data.building)
        .iter()
        .map(|f| {
            if f.chain.is_empty() {
                return "1".to_string();
            }
            let parts: Vec<String> = f
                .chain
                .iter()
                .map(|&(a, e)| {
                    if e == 1 {
                        m.t_label(a)
                    } else {
                        format!("{}^{e}", m.t_label(a))
                    }
                })
                .collect();
            parts.join("*")
        })
        .collect();
    let want = set(&[
        "1", "t{c}", "t{P1}", "t{P2}", "t{P3}", "t{P1}^2", "t{P2}^2", "t{P3}^2",
    ]);
    ensure(am == want, || format!("AM {am:?}"))?;
    let esc = |x: &str| -> Vec<String> {
        m.toric_escalier(data.poset.index_of(x).unwrap())
            .iter()
            .map(|b| m.table.format_monomial(b))
            .collect()
    };
    ensure(esc("c") == ["1", "c3"], || format!("mu_c {:?}", esc("c")))?;
    for x in ["P1", "P2", "P3"] {
        ensure(esc(x) == ["1"], || format!("mu_{x} {:?}", esc(x)))?;
    }
    Ok(())
}

fn c10() -> Check {
    let data = running_data();
    let r = check_recursion(&data, Series::Am).map_err(|e| e.to_string())?;
    ensure(
        r.lhs == [1, 4, 3] && r.deletion == [1, 3, 3] && r.contraction == [1] && r.d == 2 && r.ok(),
        || format!("{r:?}"),
    )?;
    let rb = check_recursion(&data, Series::B).map_err(|e| e.to_string())?;
    ensure(rb.ok(), || format!("{rb:?}"))?;
    let a22 = min_data(&a_nc(2, 2), a22_fan());
    for s in [Series::Am, Series::B] {
        let steps = peel_down(&a22, s).map_err(|e| e.to_string())?;
        ensure(steps.len() == a22.building.len(), || {
            "peel-down length".into()
        })?;
        for r in steps {
            ensure(r.ok(), || format!("A(2,2) {r:?}"))?;
        }
    }
    Ok(())
}

fn c11() -> Check {
    let r = restriction_map_check(&running_data()).map_err(|e| e.to_string())?;
    ensure(r.source_generators > 0 && r.ok(), || {
        format!("{:?}", r.failures)
    })
}

fn c12() -> Check {
    let posets = vec![
        running_layers().poset,
        triple_divisor_poset(),
        poset_of_layers(&a_nc(2, 2)).unwrap().poset,
        poset_of_layers(&a_nc(2, 3)).unwrap().poset,
        boolean_poset(3),
    ];
    for p in &posets {
        for x in 1..p.len() {
            let b = blowup_at(p, x).map_err(|e| e.to_string())?;
            ensure(b.poset.is_local_lattice(), || {
                format!("blowup at {} not a local lattice", p.label(x))
            })?;
        }
        let g = BuildingSet::new(p, &minimal_building_set(p)).unwrap();
        ensure(blowup_building(p, &g).poset.is_locally_boolean(), || {
            "not locally boolean".into()
        })?;
    }
    let models = [
        running_data(),
        min_data(&a_nc(2, 2), a22_fan()),
        min_data(&a1_point(), p1_fan()),
    ];
    for data in models {
        let (table, gb) = toric_basis(&data.fan, &c_order(&data.fan).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for g in &gb {
            ensure(g.lc().abs().is_one(), || {
                format!("toric lc {}", table.format(g))
            })?;
        }
        let mut family = vec![data.clone()];
        family.extend(data.deleted().ok().map(|x| x.0));
        family.extend(data.contracted().ok().map(|x| x.0));
        for d in family {
            let m = ModelPresentation::new(d).map_err(|e| e.to_string())?;
            for r in &m.relations {
                ensure(r.poly.is_homogeneous(), || {
                    format!("{} not homogeneous", r.label)
                })?;
            }
            for g in &m.alpha {
                ensure(g.lc().abs().is_one(), || {
                    format!("alpha lc {}", m.table.format(g))
                })?;
            }
            let r = m.betti(ORACLE_LIMIT).map_err(|e| e.to_string())?;
            ensure(r.consistent(), || format!("{r:?}"))?;
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        (1, "poset of layers of the running arrangement", 1, c1),
        (2, "minimal and minimal well-connected building sets", 1, c2),
        (3, "A(n,c) building set sizes", 10, c3),
        (4, "nested sets and iterated blowups", 5, c4),
        (5, "contraction at c", 1, c5),
        (6, "toric Betti numbers of the running fan", 30, c6),
        (7, "model Betti numbers by three routes", 600, c7),
        (8, "Groebner verification of alpha at cap 4", 600, c8),
        (9, "admissible monomials and toric escaliers", 5, c9),
        (10, "deletion-contraction recursions", 30, c10),
        (11, "restriction map is well defined", 60, c11),
        (12, "property suite on fixtures", 120, c12),
    ];
    let mut failed = Vec::new();
    for (n, name, budget, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|_| {
            ensure(elapsed <= Duration::from_secs(budget), || {
                format!("took {elapsed:.2?}, budget {budget}s")
            })
        });
        match &result {
            Ok(()) => println!("criterion {n:>2}: PASS  {name} ({elapsed:.2?})"),
            Err(e) => {
                println!("criterion {n:>2}: FAIL  {name} ({elapsed:.2?}): {e}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
