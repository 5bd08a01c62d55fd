//! Acceptance criteria, one line each. Every criterion is exact (zero
//! tolerance) and carries a wall-clock limit; a criterion passes only when its
//! check holds and it finishes within the limit.

use std::time::{Duration, Instant};

use gpkn_core::bollobas::ORACLE_CAP;
use gpkn_core::families::{
    max_le1_almost_intersecting_bruteforce, random_maximal_system, star, system_stats,
};
use gpkn_core::geodesy::{
    check_gp_components, check_gp_direct, gp_solve_exact, gp_solve_naive, SolveLimits,
};
use gpkn_core::kneser::{all_pairs_distances, diameter};
use gpkn_core::rng::SplitMix64;
use gpkn_core::theorems::{
    build_counterexample, classic_suite, closing_inequalities, counterexample_distances,
    lemma5_suite, n2k1_pattern_scan, threshold_comparison,
};
use gpkn_core::{choose, DistanceMatrix, KSet, KneserParams, SimpleGraph};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn run(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let ok = out.ok && took <= limit;
    let timing = format!("{:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs());
    println!(
        "{} {:>2} {name}: {} ({timing})",
        if ok { "PASS" } else { "FAIL" },
        id,
        out.detail
    );
    ok
}

fn kneser_dm(n: u32, k: u32) -> (KneserParams, DistanceMatrix) {
    let p = KneserParams::new(n, k).unwrap();
    (p, all_pairs_distances(p).unwrap())
}

fn odd_graph_formula(k: u32, s: u32) -> u32 {
    std::cmp::min(2 * (k - s), 2 * s + 1)
}

fn c1_distance_formula() -> Outcome {
    let mut pairs = 0u64;
    for k in 2..=4 {
        let (p, dm) = kneser_dm(2 * k + 1, k);
        let vs: Vec<KSet> = p.vertices().collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                pairs += 1;
                let want = odd_graph_formula(k, (vs[i].mask() & vs[j].mask()).count_ones());
                if dm.get(i, j) as u32 != want {
                    return fail(format!(
                        "k={k}: d({}, {}) = {} but formula gives {want}",
                        vs[i],
                        vs[j],
                        dm.get(i, j)
                    ));
                }
            }
        }
    }
    pass(format!("{pairs} pairs of Kn(5,2), Kn(7,3), Kn(9,4) match"))
}

fn c2_diameter_threshold() -> Outcome {
    let mut checked = 0;
    for k in 2..=6u32 {
        for n in 2 * k + 1..=3 * k + 2 {
            if choose(n, k) > 100_000 {
                continue;
            }
            let d = diameter(KneserParams::new(n, k).unwrap()).unwrap();
            let predicted = 2 * n + 1 >= 5 * k;
            if (d <= 3) != predicted {
                return fail(format!("Kn({n},{k}) has diameter {d}"));
            }
            checked += 1;
        }
    }
    pass(format!("{checked} graphs, diam <= 3 iff n >= 2.5k - 0.5"))
}

fn star_indices(p: KneserParams) -> Vec<usize> {
    star(p.n(), p.k(), 1)
        .unwrap()
        .iter()
        .map(|&s| p.rank(s).unwrap() as usize)
        .collect()
}

fn c3_star_boundary() -> Outcome {
    let (p, dm) = kneser_dm(10, 4);
    let s = star_indices(p);
    if s.len() as u64 != choose(9, 3) || s.len() != 84 {
        return fail(format!("star has {} members", s.len()));
    }
    match check_gp_direct(&dm, &s).unwrap().witness() {
        None => pass("star(10,4,1) with 84 members is in general position"),
        Some(w) => fail(format!("blocked by {w:?}")),
    }
}

fn c4_star_failure() -> Outcome {
    let ce = build_counterexample(6, 2).unwrap();
    if !ce.structure_ok() || ce.path.len() != 5 || !ce.middle().contains(1) {
        return fail(format!("bad construction {ce:?}"));
    }
    let d = counterexample_distances(&ce, 10_000).unwrap();
    if !d.confirms() {
        return fail(format!("path distances {d:?}"));
    }
    let (p, dm) = kneser_dm(14, 6);
    let Some(w) = check_gp_direct(&dm, &star_indices(p)).unwrap().witness() else {
        return fail("star(14,6,1) passed the direct check");
    };
    let (x, z, y) = (
        p.vertex(w.x as u64).unwrap(),
        p.vertex(w.z as u64).unwrap(),
        p.vertex(w.y as u64).unwrap(),
    );
    let sum = dm.get(w.x, w.z) as u32 + dm.get(w.z, w.y) as u32;
    if sum != dm.get(w.x, w.y) as u32 || ![x, z, y].iter().all(|s| s.contains(1)) {
        return fail(format!("witness {x} {z} {y} does not re-refute"));
    }
    pass(format!(
        "d(F1,F2) = {}, middle {} contains 1; star witness {x} -> {z} -> {y}",
        d.d_f1_f2,
        ce.middle()
    ))
}

fn c5_solver_oracle() -> Outcome {
    let limits = SolveLimits::default();
    let mut graphs: Vec<(String, DistanceMatrix)> = Vec::new();
    for i in 0..60u64 {
        let order = 4 + (i % 11) as usize;
        let density = [15, 30, 50, 70][(i % 4) as usize];
        let g = SimpleGraph::random_connected(order, density, 1000 + i).unwrap();
        graphs.push((
            format!("random #{i} (order {order})"),
            g.distances().unwrap(),
        ));
    }
    graphs.push(("Kn(5,2)".into(), kneser_dm(5, 2).1));
    graphs.push(("Kn(6,2)".into(), kneser_dm(6, 2).1));
    for (name, dm) in &graphs {
        let naive = gp_solve_naive(dm).unwrap();
        let exact = gp_solve_exact(dm, None, &limits).unwrap();
        if naive != exact {
            return fail(format!("{name}: naive {naive:?}, exact {exact:?}"));
        }
    }
    let petersen = gp_solve_naive(&kneser_dm(5, 2).1).unwrap().size;
    if petersen != 6 {
        return fail(format!("gp(Kn(5,2)) = {petersen}"));
    }
    pass(format!(
        "{} graphs agree; gp(Kn(5,2)) = {petersen}",
        graphs.len()
    ))
}

fn c6_checker_equivalence() -> Outcome {
    let mut rng = SplitMix64::new(7);
    let mut instances = 0;
    let mut passing = 0;
    for g in 0..100u64 {
        let order = 3 + (g % 10) as usize;
        let density = [10, 25, 45, 65, 85][(g % 5) as usize];
        let dm = SimpleGraph::random_connected(order, density, g)
            .unwrap()
            .distances()
            .unwrap();
        for _ in 0..6 {
            let size = 1 + rng.below(order);
            let mut verts: Vec<usize> = (0..order).collect();
            rng.shuffle(&mut verts);
            let set = &verts[..size];
            let direct = check_gp_direct(&dm, set).unwrap().is_pass();
            let comp = check_gp_components(&dm, set).unwrap().is_pass();
            if direct != comp {
                return fail(format!(
                    "order {order}, set {set:?}: direct {direct}, components {comp}"
                ));
            }
            instances += 1;
            passing += direct as u32;
        }
    }
    pass(format!(
        "{instances} instances ({passing} in general position)"
    ))
}

fn c7_bollobas() -> Outcome {
    const { assert!(ORACLE_CAP >= 6) };
    let classic = classic_suite(6, 2).unwrap();
    let lemma = lemma5_suite(6, 2).unwrap();
    let summary = format!(
        "classic: {} systems, max {}; generalised: {} systems, factorial counts {}, at most one j {}, max {}",
        classic.systems,
        classic.max_lhs,
        lemma.systems,
        if lemma.counts_match { "match" } else { "differ" },
        if lemma.at_most_one { "holds" } else { "fails" },
        lemma.max_lhs
    );
    let ok =
        classic.all_at_most_one && lemma.counts_match && lemma.at_most_one && lemma.all_at_most_one;
    if ok {
        pass(summary)
    } else {
        let witness = lemma.violation.map(|v| v.to_string()).unwrap_or_default();
        fail(format!(
            "{summary}; {} generalised systems exceed 1, e.g. {witness}",
            lemma.lhs_violations
        ))
    }
}

fn c8_theorem4_stress() -> Outcome {
    let mut trials = 0;
    for (n, k) in [(10, 4), (12, 4), (12, 5)] {
        let total_bound = choose(n - 1, k - 1) as usize;
        let m2_bound = choose(2 * k - 1, k - 1) as usize;
        for seed in 0..1000u64 {
            let sys = random_maximal_system(n, k, seed).unwrap();
            let st = system_stats(&sys);
            let total: usize = sys.families().iter().map(|f| f.len()).sum();
            let m2 = sys.families().iter().filter(|f| f.len() >= 2).count();
            if total != st.total || m2 != st.m2 {
                return fail(format!("({n},{k}) seed {seed}: stats disagree"));
            }
            if total > total_bound || m2 > m2_bound {
                return fail(format!("({n},{k}) seed {seed}: total {total}, m2 {m2}"));
            }
            trials += 1;
        }
    }
    pass(format!(
        "{trials} random maximal systems within both bounds (sampled, not exhaustive)"
    ))
}

fn c9_almost_intersecting() -> Outcome {
    let a = max_le1_almost_intersecting_bruteforce(6, 2).unwrap();
    let b = max_le1_almost_intersecting_bruteforce(7, 2).unwrap();
    let detail = format!(
        "max at (6,2) = {} (expected 5), witness {:?}; max at (7,2) = {} (expected 6)",
        a.max_size, a.witness_family, b.max_size
    );
    if a.max_size == 5 && b.max_size == 6 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn c10_pattern() -> Outcome {
    for k in 4..=6u32 {
        let scan = n2k1_pattern_scan(k).unwrap();
        if !scan.holds() {
            return fail(format!("k={k}: {scan:?}"));
        }
        // same scan against BFS distances
        let n = 2 * k + 1;
        let (p, dm) = kneser_dm(n, k);
        let f = KSet::from_mask((1 << k) - 1, n).unwrap();
        let f2 = KSet::from_mask(((1 << k) - 1) << k, n).unwrap();
        let (fi, f2i) = (p.rank(f).unwrap() as usize, p.rank(f2).unwrap() as usize);
        let mut qualifying = 0;
        for (gi, g) in p.vertices().enumerate() {
            if gi == fi || gi == f2i || dm.get(gi, fi) != dm.get(gi, f2i) {
                continue;
            }
            qualifying += 1;
            let (s, s2) = (g.intersection_size(f), g.intersection_size(f2));
            let ok = if k % 2 == 1 {
                g.contains(n) && s == k / 2 && s2 == k / 2
            } else {
                g.mask() & !(f.mask() | f2.mask()) == 0 && s == k / 2
            };
            if !ok {
                return fail(format!("k={k}: {g} breaks the pattern"));
            }
        }
        if qualifying != scan.qualifying {
            return fail(format!(
                "k={k}: BFS finds {qualifying}, closed form {}",
                scan.qualifying
            ));
        }
    }
    pass("k = 4, 5, 6 confirmed against BFS distances")
}

fn c11_closing() -> Outcome {
    for k in 4..=20 {
        let checks = closing_inequalities(k).unwrap();
        let product = &checks[0];
        if product.holds != (k >= 5) {
            return fail(format!("k={k}: {product:?}"));
        }
        if !checks[1].holds {
            return fail(format!("k={k}: {:?}", checks[1]));
        }
    }
    let k4 = closing_inequalities(4).unwrap();
    let chain = k4
        .iter()
        .find(|c| c.name.starts_with("C(15,3) - C(11,3)"))
        .unwrap();
    if !(chain.holds && chain.lhs == "361" && chain.rhs == "455") {
        return fail(format!("{chain:?}"));
    }
    pass("product form for 5..=20, refuted at 4; ratio form for 4..=20; 361 < 455")
}

fn c12_threshold() -> Outcome {
    let mut rows = Vec::new();
    for k in 4..=10 {
        let r = threshold_comparison(k).unwrap();
        let Some(old) = r.old_n_threshold else {
            return fail(format!("k={k}: no old threshold within k^4"));
        };
        if r.new_n_threshold >= old {
            return fail(format!("k={k}: new {} >= old {old}", r.new_n_threshold));
        }
        rows.push((k, old, r.new_n_threshold, r.remark_n));
    }
    let old4 = rows[0].1;
    let table = rows
        .iter()
        .map(|(k, o, n, _)| format!("{k}:{o}>{n}"))
        .collect::<Vec<_>>()
        .join(" ");
    let detail =
        format!("new < old for k = 4..=10 [{table}]; old(4) = {old4}, expected 55 = k^3-k^2+2k-1");
    if old4 == 55 {
        pass(detail)
    } else {
        fail(detail)
    }
}

#[test]
fn acceptance() {
    println!();
    let s = Duration::from_secs;
    let results = [
        run(1, "distance formula", s(10), c1_distance_formula),
        run(2, "diameter threshold", s(120), c2_diameter_threshold),
        run(3, "star at the boundary", s(30), c3_star_boundary),
        run(4, "star below the threshold", s(120), c4_star_failure),
        run(5, "exact solver vs naive", s(300), c5_solver_oracle),
        run(6, "checker equivalence", s(60), c6_checker_equivalence),
        run(7, "set-pair suites", s(120), c7_bollobas),
        run(8, "sum bound stress", s(120), c8_theorem4_stress),
        run(
            9,
            "almost intersecting brute force",
            s(60),
            c9_almost_intersecting,
        ),
        run(10, "odd graph pattern", s(30), c10_pattern),
        run(11, "closing arithmetic", s(1), c11_closing),
        run(12, "threshold improvement", s(10), c12_threshold),
    ];
    let failed: Vec<usize> = (1..=results.len()).filter(|&i| !results[i - 1]).collect();
    println!(
        "acceptance: {} of {} passed",
        results.len() - failed.len(),
        results.len()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
