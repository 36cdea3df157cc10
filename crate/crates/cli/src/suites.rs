//! Built-in verification suites.  `criterion-01` … `criterion-15` mirror the
//! shipped acceptance checks one-to-one; a few short aliases name common
//! single runs.  Every suite is deterministic (fixed RNG seeds where
//! randomness is called for).

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tsys_core::cluster::{
    alternating_quiver, mutate_tensor, square_product, Belt, SquareBelt,
};
use tsys_core::determinant::{
    columns_from_tsolution, s_image, verify_matches_solution, verify_minor_relations,
    PeriodicColumnMatrix, Route,
};
use tsys_core::dynkin::{self, Family, FiniteType, TwistedType};
use tsys_core::explicit2::{verify_support_lemmas, verify_tau_equals_evolution, verify_tau_solves};
use tsys_core::laurent::{Mono, Poly, Ring};
use tsys_core::levels01::{coxeter_check, level0_verify, level1_verify};
use tsys_core::qchar;
use tsys_core::qsystem::{self, QKind};
use tsys_core::report::Report;
use tsys_core::tsys::{
    solve_default, verify_periodicity, verify_relations, Point, SystemKind, SystemSpec,
    TSolution, Time,
};
use tsys_core::twisted::{
    self, preset_init_from_quotient, quotient_check, twisted_periodicity, twisted_solve,
    untwisted_on_cylinder, TwistedSpec,
};
use tsys_core::ymap::{phi, verify_y_periodicity, verify_y_system, Fraction};

/// Folds a sub-report in, prefixing its job onto each check name.
fn absorb(into: &mut Report, sub: Report) {
    for mut c in sub.checks {
        c.name = format!("{}: {}", sub.job, c.name);
        into.checks.push(c);
    }
}

fn ty(name: &str) -> FiniteType {
    FiniteType::parse(name).unwrap()
}

fn solved(kind: SystemKind, window: (Time, Time)) -> TSolution {
    solve_default(&SystemSpec::new(kind, window)).unwrap()
}

fn restricted(name: &str, level: i64, window: (Time, Time)) -> TSolution {
    solved(SystemKind::Restricted { ty: ty(name), level }, window)
}

/// Type-A half-periodicity over two full periods, from formal seeds.
pub fn criterion_01() -> Report {
    let mut report = Report::new("type A periodicity");
    for (r, l) in [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (3, 2)] {
        let p = r as i64 + 1 + l;
        let sol = restricted(&format!("A{r}"), l, (0, 4 * p + 2));
        absorb(&mut report, verify_relations(&sol, &format!("A{r} l={l}")));
        absorb(
            &mut report,
            verify_periodicity(
                &sol,
                p,
                |a, m| (r + 1 - a, l - m),
                None,
                &format!("A{r} l={l}"),
                "T(a,m,u+r+1+l) = T(r+1-a,l-m,u)",
            ),
        );
    }
    report
}

/// A2 level 2 with a spiral boundary and fresh boundary variables.
pub fn criterion_02() -> Report {
    let mut report = Report::new("spiral boundary periodicity");
    let sol = solved(
        SystemKind::SpiralA {
            r: 2,
            level: 2,
            fresh_boundary: true,
        },
        (-10, 42),
    );
    absorb(&mut report, verify_relations(&sol, "A2 l=2 spiral"));
    absorb(
        &mut report,
        verify_periodicity(
            &sol,
            5,
            |a, m| (3 - a, 2 - m),
            None,
            "A2 l=2 spiral",
            "T(a,m,u+5) = T(3-a,2-m,u)",
        ),
    );
    report
}

/// C2 level 2 via the column-determinant route: half-period 5 carrying the
/// involutive top-row factor on the last node, full period 10.
pub fn criterion_03() -> Report {
    let mut report = Report::new("type C determinant route");
    let window = (-24, 46);
    let sol = solved(SystemKind::QuasiUnitC { r: 2, level: 2 }, window);
    absorb(&mut report, verify_relations(&sol, "C2 l=2 quasi-unit"));
    let s = s_image(&sol, window).unwrap();
    absorb(&mut report, verify_relations(&s, "C2 l=2 symmetric image"));
    let mat = columns_from_tsolution(&s).unwrap();
    absorb(&mut report, verify_minor_relations(&mat, "C2 l=2 minors"));
    absorb(
        &mut report,
        verify_matches_solution(&mat, &s, "C2 l=2 minors reproduce the image"),
    );
    let ring = sol.ring.clone();
    let factor = move |p: Point| {
        if p.a == 2 {
            Poly::var(&ring, ring.sign_var(&format!("s{}", p.n.rem_euclid(2))))
        } else {
            Poly::one(&ring)
        }
    };
    absorb(
        &mut report,
        verify_periodicity(
            &sol,
            10,
            |a, m| if a == 2 { (2, 2 - m) } else { (a, 4 - m) },
            Some(&factor),
            "C2 l=2",
            "T(a,m,u+5) = [T(r,l,u) at a=r] T(a,t_a*l-m,u)",
        ),
    );
    absorb(
        &mut report,
        verify_periodicity(&sol, 20, |a, m| (a, m), None, "C2 l=2", "full period 10"),
    );
    report
}

/// D4 and B2 at level 2: direct evolution and the closed forms agree, and
/// both periodicities hold.
pub fn criterion_04() -> Report {
    let mut report = Report::new("types D and B at level 2");
    let sol = restricted("D4", 2, (0, 34));
    absorb(
        &mut report,
        verify_periodicity(&sol, 8, |a, m| (a, 2 - m), None, "D4 l=2", "half period 8"),
    );
    absorb(
        &mut report,
        verify_periodicity(&sol, 16, |a, m| (a, m), None, "D4 l=2", "full period 16"),
    );
    let sol = restricted("B2", 2, (0, 44));
    absorb(
        &mut report,
        verify_periodicity(&sol, 20, |a, m| (a, m), None, "B2 l=2", "full period 10"),
    );
    absorb(&mut report, verify_tau_solves(Family::D, 4));
    absorb(&mut report, verify_tau_solves(Family::B, 2));
    absorb(&mut report, verify_tau_equals_evolution(Family::D, 4));
    absorb(&mut report, verify_tau_equals_evolution(Family::B, 2));
    report
}

/// The level-2 support identities and closed-form constructions at small rank.
pub fn criterion_05() -> Report {
    let mut report = Report::new("closed-form identities");
    for r in 1..=6 {
        absorb(&mut report, verify_support_lemmas(Family::A, r));
    }
    for r in 4..=5 {
        absorb(&mut report, verify_support_lemmas(Family::D, r));
    }
    for r in 2..=4 {
        absorb(&mut report, verify_support_lemmas(Family::B, r));
    }
    for r in 2..=6 {
        absorb(&mut report, verify_tau_solves(Family::A, r));
    }
    for r in 4..=5 {
        absorb(&mut report, verify_tau_solves(Family::D, r));
    }
    for r in 2..=4 {
        absorb(&mut report, verify_tau_solves(Family::B, r));
    }
    report
}

fn formal_belt(name: &str, steps: usize) -> (Ring, Belt) {
    let ring = Ring::new();
    let d = dynkin::data_for(ty(name));
    let r2 = ring.clone();
    let belt = Belt::new(&ring, &d, steps, move |v| {
        Poly::var(&r2, r2.var(&format!("x{}", v + 1)))
    })
    .unwrap();
    (ring, belt)
}

/// Bipartite belts for A2 and A3: bilinear system, seed periodicity,
/// variable counts, and the Laurent property.
pub fn criterion_06() -> Report {
    let mut report = Report::new("bipartite belts");
    let (_, belt) = formal_belt("A2", 12);
    absorb(&mut report, belt.verify_t2(&dynkin::data_for(ty("A2")), "A2 belt"));
    report.check(
        "A2 seed returns to itself up to the diagram flip after 5 steps",
        "seed periodicity",
        belt.seeds[0].eq_under(&[1, 0], &belt.seeds[5])
            && belt.seeds[0].eq_under(&[0, 1], &belt.seeds[10]),
        || "seed mismatch".into(),
    );
    report.check(
        "A2 belt carries 5 distinct cluster variables",
        "variable count",
        belt.distinct_variables() == 5,
        || format!("got {}", belt.distinct_variables()),
    );
    let laurent_ok = belt
        .seeds
        .iter()
        .flat_map(|s| s.cluster.iter())
        .all(|p| !p.is_zero());
    report.check(
        "A2 belt variables are Laurent polynomials in the seeds",
        "Laurent property (exact division never fails)",
        laurent_ok,
        || "zero cluster variable".into(),
    );

    let (_, belt) = formal_belt("A3", 14);
    absorb(&mut report, belt.verify_t2(&dynkin::data_for(ty("A3")), "A3 belt"));
    report.check(
        "A3 seed returns to itself up to the diagram flip after 6 steps",
        "seed periodicity",
        belt.seeds[0].eq_under(&[2, 1, 0], &belt.seeds[6])
            && belt.seeds[0].eq_under(&[0, 1, 2], &belt.seeds[12]),
        || "seed mismatch".into(),
    );
    report.check(
        "A3 belt carries 9 distinct cluster variables",
        "variable count",
        belt.distinct_variables() == 9,
        || format!("got {}", belt.distinct_variables()),
    );
    report
}

/// The A2×A2 square-product belt and the order-6 tensor mutation.
pub fn criterion_07() -> Report {
    let mut report = Report::new("square-product belt");
    let ring = Ring::new();
    let d = dynkin::data_for(ty("A2"));
    let r2 = ring.clone();
    let belt = SquareBelt::new(&ring, &d, &d, 14, move |a, b| {
        Poly::var(&r2, r2.var(&format!("x{}{}", a + 1, b + 1)))
    })
    .unwrap();
    absorb(&mut report, belt.verify_mixed_t(&d, &d, "A2xA2 belt"));
    let (q, eps) = alternating_quiver(&d);
    let quiver = square_product(&q, &eps, &q, &eps);
    let start = tsys_core::cluster::Seed {
        quiver,
        cluster: (0..4)
            .map(|v| Poly::var(&ring, ring.var(&format!("y{v}"))))
            .collect(),
    };
    let mut s = start.clone();
    for _ in 0..6 {
        s = mutate_tensor(&ring, &s, &eps, &eps).unwrap();
    }
    report.check(
        "six tensor mutations return the initial seed",
        "order of the alternating tensor mutation",
        s == start,
        || "seed differs after six steps".into(),
    );
    report
}

fn random_matrix(route: Route, seed: u64) -> PeriodicColumnMatrix {
    let ring = Ring::new();
    let mut rng = StdRng::seed_from_u64(seed);
    let base = (0..route.period())
        .map(|_| {
            (0..route.height())
                .map(|_| Poly::constant(&ring, rng.gen_range(-9i64..=9)))
                .collect()
        })
        .collect();
    PeriodicColumnMatrix::new(ring, route, base).unwrap()
}

/// Minor identities of the column matrices on random integer data.
pub fn criterion_08() -> Report {
    let mut report = Report::new("determinant identities");
    let routes = [
        Route::TypeA { r: 1, level: 2 },
        Route::TypeA { r: 2, level: 2 },
        Route::TypeA { r: 1, level: 3 },
    ];
    for seed in 0..20u64 {
        let route = routes[(seed % 3) as usize];
        let mat = random_matrix(route, seed);
        absorb(
            &mut report,
            verify_minor_relations(&mat, &format!("random {route:?} seed {seed}")),
        );
    }
    for seed in 0..3u64 {
        let mat = random_matrix(Route::TypeC { r: 2, level: 2 }, 100 + seed);
        absorb(
            &mut report,
            verify_minor_relations(&mat, &format!("random C r=2 l=2 seed {seed}")),
        );
    }
    report
}

/// The multiplicative Y-images: collisions, Y-relations, and periodicity.
pub fn criterion_09() -> Report {
    let mut report = Report::new("Y-image checks");
    let sol = restricted("A2", 2, (-2, 14));
    let mut ok = true;
    for n in 0..6 {
        let (here, there) = if n % 2 == 1 { (1, 2) } else { (2, 1) };
        let y = phi(&sol, here, 1, n).unwrap();
        let t = sol.get(Point::new(there, 1, n)).unwrap();
        ok &= y == Fraction::from_poly(t);
    }
    report.check(
        "A2 l=2 Y-image at a node is the opposite node's value",
        "image of the multiplicative map",
        ok,
        || "image differs".into(),
    );
    absorb(
        &mut report,
        verify_y_periodicity(&sol, 5, |a, m| (3 - a, 2 - m), "A2 l=2 Y", "Y(u+5) twist"),
    );
    let sol = restricted("A3", 2, (-2, 16));
    absorb(&mut report, verify_y_system(&sol, "A3 l=2 Y-system"));
    let sol = restricted("B2", 2, (-4, 24));
    absorb(&mut report, verify_y_system(&sol, "B2 l=2 Y-system"));
    report
}

/// Level-0 exponent systems for every finite family, plus the reflection
/// route for the simply laced ones.
pub fn criterion_10() -> Report {
    let mut report = Report::new("level 0");
    for name in [
        "A1", "A2", "A3", "A4", "A5", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "D5", "D6",
        "E6", "E7", "E8", "F4", "G2",
    ] {
        absorb(&mut report, level0_verify(ty(name)));
    }
    for name in ["A1", "A2", "A3", "A4", "A5", "D4", "D5", "D6", "E6", "E7", "E8"] {
        absorb(&mut report, coxeter_check(ty(name)));
    }
    report
}

/// Level 1 for the four nonsimply laced families at minimal rank.
pub fn criterion_11() -> Report {
    let mut report = Report::new("level 1");
    for name in ["B2", "C2", "F4", "G2"] {
        absorb(&mut report, level1_verify(ty(name)).unwrap());
    }
    report
}

/// Twisted systems by direct evolution and by the untwisted quotient.
pub fn criterion_12() -> Report {
    let mut report = Report::new("twisted systems");
    for name in ["A3~2", "D4~3"] {
        let tw = TwistedType::parse(name).unwrap();
        let shift = tw.hdual + 2;
        let spec = TwistedSpec::new(tw, 2, (0, 2 * shift + 2));
        let ring = Ring::new();
        let init = twisted::preset_init(&spec, &ring);
        let sol = twisted_solve(&spec, &ring, init).unwrap();
        absorb(&mut report, twisted::verify_relations(&sol, &format!("{name} direct")));
        absorb(&mut report, twisted_periodicity(&sol, &format!("{name} direct")));
        let ring = Ring::new();
        let copies = untwisted_on_cylinder(&spec.tw, spec.level, spec.window, &ring);
        let init = preset_init_from_quotient(&spec, &copies);
        let qsol = twisted_solve(&spec, &ring, init).unwrap();
        absorb(&mut report, quotient_check(&qsol, &copies));
        absorb(&mut report, twisted_periodicity(&qsol, &format!("{name} via quotient")));
    }
    report
}

/// Q-system growth to row six with exact divisions throughout.
pub fn criterion_13() -> Report {
    let mut report = Report::new("Q-systems");
    let kinds = [
        QKind::Untwisted(ty("A2")),
        QKind::Untwisted(ty("B2")),
        QKind::Untwisted(ty("C2")),
        QKind::Twisted(TwistedType::parse("A3~2").unwrap()),
    ];
    for kind in kinds {
        let name = format!("{kind:?}");
        match qsystem::q_evolve(kind, 6) {
            Ok(st) => {
                let filled = (1..=st.kind.nodes()).all(|a| st.get((a, st.caps[a - 1])).is_some());
                report.check(
                    format!("{name}: every node reaches its row cap"),
                    "Laurent property by exact division",
                    filled,
                    || "missing top row".into(),
                );
                absorb(&mut report, st.verify(&name));
            }
            Err(e) => report.check(
                format!("{name}: evolution"),
                "Laurent property by exact division",
                false,
                || e.to_string(),
            ),
        }
    }
    report
}

/// Row-character identities and the overhang vanishing.
pub fn criterion_14() -> Report {
    let mut report = Report::new("row characters");
    let ring = Ring::new();
    let mut ok = true;
    for r in 1..=3usize {
        for a in 1..=r + 1 {
            for b in a..=r + 1 {
                for m in 1..=4i64 {
                    let whole = qchar::box_sum(&ring, r, a, b, m, 0);
                    let first = Poly::monomial(&ring, qchar::box_mono(&ring, r, a, 0), 1)
                        .mul(&qchar::box_sum(&ring, r, a, b, m - 1, 2))
                        .add(&qchar::box_sum(&ring, r, a + 1, b, m, 0));
                    let v = 2 * (m - 1);
                    let last = qchar::box_sum(&ring, r, a, b, m - 1, 0)
                        .mul(&Poly::monomial(&ring, qchar::box_mono(&ring, r, b, v), 1))
                        .add(&qchar::box_sum(&ring, r, a, b - 1, m, 0));
                    ok &= whole == first && whole == last;
                }
            }
        }
    }
    report.check(
        "box-sum splits off its first and last box (r <= 3, m <= 4)",
        "row recursions",
        ok,
        || "a split disagrees".into(),
    );
    let mut ok = true;
    for r in 1..=2usize {
        for m in 0..=3i64 {
            let v = qchar::alternating_identity(&ring, r, m, 1);
            ok &= if m == 0 { v.is_one() } else { v.is_zero() };
        }
    }
    report.check(
        "alternating column-row convolution is a delta (r <= 2, m <= 3)",
        "Jacobi-Trudi consequence",
        ok,
        || "nonzero residue".into(),
    );
    absorb(&mut report, qchar::oracle_t_system(1, 3, &[0, 1]));
    absorb(&mut report, qchar::oracle_t_system(2, 3, &[0]));
    absorb(&mut report, qchar::extended_vanishing(&restricted("A2", 2, (0, 15))));
    absorb(&mut report, qchar::extended_vanishing(&restricted("A3", 2, (0, 18))));
    report
}

/// Randomized kernel properties: exact division round-trips, mutation
/// involution, and serialization round-trips.
pub fn criterion_15() -> Report {
    let mut report = Report::new("kernel properties");
    let ring = Ring::new();
    let vars: Vec<_> = (0..4).map(|i| ring.var(&format!("v{i}"))).collect();
    let mut rng = StdRng::seed_from_u64(7);
    let random_poly = |rng: &mut StdRng| {
        let terms = rng.gen_range(1..=4);
        let mut p = Poly::zero(&ring);
        for _ in 0..terms {
            let mono = Mono::from_pairs(
                vars.iter().map(|&v| (v, rng.gen_range(-3i64..=3))),
            );
            p = p.add(&Poly::monomial(&ring, mono, rng.gen_range(-5i64..=5)));
        }
        p
    };
    let mut ok = true;
    let mut done = 0usize;
    while done < 10_000 {
        let p = random_poly(&mut rng);
        let q = random_poly(&mut rng);
        if q.is_zero() {
            continue;
        }
        let prod = p.mul(&q);
        ok &= prod.exact_div(&q).map(|r| r == p).unwrap_or(false);
        done += 1;
    }
    report.check(
        "10000 exact-division round-trips (p*q)/q = p",
        "division inverts multiplication",
        ok,
        || "round-trip failed".into(),
    );

    let d = dynkin::data_for(ty("A3"));
    let (quiver, _) = alternating_quiver(&d);
    let seed = tsys_core::cluster::Seed {
        quiver,
        cluster: (0..3)
            .map(|v| Poly::var(&ring, ring.var(&format!("c{v}"))))
            .collect(),
    };
    let mut ok = true;
    let mut s = seed.clone();
    for step in 0..200 {
        let k = step % 3;
        let once = s.mutate(&ring, k).unwrap();
        ok &= once.mutate(&ring, k).unwrap() == s;
        s = once;
    }
    report.check(
        "mutation at a fixed vertex is an involution along a 200-step walk",
        "exchange relation inverts itself",
        ok,
        || "double mutation differs".into(),
    );

    let mut ok = true;
    for _ in 0..200 {
        let p = random_poly(&mut rng);
        let json = p.to_json();
        ok &= Poly::from_json(&ring, &json) == Some(p.clone());
        ok &= serde_json::to_string(&json).ok().and_then(|s| {
            serde_json::from_str::<serde_json::Value>(&s).ok()
        }) == Some(json);
    }
    report.check(
        "200 serialization round-trips",
        "canonical JSON is lossless",
        ok,
        || "round-trip failed".into(),
    );
    report
}

type SuiteFn = fn() -> Report;

/// The registry: acceptance mirrors plus named shortcuts.
pub fn registry() -> Vec<(&'static str, SuiteFn)> {
    fn a2_level2() -> Report {
        let sol = restricted("A2", 2, (0, 22));
        let mut report = Report::new("A2-level2");
        absorb(&mut report, verify_relations(&sol, "A2 l=2"));
        absorb(
            &mut report,
            verify_periodicity(
                &sol,
                5,
                |a, m| (3 - a, 2 - m),
                None,
                "A2 l=2",
                "half period 5",
            ),
        );
        report
    }
    vec![
        ("criterion-01", criterion_01),
        ("criterion-02", criterion_02),
        ("criterion-03", criterion_03),
        ("criterion-04", criterion_04),
        ("criterion-05", criterion_05),
        ("criterion-06", criterion_06),
        ("criterion-07", criterion_07),
        ("criterion-08", criterion_08),
        ("criterion-09", criterion_09),
        ("criterion-10", criterion_10),
        ("criterion-11", criterion_11),
        ("criterion-12", criterion_12),
        ("criterion-13", criterion_13),
        ("criterion-14", criterion_14),
        ("criterion-15", criterion_15),
        ("A2-level2", a2_level2),
        ("C2-level2-det", criterion_03),
    ]
}

pub fn run(name: &str) -> Option<Report> {
    registry()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f())
}

pub fn suite_names() -> Vec<&'static str> {
    registry().into_iter().map(|(n, _)| n).collect()
}
