//! Randomized algebraic properties of the exact Laurent-polynomial kernel.

use proptest::prelude::*;
use tsys_core::laurent::{Mono, Poly, Ring, VarId};

#[derive(Debug, Clone)]
struct RawPoly(Vec<(Vec<i64>, i64)>);

fn raw_poly() -> impl Strategy<Value = RawPoly> {
    prop::collection::vec(
        (prop::collection::vec(-3i64..=3, 3), -6i64..=6),
        0..5,
    )
    .prop_map(RawPoly)
}

fn build(ring: &Ring, vars: &[VarId], raw: &RawPoly) -> Poly {
    let mut p = Poly::zero(ring);
    for (exps, c) in &raw.0 {
        let mono = Mono::from_pairs(vars.iter().copied().zip(exps.iter().copied()));
        p = p.add(&Poly::monomial(ring, mono, *c));
    }
    p
}

fn setup() -> (Ring, Vec<VarId>) {
    let ring = Ring::new();
    let vars = (0..3).map(|i| ring.var(&format!("v{i}"))).collect();
    (ring, vars)
}

proptest! {
    #[test]
    fn ring_axioms(a in raw_poly(), b in raw_poly(), c in raw_poly()) {
        let (ring, vars) = setup();
        let (a, b, c) = (
            build(&ring, &vars, &a),
            build(&ring, &vars, &b),
            build(&ring, &vars, &c),
        );
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), Poly::zero(&ring));
    }

    #[test]
    fn exact_division_inverts_multiplication(p in raw_poly(), q in raw_poly()) {
        let (ring, vars) = setup();
        let p = build(&ring, &vars, &p);
        let q = build(&ring, &vars, &q);
        prop_assume!(!q.is_zero());
        let r = p.mul(&q).exact_div(&q);
        prop_assert_eq!(r.ok(), Some(p));
    }

    #[test]
    fn json_round_trips(p in raw_poly()) {
        let (ring, vars) = setup();
        let p = build(&ring, &vars, &p);
        let v = p.to_json();
        prop_assert_eq!(Poly::from_json(&ring, &v), Some(p.clone()));
        // Canonical serialization is byte-deterministic.
        prop_assert_eq!(
            serde_json::to_string(&v).unwrap(),
            serde_json::to_string(&p.to_json()).unwrap()
        );
    }
}
