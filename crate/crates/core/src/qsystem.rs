//! Q-systems: the u-independent shadows of the bilinear lattice systems.
//! Values are Laurent polynomials in the formal seeds Q^{(a)}_1, grown by the
//! recursion (Q^{(a)}_m)² = Q^{(a)}_{m−1}Q^{(a)}_{m+1} + (mixing term); on
//! mixed-length diagrams the short nodes carry stretched row indices.  No
//! periodicity is claimed — only relation consistency and exact divisibility.

use std::collections::HashMap;

use crate::dynkin::{self, Family, FiniteType, TwistedType};
use crate::laurent::{LaurentError, Poly, Ring};
use crate::report::Report;
use crate::tsys::TSolution;
use crate::twisted::TwistedSolution;

/// A row index pair (node, m).
pub type QPoint = (usize, i64);

#[derive(Clone, Debug)]
pub enum QKind {
    Untwisted(FiniteType),
    Twisted(TwistedType),
}

impl QKind {
    pub fn nodes(&self) -> usize {
        match self {
            QKind::Untwisted(ty) => ty.rank,
            QKind::Twisted(tw) => tw.i_sigma.len(),
        }
    }

    /// Row-index stretch per node: short nodes of untwisted diagrams carry
    /// t_a-times denser rows; twisted diagrams are unstretched.
    pub fn stretch(&self, a: usize) -> i64 {
        match self {
            QKind::Untwisted(ty) => dynkin::data_for(*ty).t_a(a),
            QKind::Twisted(_) => 1,
        }
    }
}

/// One relation instance: center² = toda[0]·toda[1] + ∏ mixing
/// (mixing entries repeat to encode squares and cubes).
#[derive(Clone, Debug)]
pub struct QRelation {
    pub center: QPoint,
    pub toda: [QPoint; 2],
    pub mixing: Vec<QPoint>,
}

impl QRelation {
    fn points(&self) -> impl Iterator<Item = QPoint> + '_ {
        std::iter::once(self.center)
            .chain(self.toda.iter().copied())
            .chain(self.mixing.iter().copied())
    }
}

/// The relation centered at Q^{(a)}_m, m ≥ 1.
pub fn relation_q(kind: &QKind, a: usize, m: i64) -> Option<QRelation> {
    let r = kind.nodes();
    if a < 1 || a > r || m < 1 {
        return None;
    }
    let toda = [(a, m - 1), (a, m + 1)];
    let mixing: Vec<QPoint> = match kind {
        QKind::Untwisted(ty) => match ty.family {
            Family::A | Family::D | Family::E => dynkin::data_for(*ty)
                .neighbors(a)
                .into_iter()
                .map(|b| (b, m))
                .collect(),
            Family::B => {
                if a <= r - 2 {
                    vec![(a - 1, m), (a + 1, m)]
                } else if a == r - 1 {
                    vec![(r - 2, m), (r, 2 * m)]
                } else if m % 2 == 0 {
                    vec![(r - 1, m / 2), (r - 1, m / 2)]
                } else {
                    vec![(r - 1, m / 2), (r - 1, m / 2 + 1)]
                }
            }
            Family::C => {
                if a <= r - 2 {
                    vec![(a - 1, m), (a + 1, m)]
                } else if a == r - 1 {
                    if m % 2 == 0 {
                        vec![(r - 2, m), (r, m / 2), (r, m / 2)]
                    } else {
                        vec![(r - 2, m), (r, m / 2), (r, m / 2 + 1)]
                    }
                } else {
                    vec![(r - 1, 2 * m)]
                }
            }
            Family::F => match a {
                1 => vec![(2, m)],
                2 => vec![(1, m), (3, 2 * m)],
                3 => {
                    if m % 2 == 0 {
                        vec![(2, m / 2), (2, m / 2), (4, m)]
                    } else {
                        vec![(2, m / 2), (2, m / 2 + 1), (4, m)]
                    }
                }
                _ => vec![(3, m)],
            },
            Family::G => {
                if a == 1 {
                    vec![(2, 3 * m)]
                } else {
                    let k = m / 3;
                    match m % 3 {
                        0 => vec![(1, k); 3],
                        1 => vec![(1, k), (1, k), (1, k + 1)],
                        _ => vec![(1, k), (1, k + 1), (1, k + 1)],
                    }
                }
            }
        },
        QKind::Twisted(tw) => match (tw.base.family, tw.kappa) {
            (Family::A, 2) => {
                if a < r {
                    vec![(a - 1, m), (a + 1, m)]
                } else if tw.base.rank % 2 == 1 {
                    vec![(r - 1, m), (r - 1, m)]
                } else {
                    vec![(r - 1, m), (r, m)]
                }
            }
            (Family::D, 2) => {
                if a <= r - 2 {
                    vec![(a - 1, m), (a + 1, m)]
                } else if a == r - 1 {
                    vec![(r - 2, m), (r, m), (r, m)]
                } else {
                    vec![(r - 1, m)]
                }
            }
            (Family::E, 2) => match a {
                1 => vec![(2, m)],
                2 => vec![(1, m), (3, m)],
                3 => vec![(2, m), (2, m), (4, m)],
                _ => vec![(3, m)],
            },
            (Family::D, 3) => {
                if a == 1 {
                    vec![(2, m)]
                } else {
                    vec![(1, m); 3]
                }
            }
            _ => unreachable!("twisted_data_for admits only these pairs"),
        },
    };
    Some(QRelation {
        center: (a, m),
        toda,
        mixing,
    })
}

#[derive(thiserror::Error, Debug)]
pub enum QError {
    #[error("exact division failed at node {0} row {1}: {2}")]
    NotDivisible(usize, i64, LaurentError),
}

pub struct QState {
    pub kind: QKind,
    pub ring: Ring,
    /// Highest stored row per node (index a-1).
    pub caps: Vec<i64>,
    values: HashMap<QPoint, Poly>,
}

impl QState {
    pub fn get(&self, p: QPoint) -> Option<Poly> {
        if p.0 == 0 || p.1 == 0 {
            Some(Poly::one(&self.ring))
        } else {
            self.values.get(&p).cloned()
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// center² − toda product − mixing product; None if a value is missing.
    pub fn residual(&self, rel: &QRelation) -> Option<Poly> {
        let c = self.get(rel.center)?;
        let lhs = c.mul(&c);
        let toda = self.get(rel.toda[0])?.mul(&self.get(rel.toda[1])?);
        let mut mixing = Poly::one(&self.ring);
        for &q in &rel.mixing {
            mixing = mixing.mul(&self.get(q)?);
        }
        Some(lhs.sub(&toda).sub(&mixing))
    }

    fn instances(&self) -> Vec<QRelation> {
        let mut out = Vec::new();
        for a in 1..=self.kind.nodes() {
            for m in 1..self.caps[a - 1] {
                out.extend(relation_q(&self.kind, a, m));
            }
        }
        out
    }

    /// Zero residual for every fully-instantiated relation up to the caps.
    pub fn verify(&self, job: &str) -> Report {
        let mut report = Report::new(job);
        let mut checked = 0usize;
        let mut bad: Option<QPoint> = None;
        for rel in self.instances() {
            if let Some(res) = self.residual(&rel) {
                checked += 1;
                if !res.is_zero() && bad.is_none() {
                    bad = Some(rel.center);
                }
            }
        }
        report.check(
            format!("all {checked} relation instances have zero residual"),
            "defining Q-relations",
            checked > 0 && bad.is_none(),
            || format!("first nonzero residual at node {} row {}", bad.unwrap().0, bad.unwrap().1),
        );
        report
    }
}

/// Formal seed variable Q^{(a)}_m.
pub fn q_var(ring: &Ring, a: usize, m: i64) -> Poly {
    Poly::var(ring, ring.var(&format!("Q.a{a}.m{m}")))
}

/// Grows all rows from the formal seeds {Q^{(a)}_1} up to row
/// m_max·stretch(a) per node, by exact division.
pub fn q_evolve(kind: QKind, m_max: i64) -> Result<QState, QError> {
    let ring = Ring::new();
    let caps: Vec<i64> = (1..=kind.nodes()).map(|a| m_max * kind.stretch(a)).collect();
    let mut state = QState {
        kind,
        ring: ring.clone(),
        caps,
        values: HashMap::new(),
    };
    for a in 1..=state.kind.nodes() {
        state.values.insert((a, 1), q_var(&ring, a, 1));
    }
    let rels = state.instances();
    let mut pending: Vec<usize> = (0..rels.len()).collect();
    loop {
        let mut progressed = false;
        let mut still = Vec::new();
        for &i in &pending {
            match try_resolve(&state, &rels[i])? {
                Some((p, v)) => {
                    state.values.insert(p, v);
                    progressed = true;
                }
                None => still.push(i),
            }
        }
        if !progressed {
            break;
        }
        pending = still;
    }
    Ok(state)
}

/// Solves a relation for its unique unknown when that unknown appears to the
/// first power (a toda endpoint, or a multiplicity-one mixing factor).
fn try_resolve(state: &QState, rel: &QRelation) -> Result<Option<(QPoint, Poly)>, QError> {
    let unknowns: Vec<QPoint> = rel
        .points()
        .filter(|&q| state.get(q).is_none())
        .collect();
    let [target] = unknowns[..] else {
        return Ok(None);
    };
    if target == rel.center {
        return Ok(None); // appears squared; not solvable by division
    }
    let ring = &state.ring;
    let c = state.get(rel.center).unwrap();
    let lhs = c.mul(&c);
    let prod = |pts: &[QPoint], skip: Option<QPoint>| {
        let mut acc = Poly::one(ring);
        let mut skipped = false;
        for &q in pts {
            if Some(q) == skip && !skipped {
                skipped = true;
                continue;
            }
            acc = acc.mul(&state.get(q).unwrap());
        }
        acc
    };
    let (num, den) = if target == rel.toda[0] || target == rel.toda[1] {
        let other = if target == rel.toda[0] {
            rel.toda[1]
        } else {
            rel.toda[0]
        };
        (lhs.sub(&prod(&rel.mixing, None)), state.get(other).unwrap())
    } else {
        if rel.mixing.iter().filter(|&&q| q == target).count() != 1 {
            return Ok(None);
        }
        (
            lhs.sub(&prod(&rel.toda, None)),
            prod(&rel.mixing, Some(target)),
        )
    };
    if den.is_zero() {
        return Ok(None);
    }
    match num.exact_div(&den) {
        Ok(v) => Ok(Some((target, v))),
        Err(e) => Err(QError::NotDivisible(rel.center.0, rel.center.1, e)),
    }
}

/// Evaluates one collapsed relation: multiset of (a, m) factors on each side,
/// values looked up through `value`; None if any factor is unavailable.
fn collapsed_residual<F>(
    ring: &Ring,
    lhs: [QPoint; 2],
    toda: &[QPoint],
    mixing: &[QPoint],
    value: F,
) -> Option<Poly>
where
    F: Fn(QPoint) -> Option<Poly>,
{
    let prod = |pts: &[QPoint]| -> Option<Poly> {
        let mut acc = Poly::one(ring);
        for &q in pts {
            acc = acc.mul(&value(q)?);
        }
        Some(acc)
    };
    let l = value(lhs[0])?.mul(&value(lhs[1])?);
    Some(l.sub(&prod(toda)?).sub(&prod(mixing)?))
}

/// Checks that the relation table of a restricted untwisted system, with the
/// spectral parameter dropped, holds on u-translation-invariant values: the
/// per-(a, m) collapse of `sol` must be single-valued, and every collapsed
/// relation instance away from the top boundary row must have zero residual.
pub fn q_from_t(sol: &TSolution) -> Report {
    let mut report = Report::new(format!("Q-collapse {:?}", sol.spec.kind));
    let mut values: HashMap<QPoint, Poly> = HashMap::new();
    let mut invariant = true;
    let mut witness = String::new();
    for p in sol.interior_points() {
        let v = sol.get(p).unwrap();
        match values.get(&(p.a, p.m)) {
            None => {
                values.insert((p.a, p.m), v);
            }
            Some(w) if *w != v => {
                if invariant {
                    witness = format!("node {} row {} differs at u-index {}", p.a, p.m, p.n);
                }
                invariant = false;
            }
            _ => {}
        }
    }
    report.check(
        "solution is u-translation invariant",
        "all time translates of T(a,m) coincide",
        invariant,
        || witness.clone(),
    );

    let rank = sol.spec.rank();
    // the top row carries the restriction, not the unrestricted Q-relation
    let touches_top =
        |q: QPoint| q.0 >= 1 && q.0 <= rank && q.1 == sol.spec.top_m(q.0);
    let value = |q: QPoint| {
        if q.0 == 0 || q.0 == rank + 1 || q.1 == 0 {
            Some(Poly::one(&sol.ring))
        } else {
            values.get(&q).cloned()
        }
    };
    let mut checked = 0usize;
    let mut bad: Option<QPoint> = None;
    for rel in sol.spec.relations() {
        let drop = |p: crate::tsys::Point| (p.a, p.m);
        let lhs = [drop(rel.lhs[0]), drop(rel.lhs[1])];
        let toda: Vec<QPoint> = rel.toda.iter().map(|&p| drop(p)).collect();
        let mixing: Vec<QPoint> = rel.mixing.iter().map(|&p| drop(p)).collect();
        if lhs
            .iter()
            .chain(toda.iter())
            .chain(mixing.iter())
            .any(|&q| touches_top(q))
        {
            continue;
        }
        let Some(res) = collapsed_residual(&sol.ring, lhs, &toda, &mixing, value) else {
            continue;
        };
        checked += 1;
        if !res.is_zero() && bad.is_none() {
            bad = Some(drop(rel.center));
        }
    }
    report.check(
        format!("{checked} collapsed relation instances have zero residual"),
        "the u-forgetting of the bilinear relations is the Q-system",
        checked > 0 && bad.is_none(),
        || format!("first nonzero residual at node {} row {}", bad.unwrap().0, bad.unwrap().1),
    );
    report
}

/// Twisted counterpart of `q_from_t`: the collapse also forgets the class
/// coordinate b.
pub fn q_from_twisted(sol: &TwistedSolution) -> Report {
    let tw = &sol.spec.tw;
    let mut report = Report::new(format!("Q-collapse {tw}"));
    let mut values: HashMap<QPoint, Poly> = HashMap::new();
    let mut invariant = true;
    let mut witness = String::new();
    for p in sol.interior_points() {
        let v = sol.get(p).unwrap();
        match values.get(&(p.a, p.m)) {
            None => {
                values.insert((p.a, p.m), v);
            }
            Some(w) if *w != v => {
                if invariant {
                    witness = format!(
                        "node {} row {} differs at u-index {} class {}",
                        p.a, p.m, p.n, p.b
                    );
                }
                invariant = false;
            }
            _ => {}
        }
    }
    report.check(
        "solution is translation invariant in u and b",
        "all lattice translates of T(a,m) coincide",
        invariant,
        || witness.clone(),
    );

    let level = sol.spec.level;
    let value = |q: QPoint| {
        if q.0 == 0 || q.1 == 0 {
            Some(Poly::one(&sol.ring))
        } else {
            values.get(&q).cloned()
        }
    };
    let mut checked = 0usize;
    let mut bad: Option<QPoint> = None;
    for rel in sol.spec.relations() {
        let drop = |p: crate::twisted::TPoint| (p.a, p.m);
        let lhs = [drop(rel.lhs[0]), drop(rel.lhs[1])];
        let toda: Vec<QPoint> = rel.toda.iter().map(|&p| drop(p)).collect();
        let mixing: Vec<QPoint> = rel.mixing.iter().map(|&p| drop(p)).collect();
        if lhs
            .iter()
            .chain(toda.iter())
            .chain(mixing.iter())
            .any(|&q| q.1 == level)
        {
            continue;
        }
        let Some(res) = collapsed_residual(&sol.ring, lhs, &toda, &mixing, value) else {
            continue;
        };
        checked += 1;
        if !res.is_zero() && bad.is_none() {
            bad = Some(drop(rel.center));
        }
    }
    report.check(
        format!("{checked} collapsed relation instances have zero residual"),
        "the lattice-forgetting of the twisted relations is the Q-system",
        checked > 0 && bad.is_none(),
        || format!("first nonzero residual at node {} row {}", bad.unwrap().0, bad.unwrap().1),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsys::{Point, SystemKind, SystemSpec};
    use crate::twisted::{self, TwistedSpec};

    fn untwisted(name: &str) -> QKind {
        QKind::Untwisted(FiniteType::parse(name).unwrap())
    }

    #[test]
    fn a1_second_row_closed_form() {
        let st = q_evolve(untwisted("A1"), 3).unwrap();
        let q1 = q_var(&st.ring, 1, 1);
        let expect = q1.mul(&q1).sub(&Poly::one(&st.ring));
        assert_eq!(st.get((1, 2)).unwrap(), expect);
    }

    #[test]
    fn a2_second_row_closed_form() {
        let st = q_evolve(untwisted("A2"), 2).unwrap();
        let q1 = q_var(&st.ring, 1, 1);
        let expect = q1.mul(&q1).sub(&q_var(&st.ring, 2, 1));
        assert_eq!(st.get((1, 2)).unwrap(), expect);
    }

    #[test]
    fn c3_last_node_mixing_shape() {
        let rel = relation_q(&untwisted("C3"), 3, 4).unwrap();
        assert_eq!(rel.mixing, vec![(2, 8)]);
        // stretched node r-1, odd row
        let rel = relation_q(&untwisted("C3"), 2, 5).unwrap();
        assert_eq!(rel.mixing, vec![(1, 5), (3, 2), (3, 3)]);
    }

    #[test]
    fn evolve_to_row_six_zero_residual() {
        for kind in [
            untwisted("A2"),
            untwisted("B2"),
            untwisted("C2"),
            QKind::Twisted(TwistedType::parse("A3~2").unwrap()),
        ] {
            let name = format!("{kind:?}");
            let st = q_evolve(kind, 6).unwrap();
            for a in 1..=st.kind.nodes() {
                assert!(st.get((a, st.caps[a - 1])).is_some(), "{name}: node {a}");
            }
            let rep = st.verify(&name);
            assert!(rep.passed(), "{rep}");
        }
    }

    /// Constant-in-u extension of an evolved Q-state over a restricted spec.
    fn constant_extension(name: &str, level: i64) -> crate::tsys::TSolution {
        let ty = FiniteType::parse(name).unwrap();
        let spec = SystemSpec::new(SystemKind::Restricted { ty, level }, (0, 8));
        let st = q_evolve(untwisted(name), level).unwrap();
        let mut values = std::collections::HashMap::new();
        for a in 1..=ty.rank {
            for m in 1..spec.top_m(a) {
                for n in spec.window.0..=spec.window.1 {
                    values.insert(Point::new(a, m, n), st.get((a, m)).unwrap());
                }
            }
        }
        crate::tsys::TSolution::from_values(spec, st.ring.clone(), values)
    }

    #[test]
    fn collapse_restricted_a1_and_b2() {
        for (name, level) in [("A1", 4), ("B2", 3)] {
            let rep = q_from_t(&constant_extension(name, level));
            assert!(rep.passed(), "{name}: {rep}");
        }
    }

    #[test]
    fn collapse_twisted_a3() {
        let tw = TwistedType::parse("A3~2").unwrap();
        let spec = TwistedSpec::new(tw.clone(), 3, (0, 8));
        let st = q_evolve(QKind::Twisted(tw), 3).unwrap();
        let mut values = std::collections::HashMap::new();
        for a in 1..=spec.rank() {
            for m in 1..spec.level {
                for b in 0..spec.classes(a) {
                    for n in spec.window.0..=spec.window.1 {
                        values.insert(
                            crate::twisted::TPoint { a, m, n, b },
                            st.get((a, m)).unwrap(),
                        );
                    }
                }
            }
        }
        let init: Vec<_> = values.iter().map(|(&p, v)| (p, v.clone())).collect();
        let sol = twisted::twisted_solve(&spec, &st.ring, init).unwrap();
        let rep = q_from_twisted(&sol);
        assert!(rep.passed(), "{rep}");
    }
}
