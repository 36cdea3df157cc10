//! Coefficient-free quiver and seed mutation, the bipartite belt of an
//! alternating quiver, square and tensor products of quivers, and the
//! comparison of belt variables with solved level-2 lattice values.

use std::collections::HashSet;

use crate::dynkin::DynkinData;
use crate::laurent::{LaurentError, Poly, Ring};
use crate::report::Report;
use crate::tsys::{Point, TSolution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    /// b[i][j] = #arrows i -> j minus #arrows j -> i; skew-symmetric.
    b: Vec<Vec<i64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ClusterError {
    #[error("exchange binomial not divisible by the mutated variable: {0}")]
    NotDivisible(#[from] LaurentError),
    #[error("belt too short for the requested check")]
    WindowTooSmall,
}

impl Quiver {
    pub fn new(n: usize) -> Self {
        Quiver {
            b: vec![vec![0; n]; n],
        }
    }

    pub fn from_arrows(n: usize, arrows: &[(usize, usize)]) -> Self {
        let mut q = Quiver::new(n);
        for &(i, j) in arrows {
            q.b[i][j] += 1;
            q.b[j][i] -= 1;
        }
        q
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn weight(&self, i: usize, j: usize) -> i64 {
        self.b[i][j]
    }

    pub fn opposite(&self) -> Quiver {
        let n = self.len();
        let mut q = Quiver::new(n);
        for i in 0..n {
            for j in 0..n {
                q.b[i][j] = -self.b[i][j];
            }
        }
        q
    }

    /// Standard matrix mutation at k; 2-cycles cancel arithmetically.
    pub fn mutate(&self, k: usize) -> Quiver {
        let n = self.len();
        let mut q = Quiver::new(n);
        for i in 0..n {
            for j in 0..n {
                q.b[i][j] = if i == k || j == k {
                    -self.b[i][j]
                } else {
                    self.b[i][j]
                        + (self.b[i][k].abs() * self.b[k][j] + self.b[i][k] * self.b[k][j].abs())
                            / 2
                };
            }
        }
        q
    }

    pub fn is_skew_symmetric_no_loops(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.b[i][i] == 0 && (0..n).all(|j| self.b[i][j] == -self.b[j][i]))
    }

    /// Relabels vertices: result.b[nu(i)][nu(j)] = self.b[i][j].
    pub fn relabel(&self, nu: &[usize]) -> Quiver {
        let n = self.len();
        let mut q = Quiver::new(n);
        for i in 0..n {
            for j in 0..n {
                q.b[nu[i]][nu[j]] = self.b[i][j];
            }
        }
        q
    }
}

/// The alternating quiver of a simply laced diagram: bipartite-positive
/// nodes are sources. Vertices are 0-indexed (node a -> vertex a-1).
/// Returns the quiver and the sign per vertex.
pub fn alternating_quiver(dd: &DynkinData) -> (Quiver, Vec<i64>) {
    let r = dd.rank();
    let mut q = Quiver::new(r);
    let eps: Vec<i64> = (1..=r).map(|a| dd.eps(a) as i64).collect();
    for a in 1..=r {
        for b in dd.neighbors(a) {
            if b > a {
                let (src, dst) = if eps[a - 1] == 1 { (a, b) } else { (b, a) };
                q.b[src - 1][dst - 1] += 1;
                q.b[dst - 1][src - 1] -= 1;
            }
        }
    }
    (q, eps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    pub quiver: Quiver,
    pub cluster: Vec<Poly>,
}

impl Seed {
    pub fn mutate(&self, ring: &Ring, k: usize) -> Result<Seed, ClusterError> {
        let n = self.quiver.len();
        let mut inc = Poly::one(ring);
        let mut out = Poly::one(ring);
        for j in 0..n {
            let w = self.quiver.weight(j, k);
            if w > 0 {
                inc = inc.mul(&self.cluster[j].pow(w as u32));
            } else if w < 0 {
                out = out.mul(&self.cluster[j].pow((-w) as u32));
            }
        }
        let y = inc.add(&out).exact_div(&self.cluster[k])?;
        let mut cluster = self.cluster.clone();
        cluster[k] = y;
        Ok(Seed {
            quiver: self.quiver.mutate(k),
            cluster,
        })
    }

    pub fn mutate_many(&self, ring: &Ring, ks: &[usize]) -> Result<Seed, ClusterError> {
        let mut s = self.clone();
        for &k in ks {
            s = s.mutate(ring, k)?;
        }
        Ok(s)
    }

    /// Seed equality up to the given vertex bijection nu (never a search):
    /// quiver entries and cluster variables must match exactly after
    /// relabeling self by nu.
    pub fn eq_under(&self, nu: &[usize], other: &Seed) -> bool {
        self.quiver.relabel(nu) == other.quiver
            && (0..self.cluster.len()).all(|a| self.cluster[a] == other.cluster[nu[a]])
    }
}

/// The bipartite belt: seeds (Q, x(0)), (Q^op, x(1)), ... produced by
/// alternately mutating all positive then all negative vertices.
pub struct Belt {
    pub ring: Ring,
    pub eps: Vec<i64>,
    pub seeds: Vec<Seed>,
}

impl Belt {
    /// Initial cluster variables named by `var_of(vertex)`.
    pub fn new(
        ring: &Ring,
        dd: &DynkinData,
        steps: usize,
        var_of: impl Fn(usize) -> Poly,
    ) -> Result<Belt, ClusterError> {
        let (quiver, eps) = alternating_quiver(dd);
        let cluster = (0..dd.rank()).map(var_of).collect();
        let mut seeds = vec![Seed { quiver, cluster }];
        for u in 0..steps {
            let sign = if u % 2 == 0 { 1 } else { -1 };
            let ks: Vec<usize> = (0..eps.len()).filter(|&v| eps[v] == sign).collect();
            let next = seeds.last().unwrap().mutate_many(ring, &ks)?;
            seeds.push(next);
        }
        Ok(Belt {
            ring: ring.clone(),
            eps,
            seeds,
        })
    }

    pub fn x(&self, vertex: usize, u: usize) -> &Poly {
        &self.seeds[u].cluster[vertex]
    }

    /// Distinct cluster variables met along the belt.
    pub fn distinct_variables(&self) -> usize {
        let mut set = HashSet::new();
        for s in &self.seeds {
            for p in &s.cluster {
                set.insert(format!("{p}"));
            }
        }
        set.len()
    }

    /// The belt values satisfy the level-2 bilinear system
    /// x_a(u-1) x_a(u+1) = 1 + prod of neighbor values at u.
    pub fn verify_t2(&self, dd: &DynkinData, job: &str) -> Report {
        let mut report = Report::new(job);
        let mut ok = true;
        let mut witness = String::new();
        for u in 1..self.seeds.len() - 1 {
            for a in 1..=dd.rank() {
                let lhs = self.x(a - 1, u - 1).mul(self.x(a - 1, u + 1));
                let mut rhs = Poly::one(&self.ring);
                for b in dd.neighbors(a) {
                    rhs = rhs.mul(self.x(b - 1, u));
                }
                rhs = rhs.add(&Poly::one(&self.ring));
                if lhs != rhs && ok {
                    ok = false;
                    witness = format!("vertex {a}, u={u}");
                }
            }
        }
        report.check(
            format!("{job}: belt bilinear relations"),
            "x(u-1)x(u+1) = 1 + neighbors(u)",
            ok,
            || witness,
        );
        report
    }

    /// Compares belt variables against a solved level-2 lattice: x_a(u)
    /// equals the value at (a, 1, u) when eps(a)(-1)^u = +, and at
    /// (a, 1, u+1) otherwise.  The belt must share the solution's ring and
    /// initial variables.
    pub fn verify_t_correspondence(&self, sol: &TSolution, job: &str) -> Report {
        let mut report = Report::new(job);
        let mut checked = 0usize;
        let mut bad = None;
        for u in 0..self.seeds.len() {
            for v in 0..self.eps.len() {
                let sgn = self.eps[v] * if u % 2 == 0 { 1 } else { -1 };
                let n = if sgn == 1 { u as i64 } else { u as i64 + 1 };
                let Some(t) = sol.get(Point::new(v + 1, 1, n)) else {
                    continue;
                };
                checked += 1;
                if *self.x(v, u) != t && bad.is_none() {
                    bad = Some((v + 1, u));
                }
            }
        }
        report.check(
            format!("{job}: {checked} belt variables matched"),
            "x_a(u) equals lattice value by parity",
            checked > 0 && bad.is_none(),
            || format!("first mismatch {bad:?}"),
        );
        report
    }
}

/// Square product: the product quiver with all arrows reversed inside the
/// rows {a} x Q' for a a sink of Q and the columns Q x {b} for b a source
/// of Q'.  Vertex (i, j) of the product is index i * n' + j.
pub fn square_product(q: &Quiver, eps: &[i64], q2: &Quiver, eps2: &[i64]) -> Quiver {
    let (n, n2) = (q.len(), q2.len());
    let mut arrows = Vec::new();
    for i1 in 0..n {
        for i2 in 0..n {
            if q.weight(i1, i2) > 0 {
                for j in 0..n2 {
                    // column copy of Q at j, reversed when j is a source of Q'
                    let (s, d) = if eps2[j] == 1 { (i2, i1) } else { (i1, i2) };
                    for _ in 0..q.weight(i1, i2) {
                        arrows.push((s * n2 + j, d * n2 + j));
                    }
                }
            }
        }
    }
    for j1 in 0..n2 {
        for j2 in 0..n2 {
            if q2.weight(j1, j2) > 0 {
                for i in 0..n {
                    // row copy of Q' at i, reversed when i is a sink of Q
                    let (s, d) = if eps[i] == -1 { (j2, j1) } else { (j1, j2) };
                    for _ in 0..q2.weight(j1, j2) {
                        arrows.push((i * n2 + s, i * n2 + d));
                    }
                }
            }
        }
    }
    Quiver::from_arrows(n * n2, &arrows)
}

/// Tensor product: the plain product plus a diagonal arrow
/// (a2, b2) -> (a1, b1) for every pair of arrows a1 -> a2, b1 -> b2.
pub fn tensor_product(q: &Quiver, q2: &Quiver) -> Quiver {
    let (n, n2) = (q.len(), q2.len());
    let mut arrows = Vec::new();
    for i1 in 0..n {
        for i2 in 0..n {
            if q.weight(i1, i2) > 0 {
                for j in 0..n2 {
                    for _ in 0..q.weight(i1, i2) {
                        arrows.push((i1 * n2 + j, i2 * n2 + j));
                    }
                }
            }
        }
    }
    for j1 in 0..n2 {
        for j2 in 0..n2 {
            if q2.weight(j1, j2) > 0 {
                for i in 0..n {
                    for _ in 0..q2.weight(j1, j2) {
                        arrows.push((i * n2 + j1, i * n2 + j2));
                    }
                }
            }
        }
    }
    for i1 in 0..n {
        for i2 in 0..n {
            if q.weight(i1, i2) > 0 {
                for j1 in 0..n2 {
                    for j2 in 0..n2 {
                        if q2.weight(j1, j2) > 0 {
                            let count = q.weight(i1, i2) * q2.weight(j1, j2);
                            for _ in 0..count {
                                arrows.push((i2 * n2 + j2, i1 * n2 + j1));
                            }
                        }
                    }
                }
            }
        }
    }
    Quiver::from_arrows(n * n2, &arrows)
}

/// The square-product belt: x(u+1) from x(u) by mutating the (+,+) then
/// (-,-) vertices for u even, the (+,-) then (-,+) vertices for u odd.
pub struct SquareBelt {
    pub ring: Ring,
    pub eps: Vec<i64>,
    pub eps2: Vec<i64>,
    pub seeds: Vec<Seed>,
}

impl SquareBelt {
    pub fn new(
        ring: &Ring,
        dd: &DynkinData,
        dd2: &DynkinData,
        steps: usize,
        var_of: impl Fn(usize, usize) -> Poly,
    ) -> Result<SquareBelt, ClusterError> {
        let (q, eps) = alternating_quiver(dd);
        let (q2, eps2) = alternating_quiver(dd2);
        let quiver = square_product(&q, &eps, &q2, &eps2);
        let n2 = dd2.rank();
        let cluster = (0..dd.rank() * n2)
            .map(|v| var_of(v / n2, v % n2))
            .collect();
        let mut seeds = vec![Seed { quiver, cluster }];
        for u in 0..steps {
            let pats: [(i64, i64); 2] = if u % 2 == 0 {
                [(1, 1), (-1, -1)]
            } else {
                [(1, -1), (-1, 1)]
            };
            let mut s = seeds.last().unwrap().clone();
            for (sa, sb) in pats {
                for v in 0..s.cluster.len() {
                    if eps[v / n2] == sa && eps2[v % n2] == sb {
                        s = s.mutate(ring, v)?;
                    }
                }
            }
            seeds.push(s);
        }
        Ok(SquareBelt {
            ring: ring.clone(),
            eps,
            eps2,
            seeds,
        })
    }

    pub fn x(&self, a: usize, b: usize, u: usize) -> &Poly {
        &self.seeds[u].cluster[a * self.eps2.len() + b]
    }

    /// The mixed bilinear system: x_{a,b}(u-1) x_{a,b}(u+1) equals the sum
    /// of the two neighbor products (second-coordinate ones plus
    /// first-coordinate ones).
    pub fn verify_mixed_t(&self, dd: &DynkinData, dd2: &DynkinData, job: &str) -> Report {
        let mut report = Report::new(job);
        let mut ok = true;
        let mut witness = String::new();
        for u in 1..self.seeds.len() - 1 {
            for a in 1..=dd.rank() {
                for b in 1..=dd2.rank() {
                    let lhs = self.x(a - 1, b - 1, u - 1).mul(self.x(a - 1, b - 1, u + 1));
                    let mut p1 = Poly::one(&self.ring);
                    for k in dd2.neighbors(b) {
                        p1 = p1.mul(self.x(a - 1, k - 1, u));
                    }
                    let mut p2 = Poly::one(&self.ring);
                    for k in dd.neighbors(a) {
                        p2 = p2.mul(self.x(k - 1, b - 1, u));
                    }
                    if lhs != p1.add(&p2) && ok {
                        ok = false;
                        witness = format!("vertex ({a},{b}), u={u}");
                    }
                }
            }
        }
        report.check(
            format!("{job}: square-belt bilinear relations"),
            "x(u-1)x(u+1) = prod + prod",
            ok,
            || witness,
        );
        report
    }
}

/// One application of the tensor-product mutation loop
/// (the (-,+), (+,+), (-,-), (+,-) blocks in that order).
pub fn mutate_tensor(
    ring: &Ring,
    seed: &Seed,
    eps: &[i64],
    eps2: &[i64],
) -> Result<Seed, ClusterError> {
    let n2 = eps2.len();
    let mut s = seed.clone();
    for (sa, sb) in [(-1, 1), (1, 1), (-1, -1), (1, -1)] {
        for v in 0..s.cluster.len() {
            if eps[v / n2] == sa && eps2[v % n2] == sb {
                s = s.mutate(ring, v)?;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynkin::{data_for, FiniteType};
    use crate::tsys::{solve_default, SystemKind, SystemSpec};

    fn dd(ty: &str) -> DynkinData {
        data_for(FiniteType::parse(ty).unwrap())
    }

    fn formal_belt(ty: &str, steps: usize) -> (Ring, Belt) {
        let ring = Ring::new();
        let d = dd(ty);
        let r2 = ring.clone();
        let belt = Belt::new(&ring, &d, steps, move |v| {
            Poly::var(&r2, r2.var(&format!("x{}", v + 1)))
        })
        .unwrap();
        (ring, belt)
    }

    #[test]
    fn a2_first_mutation_and_involution() {
        let (ring, belt) = formal_belt("A2", 1);
        let x1 = Poly::var(&ring, ring.var("x1"));
        let x2 = Poly::var(&ring, ring.var("x2"));
        // vertex 1 is the source: mu_1 replaces x1 by (1 + x2)/x1
        let expect = Poly::one(&ring).add(&x2).exact_div(&x1).unwrap();
        assert_eq!(*belt.x(0, 1), expect);
        assert_eq!(*belt.x(1, 1), x2);
        // involution
        let back = belt.seeds[1].mutate(&ring, 0).unwrap();
        assert_eq!(back, belt.seeds[0]);
    }

    #[test]
    fn belt_satisfies_bilinear_system() {
        let (_, belt) = formal_belt("A2", 12);
        assert!(belt.verify_t2(&dd("A2"), "A2 belt").passed());
        let (_, belt) = formal_belt("A3", 14);
        assert!(belt.verify_t2(&dd("A3"), "A3 belt").passed());
    }

    #[test]
    fn a2_seed_periodicity_and_count() {
        let (_, belt) = formal_belt("A2", 10);
        // h = 3 odd: five half-steps close the belt up to the node swap
        let omega = [1usize, 0];
        assert!(belt.seeds[0].eq_under(&omega, &belt.seeds[5]));
        // full period h + 2 = 5 whole steps
        let id = [0usize, 1];
        assert!(belt.seeds[0].eq_under(&id, &belt.seeds[10]));
        assert_eq!(belt.distinct_variables(), 5);
    }

    #[test]
    fn a3_seed_periodicity_and_count() {
        let (_, belt) = formal_belt("A3", 12);
        // h = 4 even: mu^3 = six half-steps, up to omega (1 <-> 3)
        let omega = [2usize, 1, 0];
        assert!(belt.seeds[0].eq_under(&omega, &belt.seeds[6]));
        let id = [0usize, 1, 2];
        assert!(belt.seeds[0].eq_under(&id, &belt.seeds[12]));
        assert_eq!(belt.distinct_variables(), 9);
    }

    #[test]
    fn belt_matches_level2_solution() {
        let spec = SystemSpec::new(
            SystemKind::Restricted {
                ty: FiniteType::parse("A3").unwrap(),
                level: 2,
            },
            (-2, 16),
        );
        let sol = solve_default(&spec).unwrap();
        let ring = sol.ring.clone();
        let d = dd("A3");
        let names: Vec<Poly> = (1..=3usize)
            .map(|a| {
                let n = if d.eps(a) == 1 { 0 } else { 1 };
                Poly::var(&ring, ring.var(&format!("T.a{a}.m1.u{n}")))
            })
            .collect();
        let belt = Belt::new(&ring, &d, 12, |v| names[v].clone()).unwrap();
        let rep = belt.verify_t_correspondence(&sol, "A3 belt vs lattice");
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn square_and_tensor_products_of_a2() {
        let (q, eps) = alternating_quiver(&dd("A2"));
        let sq = square_product(&q, &eps, &q, &eps);
        assert!(sq.is_skew_symmetric_no_loops());
        // oriented 4-cycle: (+,+) <- (-,+) <- (-,-) <- (+,-) <- (+,+)
        // with our indexing (a,b) -> 2a+b: vertices 0=(+,+) 1=(+,-) 2=(-,+) 3=(-,-)
        assert_eq!(sq.weight(0, 1), 1);
        assert_eq!(sq.weight(1, 3), 1);
        assert_eq!(sq.weight(3, 2), 1);
        assert_eq!(sq.weight(2, 0), 1);
        let tp = tensor_product(&q, &q);
        assert_eq!(tp.weight(0, 1), 1);
        assert_eq!(tp.weight(0, 2), 1);
        assert_eq!(tp.weight(1, 3), 1);
        assert_eq!(tp.weight(2, 3), 1);
        // diagonal arrow (-,-) -> (+,+)
        assert_eq!(tp.weight(3, 0), 1);
    }

    #[test]
    fn square_belt_a2a2_mixed_system_and_tensor_periodicity() {
        let ring = Ring::new();
        let d = dd("A2");
        let r2 = ring.clone();
        let belt = SquareBelt::new(&ring, &d, &d, 14, move |a, b| {
            Poly::var(&r2, r2.var(&format!("x{}{}", a + 1, b + 1)))
        })
        .unwrap();
        assert!(belt.verify_mixed_t(&d, &d, "A2xA2 belt").passed());
        // quiver alternates between the square product and its opposite
        assert_eq!(belt.seeds[2].quiver, belt.seeds[0].quiver);
        assert_eq!(belt.seeds[1].quiver, belt.seeds[0].quiver.opposite());

        // tensor picture: mu_otimes^(h+h') = id on (Q (x) Q', z(0))
        let (q, eps) = alternating_quiver(&d);
        let tq = tensor_product(&q, &q);
        let seed0 = Seed {
            quiver: tq,
            cluster: belt.seeds[0].cluster.clone(),
        };
        let mut s = seed0.clone();
        for _ in 0..6 {
            s = mutate_tensor(&ring, &s, &eps, &eps).unwrap();
        }
        assert_eq!(s, seed0);
    }
}
