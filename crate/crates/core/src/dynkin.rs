//! Static combinatorial data for the finite Dynkin types and the twisted
//! diagram automorphisms: Cartan matrices, the scaling numbers t and t_a,
//! dual Coxeter numbers, the involution ω, and a fixed bipartite sign choice.
//!
//! Node enumeration is nonstandard for the exceptional types: E6 is the chain
//! 1-2-3-5-6 with 4 attached to 3; E7 the chain 1-…-6 with 7 attached to 3;
//! E8 the chain 1-…-7 with 8 attached to 5.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FiniteType {
    pub family: Family,
    pub rank: usize,
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum DynkinError {
    #[error("invalid rank {1} for family {0:?}")]
    InvalidRank(Family, usize),
    #[error("unsupported type string {0:?}")]
    BadTypeString(String),
    #[error("unsupported twisted pair ({0}, kappa={1})")]
    UnsupportedPair(FiniteType, usize),
    #[error("operation requires a simply laced type, got {0}")]
    NotSimplyLaced(FiniteType),
    #[error("operation requires a nonsimply laced type, got {0}")]
    SimplyLacedInput(FiniteType),
}

impl FiniteType {
    pub fn new(family: Family, rank: usize) -> Result<Self, DynkinError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(FiniteType { family, rank })
        } else {
            Err(DynkinError::InvalidRank(family, rank))
        }
    }

    /// Parses "A4", "B3", … ; twisted strings "A3~2" are handled by
    /// [`TwistedType::parse`].
    pub fn parse(s: &str) -> Result<Self, DynkinError> {
        let bad = || DynkinError::BadTypeString(s.to_owned());
        let mut chars = s.chars();
        let fam = match chars.next().ok_or_else(bad)? {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        FiniteType::new(fam, rank)
    }

    pub fn is_simply_laced(&self) -> bool {
        matches!(self.family, Family::A | Family::D | Family::E)
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

/// All per-type data; nodes are 1-based throughout.
#[derive(Clone, Debug)]
pub struct DynkinData {
    pub ty: FiniteType,
    /// Cartan matrix C_ab, 1-based via [`DynkinData::cartan`].
    cartan: Vec<Vec<i64>>,
    /// t = 1, 2, 3 for simply laced / BCF / G.
    pub t: i64,
    /// t_a = 1 on long nodes, t on short nodes.
    t_a: Vec<i64>,
    /// Dual Coxeter number.
    pub hdual: i64,
    omega: Vec<usize>,
    eps: Vec<i8>,
}

impl DynkinData {
    pub fn rank(&self) -> usize {
        self.ty.rank
    }

    pub fn cartan(&self, a: usize, b: usize) -> i64 {
        self.cartan[a - 1][b - 1]
    }

    pub fn t_a(&self, a: usize) -> i64 {
        self.t_a[a - 1]
    }

    pub fn omega(&self, a: usize) -> usize {
        self.omega[a - 1]
    }

    pub fn eps(&self, a: usize) -> i8 {
        self.eps[a - 1]
    }

    /// Nodes b ≠ a with C_ab < 0.
    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        (1..=self.rank())
            .filter(|&b| b != a && self.cartan(a, b) < 0)
            .collect()
    }
}

/// Undirected edge list per family, paper enumeration.
fn edges(ty: FiniteType) -> Vec<(usize, usize)> {
    let r = ty.rank;
    let mut e: Vec<(usize, usize)> = Vec::new();
    match ty.family {
        Family::A | Family::B | Family::C | Family::F | Family::G => {
            e.extend((1..r).map(|a| (a, a + 1)));
        }
        Family::D => {
            e.extend((1..r - 1).map(|a| (a, a + 1)));
            e.push((r - 2, r));
        }
        Family::E => match r {
            6 => e.extend([(1, 2), (2, 3), (3, 5), (5, 6), (3, 4)]),
            7 => e.extend([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7)]),
            8 => e.extend([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 8)]),
            _ => unreachable!(),
        },
    }
    e
}

/// Builds all data for a finite type.
pub fn data_for(ty: FiniteType) -> DynkinData {
    let r = ty.rank;
    let t: i64 = match ty.family {
        Family::B | Family::C | Family::F => 2,
        Family::G => 3,
        _ => 1,
    };
    // Short nodes carry t_a = t.
    let t_a: Vec<i64> = (1..=r)
        .map(|a| match ty.family {
            Family::B if a == r => t,
            Family::C if a < r => t,
            Family::F if a >= 3 => t,
            Family::G if a == 2 => t,
            _ => 1,
        })
        .collect();
    let mut cartan = vec![vec![0i64; r]; r];
    for a in 0..r {
        cartan[a][a] = 2;
    }
    for (a, b) in edges(ty) {
        // Row a is scaled by the squared length of root a: a short row sees a
        // long neighbor with entry -t, all other adjacent entries are -1.
        cartan[a - 1][b - 1] = if t_a[a - 1] > t_a[b - 1] { -t } else { -1 };
        cartan[b - 1][a - 1] = if t_a[b - 1] > t_a[a - 1] { -t } else { -1 };
    }
    let hdual: i64 = match ty.family {
        Family::A => r as i64 + 1,
        Family::B => 2 * r as i64 - 1,
        Family::C => r as i64 + 1,
        Family::D => 2 * r as i64 - 2,
        Family::E => [12, 18, 30][r - 6],
        Family::F => 9,
        Family::G => 4,
    };
    let omega: Vec<usize> = (1..=r)
        .map(|a| match ty.family {
            Family::A => r + 1 - a,
            // D_r: the two tail nodes swap only for odd rank.
            Family::D if r % 2 == 1 && a == r - 1 => r,
            Family::D if r % 2 == 1 && a == r => r - 1,
            Family::E if r == 6 => match a {
                1 => 6,
                2 => 5,
                5 => 2,
                6 => 1,
                _ => a,
            },
            _ => a,
        })
        .collect();
    // Canonical bipartite choice: sign by BFS depth from node 1.
    let mut depth = vec![usize::MAX; r + 1];
    depth[1] = 0;
    let mut queue = std::collections::VecDeque::from([1usize]);
    let adj = edges(ty);
    while let Some(a) = queue.pop_front() {
        for &(x, y) in &adj {
            for (p, q) in [(x, y), (y, x)] {
                if p == a && depth[q] == usize::MAX {
                    depth[q] = depth[a] + 1;
                    queue.push_back(q);
                }
            }
        }
    }
    let eps: Vec<i8> = (1..=r).map(|a| if depth[a] % 2 == 0 { 1 } else { -1 }).collect();
    DynkinData {
        ty,
        cartan,
        t,
        t_a,
        hdual,
        omega,
        eps,
    }
}

/// A twisted type X_N^(κ), named in configs as e.g. "A3~2".
#[derive(Clone, Debug)]
pub struct TwistedType {
    pub base: FiniteType,
    pub kappa: usize,
    sigma: Vec<usize>,
    /// Representatives of the σ-orbits, one per orbit.
    pub i_sigma: Vec<usize>,
    kappa_a: Vec<usize>,
    pub hdual: i64,
}

impl TwistedType {
    pub fn sigma(&self, a: usize) -> usize {
        self.sigma[a - 1]
    }

    /// κ_a for a node of the base diagram: κ on σ-fixed nodes, else 1.
    pub fn kappa_a(&self, a: usize) -> usize {
        self.kappa_a[a - 1]
    }

    pub fn parse(s: &str) -> Result<Self, DynkinError> {
        let (base, kappa) = s
            .split_once('~')
            .ok_or_else(|| DynkinError::BadTypeString(s.to_owned()))?;
        let base = FiniteType::parse(base)?;
        let kappa: usize = kappa
            .parse()
            .map_err(|_| DynkinError::BadTypeString(s.to_owned()))?;
        twisted_data_for(base, kappa)
    }
}

impl fmt::Display for TwistedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}~{}", self.base, self.kappa)
    }
}

pub fn twisted_data_for(base: FiniteType, kappa: usize) -> Result<TwistedType, DynkinError> {
    let n = base.rank;
    let unsupported = || DynkinError::UnsupportedPair(base, kappa);
    let (sigma, i_sigma, hdual): (Vec<usize>, Vec<usize>, i64) = match (base.family, kappa) {
        (Family::A, 2) if n >= 2 => {
            let sigma: Vec<usize> = (1..=n).map(|a| n + 1 - a).collect();
            let r = n / 2 + n % 2; // representatives 1..r for both parities of N
            let hdual = if n % 2 == 1 { n as i64 + 1 } else { n as i64 + 1 };
            (sigma, (1..=r).collect(), hdual)
        }
        (Family::D, 2) => {
            let mut sigma: Vec<usize> = (1..=n).collect();
            sigma.swap(n - 2, n - 1); // nodes n-1 and n
            (sigma, (1..n).collect(), 2 * (n as i64 - 1))
        }
        (Family::E, 2) if n == 6 => {
            let sigma = vec![6, 5, 3, 4, 2, 1];
            (sigma, vec![1, 2, 3, 4], 12)
        }
        (Family::D, 3) if n == 4 => {
            // order-3 rotation of the three outer nodes around the center 2
            let sigma = vec![3, 2, 4, 1];
            (sigma, vec![1, 2], 6)
        }
        _ => return Err(unsupported()),
    };
    let kappa_a: Vec<usize> = (1..=n)
        .map(|a| if sigma[a - 1] == a { kappa } else { 1 })
        .collect();
    Ok(TwistedType {
        base,
        kappa,
        sigma,
        i_sigma,
        kappa_a,
        hdual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> DynkinData {
        data_for(FiniteType::parse(s).unwrap())
    }

    #[test]
    fn a4_data() {
        let d = t("A4");
        assert_eq!(d.hdual, 5);
        assert_eq!(d.omega(1), 4);
        assert_eq!(d.t, 1);
        assert!((1..=4).all(|a| d.t_a(a) == 1));
    }

    #[test]
    fn b3_data() {
        let d = t("B3");
        assert_eq!(d.hdual, 5);
        assert_eq!(d.t, 2);
        assert_eq!((d.t_a(1), d.t_a(2), d.t_a(3)), (1, 1, 2));
        assert!((1..=3).all(|a| d.omega(a) == a));
        // short row sees the long neighbor with -2
        assert_eq!(d.cartan(3, 2), -2);
        assert_eq!(d.cartan(2, 3), -1);
    }

    #[test]
    fn c3_data() {
        let d = t("C3");
        assert_eq!((d.t_a(1), d.t_a(2), d.t_a(3)), (2, 2, 1));
        assert_eq!(d.cartan(2, 3), -2);
        assert_eq!(d.cartan(3, 2), -1);
    }

    #[test]
    fn d_even_omega_is_identity() {
        let d = t("D4");
        assert!((1..=4).all(|a| d.omega(a) == a));
        let d5 = t("D5");
        assert_eq!(d5.omega(4), 5);
        assert_eq!(d5.omega(5), 4);
    }

    #[test]
    fn omega_preserves_cartan() {
        for s in ["A5", "B4", "C4", "D5", "D6", "E6", "E7", "E8", "F4", "G2"] {
            let d = t(s);
            for a in 1..=d.rank() {
                for b in 1..=d.rank() {
                    assert_eq!(d.cartan(d.omega(a), d.omega(b)), d.cartan(a, b), "{s}");
                }
            }
        }
    }

    #[test]
    fn bipartite_signs_alternate() {
        for s in ["A5", "D6", "E7", "E8"] {
            let d = t(s);
            for a in 1..=d.rank() {
                for b in d.neighbors(a) {
                    assert_ne!(d.eps(a), d.eps(b), "{s}: {a}-{b}");
                }
            }
        }
    }

    #[test]
    fn simply_laced_h_equals_coxeter_number() {
        // h∨ = h for simply laced; spot values.
        assert_eq!(t("A3").hdual, 4);
        assert_eq!(t("D4").hdual, 6);
        assert_eq!(t("E6").hdual, 12);
    }

    #[test]
    fn twisted_a3() {
        let tw = twisted_data_for(FiniteType::parse("A3").unwrap(), 2).unwrap();
        assert_eq!(tw.i_sigma, vec![1, 2]);
        assert_eq!(tw.sigma(1), 3);
        assert_eq!(tw.hdual, 4);
        assert_eq!(tw.kappa_a(2), 2);
        assert_eq!(tw.kappa_a(1), 1);
    }

    #[test]
    fn twisted_d4_kappa3_and_e6() {
        let tw = TwistedType::parse("D4~3").unwrap();
        assert_eq!(tw.hdual, 6);
        assert_eq!(tw.i_sigma, vec![1, 2]);
        assert_eq!(tw.sigma(1), 3);
        assert_eq!(tw.sigma(3), 4);
        assert_eq!(tw.sigma(4), 1);
        let e6 = TwistedType::parse("E6~2").unwrap();
        assert_eq!(e6.i_sigma, vec![1, 2, 3, 4]);
        assert_eq!(
            (1..=4).map(|a| e6.kappa_a(a)).collect::<Vec<_>>(),
            vec![1, 1, 2, 2]
        );
        // σ has order κ and preserves the Cartan matrix
        let d = data_for(e6.base);
        for a in 1..=6 {
            assert_eq!(e6.sigma(e6.sigma(a)), a);
            for b in 1..=6 {
                assert_eq!(d.cartan(e6.sigma(a), e6.sigma(b)), d.cartan(a, b));
            }
        }
    }

    #[test]
    fn twisted_a4() {
        let tw = TwistedType::parse("A4~2").unwrap();
        assert_eq!(tw.i_sigma, vec![1, 2]);
        assert_eq!(tw.hdual, 5); // 2r+1 with r=2
        assert!((1..=4).all(|a| tw.sigma(a) != a));
    }
}
