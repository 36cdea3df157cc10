//! Sparse multivariate Laurent polynomials over arbitrary-precision integers.
//!
//! Generators may be declared *involutive* (`s^2 = 1`); their exponents are
//! reduced mod 2 on every product, so the relation holds identically during
//! evolution rather than as a quotient afterthought.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

const INVOLUTIVE_BIT: u32 = 1 << 31;

/// Index into a [`Ring`]'s symbol table. The top bit flags involutive
/// generators so arithmetic never needs a table lookup.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(u32);

impl VarId {
    pub fn is_involutive(self) -> bool {
        self.0 & INVOLUTIVE_BIT != 0
    }

    fn index(self) -> usize {
        (self.0 & !INVOLUTIVE_BIT) as usize
    }
}

#[derive(Default)]
struct Symbols {
    names: Vec<String>,
    ids: HashMap<String, VarId>,
}

/// Shared, append-only symbol table. Cloning is cheap; all polynomials of one
/// computation carry the same ring.
#[derive(Clone, Default)]
pub struct Ring {
    inner: Arc<RwLock<Symbols>>,
}

impl Ring {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&self, name: &str, involutive: bool) -> VarId {
        let mut sym = self.inner.write().unwrap();
        if let Some(&id) = sym.ids.get(name) {
            assert_eq!(
                id.is_involutive(),
                involutive,
                "variable {name} re-interned with a different involutive flag"
            );
            return id;
        }
        let mut raw = sym.names.len() as u32;
        assert!(raw < INVOLUTIVE_BIT, "symbol table overflow");
        if involutive {
            raw |= INVOLUTIVE_BIT;
        }
        let id = VarId(raw);
        sym.names.push(name.to_owned());
        sym.ids.insert(name.to_owned(), id);
        id
    }

    /// Interns an ordinary generator.
    pub fn var(&self, name: &str) -> VarId {
        self.intern(name, false)
    }

    /// Interns an involutive generator (`s^2 = 1`).
    pub fn sign_var(&self, name: &str) -> VarId {
        self.intern(name, true)
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.inner.read().unwrap().ids.get(name).copied()
    }

    pub fn name(&self, id: VarId) -> String {
        self.inner.read().unwrap().names[id.index()].clone()
    }

    fn same_table(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

/// Monomial: sorted `(VarId, exponent)` pairs, no zero exponents, involutive
/// exponents in {0, 1}.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(Vec<(VarId, i64)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(id: VarId) -> Self {
        Mono(vec![(id, 1)])
    }

    fn normalize_exp(id: VarId, e: i64) -> i64 {
        if id.is_involutive() {
            e.rem_euclid(2)
        } else {
            e
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, i64)>) -> Self {
        let mut acc: BTreeMap<VarId, i64> = BTreeMap::new();
        for (id, e) in pairs {
            *acc.entry(id).or_insert(0) += e;
        }
        Mono(
            acc.into_iter()
                .map(|(id, e)| (id, Self::normalize_exp(id, e)))
                .filter(|&(_, e)| e != 0)
                .collect(),
        )
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[(VarId, i64)] {
        &self.0
    }

    fn degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Merge-combine exponents; `f` maps the other monomial's exponents
    /// (identity for multiplication, negation for division).
    fn combine(&self, other: &Mono, f: impl Fn(i64) -> i64) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let pick = match (self.0.get(i), other.0.get(j)) {
                (Some(&(a, _)), Some(&(b, _))) => a.cmp(&b),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            let (id, e) = match pick {
                Ordering::Less => {
                    let (id, e) = self.0[i];
                    i += 1;
                    (id, e)
                }
                Ordering::Greater => {
                    let (id, e) = other.0[j];
                    j += 1;
                    (id, f(e))
                }
                Ordering::Equal => {
                    let (id, e) = self.0[i];
                    let (_, e2) = other.0[j];
                    i += 1;
                    j += 1;
                    (id, e + f(e2))
                }
            };
            let e = Self::normalize_exp(id, e);
            if e != 0 {
                out.push((id, e));
            }
        }
        Mono(out)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        self.combine(other, |e| e)
    }

    /// Laurent division: always defined (exponents may go negative; involutive
    /// exponents wrap mod 2, consistent with s^{-1} = s).
    pub fn div(&self, other: &Mono) -> Mono {
        self.combine(other, |e| -e)
    }

    /// Componentwise `other <= self`, for polynomial (non-negative) division.
    fn divisible_nonneg(&self, other: &Mono) -> bool {
        let mut i = 0;
        for &(id, e) in &other.0 {
            while i < self.0.len() && self.0[i].0 < id {
                i += 1;
            }
            match self.0.get(i) {
                Some(&(id2, e2)) if id2 == id && e2 >= e => {}
                _ => return false,
            }
        }
        true
    }

    fn inverse(&self) -> Mono {
        Mono(
            self.0
                .iter()
                .map(|&(id, e)| (id, Self::normalize_exp(id, -e)))
                .collect(),
        )
    }

    fn has_involutive(&self) -> bool {
        self.0.iter().any(|&(id, _)| id.is_involutive())
    }

    /// Splits into (involutive part, ordinary part).
    fn split_involutive(&self) -> (Mono, Mono) {
        let (inv, ord): (Vec<_>, Vec<_>) =
            self.0.iter().partition(|&&(id, _)| id.is_involutive());
        (Mono(inv), Mono(ord))
    }
}

/// Graded-lexicographic order (degree first, then earlier variables weigh
/// more). A genuine monomial order once exponents are non-negative.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // lex on (VarId ascending): first differing variable decides,
        // missing = 0, larger exponent = larger monomial.
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, e)), None) => {
                    return if e > 0 { Ordering::Greater } else { Ordering::Less }
                }
                (None, Some(&(_, e))) => {
                    return if e > 0 { Ordering::Less } else { Ordering::Greater }
                }
                (Some(&(a, e1)), Some(&(b, e2))) => match a.cmp(&b) {
                    Ordering::Less => {
                        if e1 != 0 {
                            return if e1 > 0 { Ordering::Greater } else { Ordering::Less };
                        }
                        i += 1;
                    }
                    Ordering::Greater => {
                        if e2 != 0 {
                            return if e2 > 0 { Ordering::Less } else { Ordering::Greater };
                        }
                        j += 1;
                    }
                    Ordering::Equal => {
                        match e1.cmp(&e2) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("binding a negative power of a non-unit value for {0}")]
    NotAUnit(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Sparse Laurent polynomial; terms keyed by [`Mono`] in canonical order.
#[derive(Clone)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Mono, BigInt>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        debug_assert!(self.ring.same_table(&other.ring));
        self.terms == other.terms
    }
}
impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Poly {
    pub fn zero(ring: &Ring) -> Self {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Poly::constant(ring, BigInt::one())
    }

    pub fn constant(ring: &Ring, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn var(ring: &Ring, id: VarId) -> Self {
        Poly::monomial(ring, Mono::var(id), BigInt::one())
    }

    pub fn monomial(ring: &Ring, m: Mono, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn from_terms(ring: &Ring, pairs: impl IntoIterator<Item = (Mono, BigInt)>) -> Self {
        let mut out = Poly::zero(ring);
        for (m, c) in pairs {
            out.add_term(m, c);
        }
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().map_or(false, |(m, c)| m.is_one() && c.is_one())
    }

    /// Some(monomial, coeff) iff the polynomial has exactly one term.
    pub fn as_monomial(&self) -> Option<(&Mono, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// A unit of ℤ[x^{±1}]: a single term with coefficient ±1.
    pub fn is_unit(&self) -> bool {
        self.as_monomial().map_or(false, |(_, c)| c.magnitude().is_one())
    }

    fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert!(self.ring.same_table(&other.ring));
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert!(self.ring.same_table(&other.ring));
        let mut out = Poly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Mono, c: &BigInt) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m1, c1)| (m1.mul(m), c1 * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(&self.ring);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact division: returns `r` with `r * q = p`, or `NotDivisible`.
    ///
    /// Involutive generators make the ring a non-domain, so the divisor is
    /// first made involutive-free by splitting p and q at s = ±1 per
    /// involutive variable s of q and reconstructing the two halves.
    pub fn exact_div(&self, q: &Poly) -> Result<Poly, LaurentError> {
        debug_assert!(self.ring.same_table(&q.ring));
        if q.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Poly::zero(&self.ring));
        }
        // Monomial divisor: shift exponents, divide coefficients.
        if let Some((qm, qc)) = q.as_monomial() {
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                if (c % qc) != BigInt::zero() {
                    return Err(LaurentError::NotDivisible(
                        "coefficient not divisible by monomial divisor".into(),
                    ));
                }
                terms.insert(m.div(qm), c / qc);
            }
            return Ok(Poly {
                ring: self.ring.clone(),
                terms,
            });
        }
        // Divisor carrying an involutive variable s: split both sides at
        // s = ±1; the two quotients reconstruct the answer uniquely.
        if let Some(s) = q
            .terms
            .keys()
            .flat_map(|m| m.exponents())
            .find(|(id, _)| id.is_involutive())
            .map(|&(id, _)| id)
        {
            let (p0, p1) = self.split_at(s);
            let (q0, q1) = q.split_at(s);
            let q_plus = q0.add(&q1);
            let q_minus = q0.sub(&q1);
            if q_plus.is_zero() || q_minus.is_zero() {
                return Err(LaurentError::NotDivisible(
                    "divisor vanishes at an involutive specialization".into(),
                ));
            }
            let r_plus = p0.add(&p1).exact_div(&q_plus)?;
            let r_minus = p0.sub(&p1).exact_div(&q_minus)?;
            let two = Poly::constant(&self.ring, 2);
            let r0 = r_plus.add(&r_minus).exact_div(&two)?;
            let r1 = r_plus.sub(&r_minus).exact_div(&two)?;
            let r = r0.add(&r1.mul(&Poly::var(&self.ring, s)));
            // Non-domain: certify.
            if r.mul(q) != *self {
                return Err(LaurentError::NotDivisible(
                    "reconstruction across involutive split failed".into(),
                ));
            }
            return Ok(r);
        }
        // Divisor involutive-free; the dividend may still carry involutive
        // monomials — divide each involutive stratum separately.
        if self.terms.keys().any(|m| m.has_involutive()) {
            let mut strata: BTreeMap<Mono, Poly> = BTreeMap::new();
            for (m, c) in &self.terms {
                let (inv, ord) = m.split_involutive();
                strata
                    .entry(inv)
                    .or_insert_with(|| Poly::zero(&self.ring))
                    .add_term(ord, c.clone());
            }
            let mut out = Poly::zero(&self.ring);
            for (inv, part) in strata {
                let quot = part.exact_div(q)?;
                out = out.add(&quot.mul_monomial(&inv, &BigInt::one()));
            }
            return Ok(out);
        }
        // Ordinary case: shift so that dividend, divisor, AND quotient are
        // free of negative exponents, then leading-term elimination under
        // graded-lex.  The quotient's per-variable minimum exponent equals
        // the difference of the operands' minima (lowest strata multiply
        // without cancellation in a domain), which fixes the dividend shift.
        let mp = self.min_exponents();
        let mq = q.min_exponents();
        let mut dividend_shift = Vec::new();
        let mut divisor_shift = Vec::new();
        let mut unshift = Vec::new();
        let ids: std::collections::BTreeSet<VarId> =
            mp.keys().chain(mq.keys()).copied().collect();
        for id in ids {
            let mpv = mp.get(&id).copied().unwrap_or(0);
            let mqv = mq.get(&id).copied().unwrap_or(0);
            let b = (-mqv).max(0);
            let a = (mqv.max(0) - mpv).max(0);
            dividend_shift.push((id, a));
            divisor_shift.push((id, b));
            unshift.push((id, b - a));
        }
        let p_shift = self.mul_monomial(&Mono::from_pairs(dividend_shift), &BigInt::one());
        let q_shift = q.mul_monomial(&Mono::from_pairs(divisor_shift), &BigInt::one());
        let r = p_shift.polydiv(&q_shift)?;
        Ok(r.mul_monomial(&Mono::from_pairs(unshift), &BigInt::one()))
    }

    /// Per-variable minimum exponent across all terms (0 if any term omits
    /// the variable).
    fn min_exponents(&self) -> BTreeMap<VarId, i64> {
        let mut mins: BTreeMap<VarId, (i64, usize)> = BTreeMap::new();
        for m in self.terms.keys() {
            for &(id, e) in m.exponents() {
                let entry = mins.entry(id).or_insert((e, 0));
                entry.0 = entry.0.min(e);
                entry.1 += 1;
            }
        }
        let n = self.terms.len();
        mins.into_iter()
            .map(|(id, (min, count))| (id, if count < n { min.min(0) } else { min }))
            .collect()
    }

    /// p = p0 + s*p1 with p0, p1 free of s.
    fn split_at(&self, s: VarId) -> (Poly, Poly) {
        let mut p0 = Poly::zero(&self.ring);
        let mut p1 = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.exponents().iter().any(|&(id, e)| id == s && e != 0) {
                p1.add_term(m.div(&Mono::var(s)), c.clone());
            } else {
                p0.add_term(m.clone(), c.clone());
            }
        }
        (p0, p1)
    }

    /// Division with non-negative exponents everywhere; exact or fails.
    fn polydiv(&self, q: &Poly) -> Result<Poly, LaurentError> {
        let (qm, qc) = q.terms.iter().next_back().expect("divisor nonzero");
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.ring);
        while let Some((rm, rc)) = rem.terms.iter().next_back() {
            if !rm.divisible_nonneg(qm) || (rc % qc) != BigInt::zero() {
                return Err(LaurentError::NotDivisible(
                    "leading-term elimination left a remainder".into(),
                ));
            }
            let tm = rm.div(qm);
            let tc = rc / qc;
            rem = rem.sub(&q.mul_monomial(&tm, &tc));
            quot.add_term(tm, tc);
        }
        Ok(quot)
    }

    /// Ring map sending bound variables to the given values. Negative powers
    /// require the bound value to be a unit (±monomial).
    pub fn substitute(&self, bindings: &HashMap<VarId, Poly>) -> Result<Poly, LaurentError> {
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(&self.ring, c.clone());
            let mut residual = Vec::new();
            for &(id, e) in m.exponents() {
                match bindings.get(&id) {
                    None => residual.push((id, e)),
                    Some(v) => {
                        let factor = if e >= 0 {
                            v.pow(e as u32)
                        } else {
                            let (vm, vc) = v.as_monomial().ok_or_else(|| {
                                LaurentError::NotAUnit(self.ring.name(id))
                            })?;
                            if !vc.magnitude().is_one() {
                                return Err(LaurentError::NotAUnit(self.ring.name(id)));
                            }
                            Poly::monomial(&self.ring, vm.inverse(), vc.clone()).pow((-e) as u32)
                        };
                        acc = acc.mul(&factor);
                    }
                }
            }
            out = out.add(&acc.mul_monomial(&Mono::from_pairs(residual), &BigInt::one()));
        }
        Ok(out)
    }

    /// Variable renaming as a ring endomorphism.
    pub fn rename(&self, map: &HashMap<VarId, VarId>) -> Poly {
        let bindings: HashMap<VarId, Poly> = map
            .iter()
            .map(|(&from, &to)| (from, Poly::var(&self.ring, to)))
            .collect();
        // Renaming binds variables to monomials, which are always units.
        self.substitute(&bindings).expect("renaming cannot fail")
    }

    /// Canonical JSON: {"vars": [names...], "terms": [{"e": {idx: exp}, "c": "…"}]}.
    /// Deterministic byte output given equal polynomials over one ring.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Map, Value};
        let mut vars: Vec<VarId> = Vec::new();
        for m in self.terms.keys() {
            for &(id, _) in m.exponents() {
                if !vars.contains(&id) {
                    vars.push(id);
                }
            }
        }
        vars.sort();
        let names: Vec<Value> = vars
            .iter()
            .map(|&id| Value::String(self.ring.name(id)))
            .collect();
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = Map::new();
                for &(id, exp) in m.exponents() {
                    let idx = vars.iter().position(|&v| v == id).unwrap();
                    e.insert(idx.to_string(), json!(exp));
                }
                json!({"e": Value::Object(e), "c": c.to_string()})
            })
            .collect();
        json!({"vars": names, "terms": terms})
    }

    /// Inverse of [`Poly::to_json`]. Unknown names are interned as ordinary
    /// generators; involutive generators must already exist in the ring.
    pub fn from_json(ring: &Ring, v: &serde_json::Value) -> Option<Poly> {
        let vars: Vec<VarId> = v
            .get("vars")?
            .as_array()?
            .iter()
            .map(|n| {
                let name = n.as_str()?;
                Some(ring.lookup(name).unwrap_or_else(|| ring.var(name)))
            })
            .collect::<Option<_>>()?;
        let mut out = Poly::zero(ring);
        for t in v.get("terms")?.as_array()? {
            let c: BigInt = t.get("c")?.as_str()?.parse().ok()?;
            let mut pairs = Vec::new();
            for (k, exp) in t.get("e")?.as_object()? {
                let idx: usize = k.parse().ok()?;
                pairs.push((*vars.get(idx)?, exp.as_i64()?));
            }
            out.add_term(Mono::from_pairs(pairs), c);
        }
        Some(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Largest term first reads naturally.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let abs = c.magnitude();
            let show_coeff = !abs.is_one() || m.is_one();
            if show_coeff {
                write!(f, "{abs}")?;
            }
            for (k, &(id, e)) in m.exponents().iter().enumerate() {
                if show_coeff || k > 0 {
                    write!(f, "*")?;
                }
                write!(f, "{}", self.ring.name(id))?;
                if e != 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

// Debug defers to Display so assertion failures stay readable.
impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}
impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}
impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}
impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Ring, Poly, Poly) {
        let ring = Ring::new();
        let x = Poly::var(&ring, ring.var("x"));
        let y = Poly::var(&ring, ring.var("y"));
        (ring, x, y)
    }

    #[test]
    fn additive_inverse_cancels() {
        let (_, x, _) = setup();
        assert!(x.add(&x.neg()).is_zero());
    }

    #[test]
    fn sum_collects_terms() {
        let (ring, x, y) = setup();
        let lhs = x.add(&y).add(&x.sub(&y));
        assert_eq!(lhs, Poly::constant(&ring, 2).mul(&x));
    }

    #[test]
    fn difference_of_squares() {
        let (_, x, y) = setup();
        let prod = x.sub(&y).mul(&x.add(&y));
        assert_eq!(prod, x.mul(&x).sub(&y.mul(&y)));
    }

    #[test]
    fn involutive_generator_squares_to_one() {
        let ring = Ring::new();
        let s = Poly::var(&ring, ring.sign_var("s"));
        assert!(s.mul(&s).is_one());
    }

    #[test]
    fn negative_exponents_cancel() {
        let (ring, x, _) = setup();
        let xinv = Poly::monomial(&ring, Mono::var(ring.var("x")).inverse(), 1);
        assert_eq!(xinv.mul(&x.mul(&x)), x);
    }

    #[test]
    fn exact_div_binomial() {
        let (_, x, y) = setup();
        let num = x.mul(&x).sub(&y.mul(&y));
        let q = num.exact_div(&x.sub(&y)).unwrap();
        assert_eq!(q, x.add(&y));
    }

    #[test]
    fn exact_div_detects_remainder() {
        let (ring, x, y) = setup();
        let num = x.mul(&x).sub(&y.mul(&y));
        let den = x.add(&Poly::constant(&ring, 2).mul(&y));
        assert!(matches!(
            num.exact_div(&den),
            Err(LaurentError::NotDivisible(_))
        ));
    }

    #[test]
    fn exact_div_by_monomial() {
        let (ring, x, _) = setup();
        let q = Poly::constant(&ring, 2).exact_div(&x).unwrap();
        assert_eq!(q.mul(&x), Poly::constant(&ring, 2));
    }

    #[test]
    fn exact_div_with_involutive_divisor() {
        let ring = Ring::new();
        let x = Poly::var(&ring, ring.var("x"));
        let s = Poly::var(&ring, ring.sign_var("s"));
        let q = x.add(&s.mul(&Poly::constant(&ring, 3)));
        let p = q.mul(&x.add(&s));
        let r = p.exact_div(&q).unwrap();
        assert_eq!(r, x.add(&s));
    }

    #[test]
    fn substitute_basic() {
        let (ring, x, y) = setup();
        let xid = ring.lookup("x").unwrap();
        let p = Poly::one(&ring).add(&x);
        let mut b = HashMap::new();
        b.insert(xid, Poly::one(&ring));
        assert_eq!(p.substitute(&b).unwrap(), Poly::constant(&ring, 2));
        b.insert(xid, y.mul(&y));
        let xinv = Poly::one(&ring).exact_div(&x).unwrap();
        let img = xinv.substitute(&b).unwrap();
        assert_eq!(img.mul(&y.mul(&y)), Poly::one(&ring));
    }

    #[test]
    fn substitute_nonunit_negative_power_fails() {
        let (ring, x, y) = setup();
        let xid = ring.lookup("x").unwrap();
        let xinv = Poly::one(&ring).exact_div(&x).unwrap();
        let mut b = HashMap::new();
        b.insert(xid, Poly::one(&ring).add(&y));
        assert!(matches!(
            xinv.substitute(&b),
            Err(LaurentError::NotAUnit(_))
        ));
    }

    #[test]
    fn exact_div_quotient_with_negative_exponents() {
        // The quotient may need negative exponents even when dividend and
        // divisor have none: (1 + xy)/x = x^{-1} + y.
        let (ring, x, y) = setup();
        let xinv = Poly::one(&ring).exact_div(&x).unwrap();
        let p = xinv.add(&y);
        let prod = p.mul(&x);
        assert_eq!(prod.exact_div(&x).unwrap(), p);
        // Multi-term divisor with mixed-sign exponents.
        let q = x.mul(&y).add(&xinv);
        assert_eq!(p.mul(&q).exact_div(&q).unwrap(), p);
    }

    #[test]
    fn json_roundtrip() {
        let (ring, x, y) = setup();
        let xinv = Poly::one(&ring).exact_div(&x).unwrap();
        let p = xinv.mul(&y).sub(&Poly::constant(&ring, 7));
        let v = p.to_json();
        assert_eq!(Poly::from_json(&ring, &v).unwrap(), p);
        // byte-determinism
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            serde_json::to_string(&p.to_json()).unwrap()
        );
    }
}
