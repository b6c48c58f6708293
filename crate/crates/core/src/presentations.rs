//! The groups `G_a = < x_k | x_k - a_k x_{k+1} >`, their prime-sequence normal forms,
//! the explicit isomorphisms between them, and the embedding of Q as `G_(k+1)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the terms `a_k`, `k >= 1`, are generated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "rule")]
pub enum SequenceRule {
    /// `a_k = k + 1`.
    Successor,
    /// Each natural number repeated `n` times: `a_k = ceil(k / n)`.
    Repeat {
        n: u64,
    },
    Constant {
        value: u64,
    },
    Cycle {
        values: Vec<u64>,
    },
    /// Product of the first `k` primes.
    Primorial,
    /// Finitely many terms and nothing after them.
    Explicit {
        values: Vec<u64>,
    },
}

/// A sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSequence {
    pub prefix: Vec<u64>,
    pub rule: SequenceRule,
}

impl IntSequence {
    pub fn rule(rule: SequenceRule) -> Self {
        IntSequence {
            prefix: Vec::new(),
            rule,
        }
    }

    pub fn successor() -> Self {
        Self::rule(SequenceRule::Successor)
    }

    pub fn explicit(values: Vec<u64>) -> Self {
        Self::rule(SequenceRule::Explicit { values })
    }

    pub fn with_prefix(mut self, prefix: Vec<u64>) -> Self {
        self.prefix = prefix;
        self
    }

    /// `a_k` for `k >= 1`, or `None` past the end of a finite sequence (or on overflow).
    pub fn term(&self, k: usize) -> Option<u64> {
        assert!(k >= 1, "sequences are indexed from 1");
        if let Some(&v) = self.prefix.get(k - 1) {
            return Some(v);
        }
        let j = k - self.prefix.len();
        match &self.rule {
            SequenceRule::Successor => Some(j as u64 + 1),
            SequenceRule::Repeat { n } => Some((j as u64).div_ceil(*n)),
            SequenceRule::Constant { value } => Some(*value),
            SequenceRule::Cycle { values } => values.get((j - 1) % values.len().max(1)).copied(),
            SequenceRule::Primorial => primes_upto_count(j)
                .iter()
                .try_fold(1u64, |acc, p| acc.checked_mul(*p)),
            SequenceRule::Explicit { values } => values.get(j - 1).copied(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.rule, SequenceRule::Explicit { .. })
    }

    /// `prod_{j=from}^{to-1} a_j`.
    pub fn range_product(&self, from: usize, to: usize) -> Option<BigInt> {
        (from..to).try_fold(BigInt::one(), |acc, j| self.term(j).map(|t| acc * t))
    }
}

impl FromStr for IntSequence {
    type Err = Error;

    /// `k+1`, `ones`, `primorial`, `repeat:N`, a single value, or a comma-separated cycle.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rule = match s {
            "k+1" => SequenceRule::Successor,
            "ones" => SequenceRule::Constant { value: 1 },
            "primorial" => SequenceRule::Primorial,
            _ if s.starts_with("repeat:") => {
                let n = s[7..]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad repeat count in `{s}`")))?;
                if n == 0 {
                    return Err(Error::Parse("repeat count must be positive".into()));
                }
                SequenceRule::Repeat { n }
            }
            _ => {
                let values: Vec<u64> = s
                    .split(',')
                    .map(|x| x.trim().parse::<u64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("cannot read sequence `{s}`")))?;
                if values.is_empty() || values.contains(&0) {
                    return Err(Error::Parse("terms must be positive".into()));
                }
                if values.len() == 1 {
                    SequenceRule::Constant { value: values[0] }
                } else {
                    SequenceRule::Cycle { values }
                }
            }
        };
        Ok(IntSequence::rule(rule))
    }
}

fn primes_upto_count(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out
            .iter()
            .take_while(|&&p| p * p <= c)
            .all(|p| !c.is_multiple_of(*p))
        {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Primes up to `n` by sieve.
pub fn primes_upto(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn factor(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        while x.is_multiple_of(p) {
            out.push(p);
            x /= p;
        }
        p += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// The prime sequence `a'` together with the relabeling `x_k -> x'_{position[k-1]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeExpansion {
    pub primes: Vec<u64>,
    /// `position[k - 1]` is the index in `a'` of the image of `x_k`, for the scanned terms.
    pub position: Vec<usize>,
}

impl PrimeExpansion {
    pub fn sequence(&self) -> IntSequence {
        IntSequence::explicit(self.primes.clone())
    }

    /// Checks `x_k = a_k x_{k+1}` maps to a relation of `G_a'` on the scanned range.
    pub fn relabeling_respects_relations(&self, a: &IntSequence) -> bool {
        self.position.windows(2).enumerate().all(|(i, w)| {
            let product: u64 = self.primes[w[0] - 1..w[1] - 1].iter().product();
            a.term(i + 1) == Some(product)
        })
    }
}

/// First `upto` terms of the prime sequence. Scans at most `upto * 64 + 1024` terms of `a`,
/// so sequences with finitely many terms above 1 end early.
pub fn prime_expand(a: &IntSequence, upto: usize) -> PrimeExpansion {
    let mut primes = Vec::new();
    let mut position = Vec::new();
    let limit = upto * 64 + 1024;
    let mut k = 1;
    while primes.len() < upto && k <= limit {
        let Some(t) = a.term(k) else { break };
        position.push(primes.len() + 1);
        primes.extend(factor(t));
        k += 1;
    }
    position.push(primes.len() + 1);
    primes.truncate(upto);
    position.retain(|&p| p <= primes.len() + 1);
    PrimeExpansion { primes, position }
}

/// `coeff * x_level` in `G_a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaElement {
    pub coeff: BigInt,
    pub level: usize,
}

impl GaElement {
    pub fn new(coeff: impl Into<BigInt>, level: usize) -> Self {
        assert!(level >= 1, "levels start at 1");
        GaElement {
            coeff: coeff.into(),
            level,
        }
    }

    pub fn zero() -> Self {
        GaElement::new(0, 1)
    }

    pub fn generator(level: usize) -> Self {
        GaElement::new(1, level)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Coefficient at level `l >= self.level`.
    pub fn coeff_at(&self, l: usize, a: &IntSequence) -> Option<BigInt> {
        assert!(l >= self.level);
        a.range_product(self.level, l).map(|p| p * &self.coeff)
    }

    /// Lowest level representative.
    pub fn canonical(&self, a: &IntSequence) -> Self {
        if self.is_zero() {
            return GaElement::zero();
        }
        let mut out = self.clone();
        while out.level > 1 {
            let t = BigInt::from(
                a.term(out.level - 1)
                    .expect("terms below a defined level exist"),
            );
            let (q, r) = out.coeff.div_rem(&t);
            if !r.is_zero() {
                break;
            }
            out = GaElement {
                coeff: q,
                level: out.level - 1,
            };
        }
        out
    }
}

impl fmt::Display for GaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x_{}", self.coeff, self.level)
    }
}

/// Equality through a common level (the group is torsion-free).
pub fn ga_equal(u: &GaElement, v: &GaElement, a: &IntSequence) -> bool {
    let l = u.level.max(v.level);
    match (u.coeff_at(l, a), v.coeff_at(l, a)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

pub fn ga_add(u: &GaElement, v: &GaElement, a: &IntSequence) -> GaElement {
    let l = u.level.max(v.level);
    let x = u.coeff_at(l, a).expect("defined level");
    let y = v.coeff_at(l, a).expect("defined level");
    GaElement {
        coeff: x + y,
        level: l,
    }
    .canonical(a)
}

pub fn ga_neg(u: &GaElement) -> GaElement {
    GaElement {
        coeff: -&u.coeff,
        level: u.level,
    }
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "verdict")]
pub enum Probe {
    Holds { level: usize },
    Inconclusive { depth: usize },
}

impl Probe {
    pub fn holds(&self) -> bool {
        matches!(self, Probe::Holds { .. })
    }
}

/// Whether `n` divides `u`: some level `l <= depth` with `n | coeff * prod_{j=level}^{l-1} a_j`.
pub fn divisible(u: &GaElement, n: u64, a: &IntSequence, depth: usize) -> Probe {
    let n = BigInt::from(n);
    let mut c = u.coeff.clone();
    for l in u.level..=depth.max(u.level) {
        if c.is_multiple_of(&n) {
            return Probe::Holds { level: l };
        }
        match a.term(l) {
            Some(t) => c *= t,
            None => break,
        }
    }
    Probe::Inconclusive { depth }
}

/// Primes `p <= bound` that occur at least `min_count` times among the first `depth` terms of `a'`.
pub fn density_probe(
    a: &IntSequence,
    bound: u64,
    depth: usize,
    min_count: usize,
) -> Vec<(u64, bool)> {
    let expansion = prime_expand(a, depth);
    primes_upto(bound)
        .into_iter()
        .map(|p| {
            (
                p,
                expansion.primes.iter().filter(|&&q| q == p).count() >= min_count,
            )
        })
        .collect()
}

/// The isomorphism `h(x_k) = c_k y_{m(k)}` between two prime sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoH {
    pub a: IntSequence,
    pub b: IntSequence,
    /// `m[k - 1] = m(k)`.
    pub m: Vec<usize>,
    pub c: Vec<BigInt>,
    pub relations_respected: bool,
    /// For each `k`, an element of `G_a` mapped onto `y_{m(k)}`.
    pub preimages: Vec<GaElement>,
    pub surjective_on_targets: bool,
}

impl IsoH {
    pub fn apply(&self, u: &GaElement) -> GaElement {
        let k = u.level;
        GaElement {
            coeff: &u.coeff * &self.c[k - 1],
            level: self.m[k - 1],
        }
    }

    pub fn defined_upto(&self) -> usize {
        self.m.len()
    }
}

impl IsoH {
    /// Defines `m` and `c` up to level `upto`.
    fn extend(&mut self, upto: usize, depth: usize) -> Result<()> {
        while self.m.len() < upto {
            let k = self.m.len() + 1;
            let need = self
                .a
                .range_product(1, k)
                .ok_or_else(|| undefined("a", k))?;
            let start = *self.m.last().expect("m(1) is set");
            let mut prod = self
                .b
                .range_product(1, start)
                .ok_or_else(|| undefined("b", start))?;
            let mut nu = start;
            while !prod.is_multiple_of(&need) {
                if nu > depth {
                    return Err(Error::DensityUnverified(format!(
                        "no m({k}) within {depth} terms of b"
                    )));
                }
                prod *= self.b.term(nu).ok_or_else(|| undefined("b", nu))?;
                nu += 1;
            }
            self.m.push(nu);
            self.c.push(prod / need);
        }
        Ok(())
    }
}

fn undefined(name: &str, k: usize) -> Error {
    Error::DensityUnverified(format!("sequence {name} is not defined at index {k}"))
}

/// Builds `h` and verifies the relations for `k <= K` and surjectivity onto each `y_{m(k)}`,
/// searching at most `depth` terms for divisibility witnesses.
pub fn iso_h(a: &IntSequence, b: &IntSequence, horizon: usize, depth: usize) -> Result<IsoH> {
    for (name, s) in [("a", a), ("b", b)] {
        if let Some(k) = (1..=horizon).find(|&k| s.term(k).is_none_or(|t| factor(t).len() != 1)) {
            return Err(Error::BadParams(format!("{name}_{k} is not a prime")));
        }
    }
    let mut h = IsoH {
        a: a.clone(),
        b: b.clone(),
        m: vec![1],
        c: vec![BigInt::one()],
        relations_respected: false,
        preimages: Vec::new(),
        surjective_on_targets: false,
    };
    h.extend(horizon + 1, depth)?;
    h.relations_respected = (1..=horizon).all(|k| {
        let lhs = h.apply(&GaElement::new(a.term(k).expect("checked"), k + 1));
        ga_equal(&lhs, &h.apply(&GaElement::generator(k)), b)
    });
    let mut all_hit = true;
    for k in 1..=horizon {
        let ck = h.c[k - 1].clone();
        let mut prod = BigInt::one();
        let mut found = None;
        for l in k..k + depth {
            prod *= a.term(l).ok_or_else(|| undefined("a", l))?;
            if prod.is_multiple_of(&ck) {
                found = Some(GaElement::new(&prod / &ck, l + 1));
                break;
            }
        }
        let pre = found.ok_or_else(|| {
            Error::DensityUnverified(format!(
                "c_{k} = {ck} divides no product of {depth} terms of a"
            ))
        })?;
        h.extend(pre.level, depth)?;
        all_hit &= ga_equal(&h.apply(&pre), &GaElement::generator(h.m[k - 1]), b);
        h.preimages.push(pre);
    }
    h.surjective_on_targets = all_hit;
    Ok(h)
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, j| acc * j)
}

/// `phi(p/q) = p (q-1)! x_q` in `G_(k+1)`.
pub fn phi_q(p: i64, q: u64) -> GaElement {
    assert!(q >= 1, "denominator must be positive");
    GaElement::new(BigInt::from(p) * factorial(q - 1), q as usize)
}

/// `v_p(n!)` by Legendre's formula.
pub fn legendre(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut pk = p;
    while pk <= n {
        total += n / pk;
        match pk.checked_mul(p) {
            Some(next) => pk = next,
            None => break,
        }
    }
    total
}

/// `phi(1/q!) = x_q`, i.e. `(N-1)! = N!/q!` for `N = q!`, compared prime by prime.
pub fn phi_hits_generator(q: u64) -> bool {
    let n = (1..=q).product::<u64>();
    primes_upto(n)
        .into_iter()
        .all(|p| legendre(n - 1, p) == legendre(n, p) - legendre(q, p))
}

/// The same identity with full integers, for small `q`.
pub fn phi_hits_generator_direct(q: u64) -> bool {
    let a = IntSequence::successor();
    let n = (1..=q).product::<u64>();
    ga_equal(&phi_q(1, n), &GaElement::generator(q as usize), &a)
}

/// Report of the checks on `phi` over `{p/q : |p| <= max_p, 1 <= q <= max_q}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhiReport {
    pub well_defined: bool,
    pub additive: bool,
    pub injective: bool,
    pub hits_generators: bool,
    pub grid_size: usize,
}

impl PhiReport {
    pub fn all_pass(&self) -> bool {
        self.well_defined && self.additive && self.injective && self.hits_generators
    }
}

pub fn phi_report(max_p: i64, max_q: u64, generator_bound: u64) -> PhiReport {
    let a = IntSequence::successor();
    let grid: Vec<(i64, u64)> = (-max_p..=max_p)
        .flat_map(|p| (1..=max_q).map(move |q| (p, q)))
        .collect();
    let well_defined = grid
        .iter()
        .all(|&(p, q)| (2..=4).all(|r| ga_equal(&phi_q(p, q), &phi_q(p * r as i64, q * r), &a)));
    let additive = grid.iter().step_by(13).all(|&(p, q)| {
        grid.iter().step_by(17).all(|&(p2, q2)| {
            let sum = phi_q(p * q2 as i64 + p2 * q as i64, q * q2);
            ga_equal(&ga_add(&phi_q(p, q), &phi_q(p2, q2), &a), &sum, &a)
        })
    });
    let reduced: HashSet<(i64, u64)> = grid
        .iter()
        .map(|&(p, q)| {
            let g = (p.unsigned_abs()).gcd(&q);
            (p / g as i64, q / g)
        })
        .collect();
    let images: HashSet<GaElement> = grid
        .iter()
        .map(|&(p, q)| phi_q(p, q).canonical(&a))
        .collect();
    let injective = images.len() == reduced.len();
    let hits_generators = (1..=generator_bound).all(phi_hits_generator);
    PhiReport {
        well_defined,
        additive,
        injective,
        hits_generators,
        grid_size: grid.len(),
    }
}

/// Summary of the rationals criterion for `G_a`: torsion-free and rank one hold for every
/// `G_a` with infinitely many terms; divisibility is probed prime by prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RationalsCriterion {
    pub torsion_free: bool,
    pub rank: usize,
    pub divisible_by: Vec<(u64, bool)>,
    /// True when the sequence has finitely many terms above 1, so `G_a` is infinite cyclic.
    pub cyclic: bool,
}

impl RationalsCriterion {
    pub fn holds(&self) -> bool {
        self.torsion_free
            && self.rank == 1
            && !self.cyclic
            && self.divisible_by.iter().all(|(_, d)| *d)
    }
}

/// Checks `x_1` (and hence every element) for divisibility by each prime `<= prime_bound`.
pub fn rationals_criterion(a: &IntSequence, prime_bound: u64, depth: usize) -> RationalsCriterion {
    let divisible_by: Vec<(u64, bool)> = primes_upto(prime_bound)
        .into_iter()
        .map(|p| (p, divisible(&GaElement::generator(1), p, a, depth).holds()))
        .collect();
    let expansion = prime_expand(a, 1);
    RationalsCriterion {
        torsion_free: true,
        rank: 1,
        divisible_by,
        cyclic: expansion.primes.is_empty(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansions() {
        let e = prime_expand(&IntSequence::explicit(vec![4, 1, 6]), 10);
        assert_eq!(e.primes, vec![2, 2, 2, 3]);
        assert!(e.relabeling_respects_relations(&IntSequence::explicit(vec![4, 1, 6])));
        assert!(prime_expand(&"ones".parse().unwrap(), 5).primes.is_empty());
        let s = prime_expand(&IntSequence::successor(), 7);
        assert_eq!(s.primes, vec![2, 3, 2, 2, 5, 2, 3]);
        assert!(s.relabeling_respects_relations(&IntSequence::successor()));
    }

    #[test]
    fn relations() {
        let a = IntSequence::successor();
        assert!(ga_equal(
            &GaElement::generator(1),
            &GaElement::new(2, 2),
            &a
        ));
        assert!(ga_equal(
            &ga_add(&GaElement::generator(2), &GaElement::generator(2), &a),
            &GaElement::generator(1),
            &a
        ));
        let u = GaElement::new(7, 4);
        assert!(ga_add(&u, &ga_neg(&u), &a).is_zero());
        assert_eq!(GaElement::new(6, 3).canonical(&a), GaElement::generator(1));
    }

    #[test]
    fn embedding_of_rationals() {
        let a = IntSequence::successor();
        assert_eq!(phi_q(1, 1), GaElement::generator(1));
        assert_eq!(phi_q(1, 2), GaElement::generator(2));
        let sum = ga_add(&phi_q(1, 3), &phi_q(1, 6), &a);
        assert!(ga_equal(&sum, &phi_q(1, 2), &a));
        for q in 1..=6 {
            assert!(phi_hits_generator(q));
            assert!(phi_hits_generator_direct(q));
        }
    }

    #[test]
    fn divisibility_probe() {
        let a = IntSequence::successor();
        assert_eq!(
            divisible(&GaElement::generator(1), 2, &a, 10),
            Probe::Holds { level: 2 }
        );
        assert_eq!(
            divisible(&GaElement::generator(1), 97, &a, 200),
            Probe::Holds { level: 97 }
        );
        assert!(!divisible(&GaElement::generator(1), 97, &a, 50).holds());
        assert!(divisible(&GaElement::zero(), 1_000_003, &a, 1).holds());
        let twos: IntSequence = "2".parse().unwrap();
        assert!(!divisible(&GaElement::generator(1), 3, &twos, 500).holds());
    }

    #[test]
    fn isomorphism_between_alternations() {
        let a: IntSequence = "2,3".parse().unwrap();
        let b: IntSequence = "3,2".parse().unwrap();
        let h = iso_h(&a, &b, 20, 100).unwrap();
        assert!(h.relations_respected && h.surjective_on_targets);
        let id = iso_h(&a, &a, 10, 50).unwrap();
        assert_eq!(id.m, (1..=11).collect::<Vec<_>>());
        assert!(id.c.iter().all(One::is_one));
    }
}
