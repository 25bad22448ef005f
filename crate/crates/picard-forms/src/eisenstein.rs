//! Exact arithmetic in the ring of Eisenstein integers `Z[r]`,
//! the maximal order of `Q(sqrt(-3))`.
//!
//! Elements are `a + b*r` with integer `a`, `b`; the norm is
//! `a^2 - a*b + b^2`.  Primes come in three kinds: the ramified prime
//! `1 + 2r` (the square root of -3) above 3, split primes above the
//! rational primes `p = 1 mod 3`, and the inert rational primes
//! `p = 2 mod 3`.

use crate::cyclotomic::Cyc;
use crate::error::{Error, Result};
use num_rational::BigRational;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An Eisenstein integer `a + b*r`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Eis {
    pub a: i64,
    pub b: i64,
}

impl Eis {
    pub const fn new(a: i64, b: i64) -> Self {
        Eis { a, b }
    }

    pub const ZERO: Eis = Eis::new(0, 0);
    pub const ONE: Eis = Eis::new(1, 0);
    /// `r` itself.
    pub const RHO: Eis = Eis::new(0, 1);
    /// The ramified prime `sqrt(-3) = 1 + 2r`.
    pub const SQRT_M3: Eis = Eis::new(1, 2);

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `N(a + b*r) = a^2 - a*b + b^2 >= 0`.
    pub fn norm(&self) -> i64 {
        let (a, b) = (self.a as i128, self.b as i128);
        i64::try_from(a * a - a * b + b * b).expect("norm overflow")
    }

    /// `Tr(a + b*r) = 2a - b`.
    pub fn trace(&self) -> i64 {
        2 * self.a - self.b
    }

    /// Conjugation `r -> r^2`: `a + b*r -> (a - b) - b*r`.
    pub fn conj(&self) -> Self {
        Eis::new(self.a - self.b, -self.b)
    }

    /// The six units `1, -r^2, r, -1, r^2, -r` in powers of the generator `-r^2`.
    pub fn units() -> [Eis; 6] {
        [
            Eis::new(1, 0),   // 1
            Eis::new(1, 1),   // -r^2 = 1 + r
            Eis::new(0, 1),   // r
            Eis::new(-1, 0),  // -1
            Eis::new(-1, -1), // r^2
            Eis::new(0, -1),  // -r
        ]
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// Congruence `x = 1 (mod 3 Z[r])`, i.e. `a = 1 (mod 3)` and `b = 0 (mod 3)`.
    pub fn is_one_mod_three(&self) -> bool {
        (self.a - 1).rem_euclid(3) == 0 && self.b.rem_euclid(3) == 0
    }

    pub fn to_cyc(&self) -> Cyc {
        Cyc::from_pair(self.a, self.b)
    }

    pub fn cyc_pow(&self, e: i64) -> Cyc {
        self.to_cyc().pow(e).expect("nonzero base")
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn exact_div(&self, other: &Eis) -> Option<Eis> {
        if other.is_zero() {
            return None;
        }
        let n = other.norm() as i128;
        let c = other.conj();
        // self * conj(other) has both coordinates divisible by N(other) iff other | self
        let (sa, sb) = (self.a as i128, self.b as i128);
        let (ca, cb) = (c.a as i128, c.b as i128);
        let pa = sa * ca - sb * cb;
        let pb = sa * cb + sb * ca - sb * cb;
        if pa % n == 0 && pb % n == 0 {
            Some(Eis::new(
                i64::try_from(pa / n).ok()?,
                i64::try_from(pb / n).ok()?,
            ))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &Eis) -> bool {
        other.exact_div(self).is_some()
    }

    /// Nearest-integer reduction `z mod m`, deterministic on ties.
    pub fn rem_nearest(&self, m: &Eis) -> Eis {
        let n = m.norm() as i128;
        let c = m.conj();
        let (sa, sb) = (self.a as i128, self.b as i128);
        let (ca, cb) = (c.a as i128, c.b as i128);
        // exact coordinates of self/m over Q
        let qa = sa * ca - sb * cb;
        let qb = sa * cb + sb * ca - sb * cb;
        let round = |x: i128| -> i64 {
            // round x/n to the nearest integer, halves toward +infinity
            i64::try_from((2 * x + n).div_euclid(2 * n)).expect("round overflow")
        };
        let q = Eis::new(round(qa), round(qb));
        *self - (*m * q)
    }

    /// Representatives of `Z[r] / m`, exactly `N(m)` of them.
    pub fn residues_mod(m: &Eis) -> Result<Vec<Eis>> {
        if m.is_zero() {
            return Err(Error::CosetEnumeration("zero modulus".into()));
        }
        let n = m.norm();
        let bound = 2 * (n as f64).sqrt() as i64 + 2;
        let mut reps = Vec::new();
        for a in -bound..=bound {
            for b in -bound..=bound {
                let red = Eis::new(a, b).rem_nearest(m);
                if !reps.contains(&red) {
                    reps.push(red);
                }
            }
        }
        reps.sort();
        if reps.len() != n as usize {
            return Err(Error::CosetEnumeration(format!(
                "found {} residues mod {}, expected {}",
                reps.len(),
                m,
                n
            )));
        }
        Ok(reps)
    }
}

impl Add for Eis {
    type Output = Eis;
    fn add(self, rhs: Eis) -> Eis {
        Eis::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Eis {
    type Output = Eis;
    fn sub(self, rhs: Eis) -> Eis {
        Eis::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul for Eis {
    type Output = Eis;
    fn mul(self, rhs: Eis) -> Eis {
        let (a, b) = (self.a as i128, self.b as i128);
        let (c, d) = (rhs.a as i128, rhs.b as i128);
        let pa = a * c - b * d;
        let pb = a * d + b * c - b * d;
        Eis::new(
            i64::try_from(pa).expect("mul overflow"),
            i64::try_from(pb).expect("mul overflow"),
        )
    }
}

impl Neg for Eis {
    type Output = Eis;
    fn neg(self) -> Eis {
        Eis::new(-self.a, -self.b)
    }
}

impl fmt::Display for Eis {
    /// Same `a+b*r` convention as [`Cyc`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cyc())
    }
}

/// All Eisenstein integers of norm `n`, without duplicates.
pub fn enumerate_norm(n: i64) -> Vec<Eis> {
    if n < 0 {
        return Vec::new();
    }
    if n == 0 {
        return vec![Eis::ZERO];
    }
    let bound = (2.0 * (n as f64 / 3.0).sqrt()).ceil() as i64 + 1;
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            let e = Eis::new(a, b);
            if e.norm() == n {
                out.push(e);
            }
        }
    }
    out.sort();
    out
}

/// The split prime `v = 1 (mod 3)` of norm `p`, for a rational prime `p = 1 (mod 3)`.
///
/// Deterministic: among all candidates the one minimizing `(|a|+|b|, a, b)`.
pub fn split_prime(p: i64) -> Result<Eis> {
    if p.rem_euclid(3) != 1 || !is_rational_prime(p) {
        return Err(Error::NotSplit(p));
    }
    let mut best: Option<Eis> = None;
    for e in enumerate_norm(p) {
        if e.is_one_mod_three() {
            let better = match best {
                None => true,
                Some(ref cur) => {
                    let key = |x: &Eis| (x.a.abs() + x.b.abs(), x.a, x.b);
                    key(&e) < key(cur)
                }
            };
            if better {
                best = Some(e);
            }
        }
    }
    best.ok_or(Error::NotSplit(p))
}

pub fn is_rational_prime(p: i64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Canonical associate of a prime element:
/// `1 + 2r` for the ramified prime, the rational prime itself for inert primes,
/// and the unique associate `= 1 (mod 3)` for split primes.
pub fn canonical_prime(pi: &Eis) -> Eis {
    let n = pi.norm();
    if n == 3 {
        return Eis::SQRT_M3;
    }
    for u in Eis::units() {
        let cand = *pi * u;
        if n % 3 == 1 {
            if cand.is_one_mod_three() {
                return cand;
            }
        } else {
            // inert: norm p^2, the canonical form is the positive rational integer
            if cand.b == 0 && cand.a > 0 {
                return cand;
            }
        }
    }
    panic!("no canonical associate for {pi}");
}

/// Factor a nonzero Eisenstein integer as `unit * prod(pi_i^{e_i})`
/// with canonical primes in a deterministic order.
pub fn factor(alpha: &Eis) -> Result<(Eis, Vec<(Eis, u32)>)> {
    if alpha.is_zero() {
        return Err(Error::CosetEnumeration("cannot factor zero".into()));
    }
    let mut rest = *alpha;
    let mut primes: Vec<(Eis, u32)> = Vec::new();
    let mut n = rest.norm();
    let mut q = 2i64;
    while q * q <= n {
        while n % q == 0 {
            let pi = rational_prime_factors(q)?;
            let mut consumed = false;
            for cand in pi {
                while cand.divides(&rest) {
                    rest = rest.exact_div(&cand).unwrap();
                    push_prime(&mut primes, cand);
                    consumed = true;
                }
            }
            if !consumed {
                return Err(Error::CosetEnumeration(format!(
                    "factorization stalled at prime {q} for {alpha}"
                )));
            }
            n = rest.norm();
        }
        q += 1;
    }
    if n > 1 {
        for cand in rational_prime_factors(n)? {
            while cand.divides(&rest) {
                rest = rest.exact_div(&cand).unwrap();
                push_prime(&mut primes, cand);
            }
        }
    }
    if !rest.is_unit() {
        return Err(Error::CosetEnumeration(format!(
            "leftover non-unit {rest} factoring {alpha}"
        )));
    }
    Ok((rest, primes))
}

fn push_prime(primes: &mut Vec<(Eis, u32)>, pi: Eis) {
    for (p, e) in primes.iter_mut() {
        if *p == pi {
            *e += 1;
            return;
        }
    }
    primes.push((pi, 1));
}

/// Canonical primes of `Z[r]` above the rational prime `q`.
fn rational_prime_factors(q: i64) -> Result<Vec<Eis>> {
    if q == 3 {
        Ok(vec![Eis::SQRT_M3])
    } else if q.rem_euclid(3) == 1 {
        let v = split_prime(q)?;
        Ok(vec![v, canonical_prime(&v.conj())])
    } else {
        Ok(vec![Eis::new(q, 0)])
    }
}

/// Norm as an exact rational (handy when mixing with `Cyc` arithmetic).
pub fn norm_rat(alpha: &Eis) -> BigRational {
    BigRational::from_integer(alpha.norm().into())
}
