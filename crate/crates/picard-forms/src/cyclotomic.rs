//! The coefficient field `Q(r)`, `r` a primitive third root of unity.
//!
//! Every element is written `a + b*r` with rational `a`, `b` and
//! `r^2 + r + 1 = 0`.  The square root of -3 is the exact element `1 + 2r`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// An element `a + b*r` of `Q(r)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cyc {
    pub a: BigRational,
    pub b: BigRational,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Cyc {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Cyc { a, b }
    }

    pub fn zero() -> Self {
        Cyc::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Cyc::new(BigRational::one(), BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Cyc::new(rat(n), BigRational::zero())
    }

    pub fn from_pair(a: i64, b: i64) -> Self {
        Cyc::new(rat(a), rat(b))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Cyc::new(ratio(n, d), BigRational::zero())
    }

    /// The generator `r` itself.
    pub fn rho() -> Self {
        Cyc::from_pair(0, 1)
    }

    /// `r^2 = -1 - r`.
    pub fn rho2() -> Self {
        Cyc::from_pair(-1, -1)
    }

    /// The exact square root of -3, namely `1 + 2r`.
    pub fn sqrt_m3() -> Self {
        Cyc::from_pair(1, 2)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Complex conjugation, `r -> r^2`: `a + b*r -> (a - b) - b*r`.
    pub fn conj(&self) -> Self {
        Cyc::new(&self.a - &self.b, -self.b.clone())
    }

    /// Field norm `a^2 - a*b + b^2` (always a nonnegative rational).
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(Cyc::new(c.a / &n, c.b / &n))
    }

    pub fn div(&self, other: &Cyc) -> Option<Self> {
        other.inv().map(|i| self * &i)
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let (mut base, mut e) = if e < 0 {
            (self.inv()?, (-e) as u64)
        } else {
            (self.clone(), e as u64)
        };
        let mut acc = Cyc::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Some(acc)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Cyc::new(&self.a * c, &self.b * c)
    }

    /// True when both coordinates are integers, i.e. the value lies in `Z[r]`.
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Denominator primes other than 3 (used to report unexpected denominators).
    pub fn denominator_has_prime_other_than_3(&self) -> bool {
        for d in [self.a.denom(), self.b.denom()] {
            let mut d = d.abs();
            let three = BigInt::from(3);
            while (&d % &three).is_zero() {
                d /= &three;
            }
            if !d.is_one() {
                return true;
            }
        }
        false
    }
}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc::new(-self.a.clone(), -self.b.clone())
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc::new(-self.a, -self.b)
    }
}

impl Add for &Cyc {
    type Output = Cyc;
    fn add(self, rhs: &Cyc) -> Cyc {
        Cyc::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &Cyc {
    type Output = Cyc;
    fn sub(self, rhs: &Cyc) -> Cyc {
        Cyc::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul for &Cyc {
    type Output = Cyc;
    // (a + b r)(c + d r) = ac - bd + (ad + bc - bd) r, using r^2 = -1 - r.
    fn mul(self, rhs: &Cyc) -> Cyc {
        let ac = &self.a * &rhs.a;
        let bd = &self.b * &rhs.b;
        let ad = &self.a * &rhs.b;
        let bc = &self.b * &rhs.a;
        Cyc::new(ac - &bd, ad + bc - bd)
    }
}

impl AddAssign<&Cyc> for Cyc {
    fn add_assign(&mut self, rhs: &Cyc) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&Cyc> for Cyc {
    fn sub_assign(&mut self, rhs: &Cyc) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl MulAssign<&Cyc> for Cyc {
    fn mul_assign(&mut self, rhs: &Cyc) {
        *self = &*self * rhs;
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Cyc {
            type Output = Cyc;
            fn $m(self, rhs: Cyc) -> Cyc {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Cyc> for Cyc {
            type Output = Cyc;
            fn $m(self, rhs: &Cyc) -> Cyc {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn fmt_rat(x: &BigRational) -> String {
    if x.is_integer() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for Cyc {
    /// Canonical textual form `a+b*r`, e.g. `759+261*r`, `-4137+1683*r`, `3`, `-1/3*r`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rat(&self.a));
        }
        let bpart = if self.b.is_negative() {
            format!("-{}*r", fmt_rat(&-self.b.clone()))
        } else {
            format!("+{}*r", fmt_rat(&self.b))
        };
        if self.a.is_zero() {
            // drop the leading '+' of a pure r-multiple
            write!(f, "{}", bpart.strip_prefix('+').unwrap_or(&bpart))
        } else {
            write!(f, "{}{}", fmt_rat(&self.a), bpart)
        }
    }
}
