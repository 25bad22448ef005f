//! Thin high-precision real/complex layer over `astro-float`.
//!
//! Everything the theta engine needs: field operations, `exp`, `sin`, `cos`,
//! `pi`, square roots, exact conversion of a float to a dyadic rational (for
//! rational reconstruction), and Newton square/cube roots for complex values.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as ISign};
use num_rational::BigRational;
use num_traits::Zero;
use std::cell::RefCell;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Working-precision context.
#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub prec: usize,
}

impl Ctx {
    pub fn new(prec: usize) -> Self {
        Ctx { prec }
    }

    pub fn pi(&self) -> Real {
        let p = self.prec;
        Real(CONSTS.with(|c| c.borrow_mut().pi(p, RM)))
    }

    pub fn sqrt3(&self) -> Real {
        self.from_i64(3).sqrt(self)
    }

    pub fn from_i64(&self, n: i64) -> Real {
        Real(BigFloat::from_i64(n, self.prec))
    }

    pub fn from_f64(&self, x: f64) -> Real {
        Real(BigFloat::from_f64(x, self.prec))
    }

    /// Round an exact rational into the working precision.
    pub fn from_rational(&self, q: &BigRational) -> Real {
        let num = self.from_bigint(q.numer());
        let den = self.from_bigint(q.denom());
        num.div(&den, self)
    }

    pub fn from_bigint(&self, n: &BigInt) -> Real {
        let (sign, digits) = n.to_u64_digits();
        let mut acc = BigFloat::from_i64(0, self.prec);
        let shift = BigFloat::from_i64(1i64 << 32, self.prec);
        let shift64 = shift.mul(&shift, self.prec, RM);
        for d in digits.iter().rev() {
            acc = acc.mul(&shift64, self.prec, RM);
            acc = acc.add(&BigFloat::from_u64(*d, self.prec), self.prec, RM);
        }
        if sign == ISign::Minus {
            acc = acc.neg();
        }
        Real(acc)
    }
}

/// A high-precision real number.
#[derive(Clone, Debug)]
pub struct Real(pub BigFloat);

impl Real {
    pub fn add(&self, rhs: &Real, ctx: &Ctx) -> Real {
        Real(self.0.add(&rhs.0, ctx.prec, RM))
    }
    pub fn sub(&self, rhs: &Real, ctx: &Ctx) -> Real {
        Real(self.0.sub(&rhs.0, ctx.prec, RM))
    }
    pub fn mul(&self, rhs: &Real, ctx: &Ctx) -> Real {
        Real(self.0.mul(&rhs.0, ctx.prec, RM))
    }
    pub fn div(&self, rhs: &Real, ctx: &Ctx) -> Real {
        Real(self.0.div(&rhs.0, ctx.prec, RM))
    }
    pub fn neg(&self) -> Real {
        Real(self.0.neg())
    }
    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }
    pub fn sqrt(&self, ctx: &Ctx) -> Real {
        Real(self.0.sqrt(ctx.prec, RM))
    }
    pub fn exp(&self, ctx: &Ctx) -> Real {
        let p = ctx.prec;
        Real(CONSTS.with(|c| self.0.exp(p, RM, &mut c.borrow_mut())))
    }
    pub fn sin(&self, ctx: &Ctx) -> Real {
        let p = ctx.prec;
        Real(CONSTS.with(|c| self.0.sin(p, RM, &mut c.borrow_mut())))
    }
    pub fn cos(&self, ctx: &Ctx) -> Real {
        let p = ctx.prec;
        Real(CONSTS.with(|c| self.0.cos(p, RM, &mut c.borrow_mut())))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Binary magnitude: the exponent `e` with `|x|` in `[2^(e-1), 2^e)`;
    /// `i64::MIN` for zero.
    pub fn log2_mag(&self) -> i64 {
        if self.0.is_zero() {
            return i64::MIN;
        }
        self.0.exponent().map(|e| e as i64).unwrap_or(i64::MIN)
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let (words, _n, sign, e, _inexact) = self.0.as_raw_parts().expect("finite");
        let top = *words.last().unwrap() as f64; // top word carries the leading bits
        let mut mag = top / 2f64.powi(64); // in [0.5, 1)
        mag *= 2f64.powi(e);
        if sign == Sign::Neg {
            mag = -mag;
        }
        mag
    }

    /// Exact dyadic value of the stored float.
    pub fn to_exact_rational(&self) -> BigRational {
        if self.0.is_zero() {
            return BigRational::zero();
        }
        let (words, n, sign, e, _inexact) = self.0.as_raw_parts().expect("finite");
        let mut m = BigInt::zero();
        for d in words.iter().rev() {
            m = (m << 64) + BigInt::from(*d);
        }
        let total_bits = (words.len() * 64) as i64;
        // value = m * 2^(e - total_bits)
        let _ = n;
        let shift = e as i64 - total_bits;
        let mut q = BigRational::from_integer(m);
        if shift >= 0 {
            q *= BigRational::from_integer(BigInt::from(1) << (shift as usize));
        } else {
            q /= BigRational::from_integer(BigInt::from(1) << ((-shift) as usize));
        }
        if sign == Sign::Neg {
            q = -q;
        }
        q
    }

    pub fn cmp_abs(&self, rhs: &Real) -> std::cmp::Ordering {
        let a = self.0.abs();
        let b = rhs.0.abs();
        match a.cmp(&b) {
            Some(s) if s < 0 => std::cmp::Ordering::Less,
            Some(s) if s > 0 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    }
}

/// A high-precision complex number.
#[derive(Clone, Debug)]
pub struct Cplx {
    pub re: Real,
    pub im: Real,
}

impl Cplx {
    pub fn new(re: Real, im: Real) -> Self {
        Cplx { re, im }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        Cplx::new(ctx.from_i64(0), ctx.from_i64(0))
    }

    pub fn one(ctx: &Ctx) -> Self {
        Cplx::new(ctx.from_i64(1), ctx.from_i64(0))
    }

    pub fn from_real(re: Real, ctx: &Ctx) -> Self {
        Cplx::new(re, ctx.from_i64(0))
    }

    pub fn from_f64s(re: f64, im: f64, ctx: &Ctx) -> Self {
        Cplx::new(ctx.from_f64(re), ctx.from_f64(im))
    }

    pub fn add(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        Cplx::new(self.re.add(&rhs.re, ctx), self.im.add(&rhs.im, ctx))
    }

    pub fn sub(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        Cplx::new(self.re.sub(&rhs.re, ctx), self.im.sub(&rhs.im, ctx))
    }

    pub fn mul(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        let ac = self.re.mul(&rhs.re, ctx);
        let bd = self.im.mul(&rhs.im, ctx);
        let ad = self.re.mul(&rhs.im, ctx);
        let bc = self.im.mul(&rhs.re, ctx);
        Cplx::new(ac.sub(&bd, ctx), ad.add(&bc, ctx))
    }

    pub fn mul_real(&self, rhs: &Real, ctx: &Ctx) -> Cplx {
        Cplx::new(self.re.mul(rhs, ctx), self.im.mul(rhs, ctx))
    }

    pub fn neg(&self) -> Cplx {
        Cplx::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Cplx {
        Cplx::new(self.re.clone(), self.im.neg())
    }

    pub fn abs2(&self, ctx: &Ctx) -> Real {
        self.re.mul(&self.re, ctx).add(&self.im.mul(&self.im, ctx), ctx)
    }

    pub fn inv(&self, ctx: &Ctx) -> Cplx {
        let n = self.abs2(ctx);
        Cplx::new(self.re.div(&n, ctx), self.im.neg().div(&n, ctx))
    }

    pub fn div(&self, rhs: &Cplx, ctx: &Ctx) -> Cplx {
        self.mul(&rhs.inv(ctx), ctx)
    }

    /// `exp(x + iy) = e^x (cos y + i sin y)`.
    pub fn exp(&self, ctx: &Ctx) -> Cplx {
        let r = self.re.exp(ctx);
        Cplx::new(r.mul(&self.im.cos(ctx), ctx), r.mul(&self.im.sin(ctx), ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Binary magnitude of `max(|re|, |im|)`.
    pub fn log2_mag(&self) -> i64 {
        self.re.log2_mag().max(self.im.log2_mag())
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Newton square root, seeded from `f64`; deterministic branch:
    /// the root with `re > 0`, or `im >= 0` when `re` is (numerically) zero.
    pub fn sqrt(&self, ctx: &Ctx) -> Cplx {
        let (re, im) = self.to_f64s();
        let seed = num_complex_sqrt(re, im);
        let mut x = Cplx::from_f64s(seed.0, seed.1, ctx);
        if x.is_zero() {
            return Cplx::zero(ctx);
        }
        let half = ctx.from_rational(&BigRational::new(1.into(), 2.into()));
        for _ in 0..precision_iters(ctx.prec) {
            // x = (x + z/x) / 2
            let zx = self.div(&x, ctx);
            x = x.add(&zx, ctx).mul_real(&half, ctx);
        }
        // canonical branch
        let flip = x.re.is_negative()
            || (x.re.log2_mag() < x.im.log2_mag() - (ctx.prec as i64) / 2 && x.im.is_negative());
        if flip {
            x.neg()
        } else {
            x
        }
    }

    /// Newton cube root, principal branch from the `f64` seed.
    pub fn cbrt(&self, ctx: &Ctx) -> Cplx {
        let (re, im) = self.to_f64s();
        let r = (re * re + im * im).sqrt().cbrt();
        let t = im.atan2(re) / 3.0;
        let mut x = Cplx::from_f64s(r * t.cos(), r * t.sin(), ctx);
        if x.is_zero() {
            return Cplx::zero(ctx);
        }
        let third = ctx.from_rational(&BigRational::new(1.into(), 3.into()));
        let two = ctx.from_i64(2);
        for _ in 0..precision_iters(ctx.prec) {
            // x = (2x + z/x^2) / 3
            let x2 = x.mul(&x, ctx);
            let t = self.div(&x2, ctx);
            x = x.mul_real(&two, ctx).add(&t, ctx).mul_real(&third, ctx);
        }
        x
    }
}

fn num_complex_sqrt(re: f64, im: f64) -> (f64, f64) {
    let r = (re * re + im * im).sqrt();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let a = ((r + re) / 2.0).sqrt();
    let b = ((r - re) / 2.0).sqrt();
    (a, if im >= 0.0 { b } else { -b })
}

fn precision_iters(prec: usize) -> usize {
    // Newton doubles correct digits per step; the f64 seed has ~50 bits
    let mut have = 48usize;
    let mut it = 0;
    while have < prec + 8 {
        have *= 2;
        it += 1;
    }
    it + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::ratio;

    #[test]
    fn basic_real_ops() {
        let ctx = Ctx::new(192);
        let two = ctx.from_i64(2);
        let s = two.sqrt(&ctx);
        let err = s.mul(&s, &ctx).sub(&two, &ctx).abs();
        assert!(err.log2_mag() < -180, "sqrt error {}", err.log2_mag());
        let q = ctx.from_rational(&ratio(-22, 7));
        assert!((q.to_f64() + 22.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn exp_and_pi() {
        let ctx = Ctx::new(192);
        let pi = ctx.pi();
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-12);
        // e^{i pi} = -1
        let z = Cplx::new(ctx.from_i64(0), pi).exp(&ctx);
        let err = z
            .sub(&Cplx::from_f64s(-1.0, 0.0, &ctx), &ctx)
            .abs2(&ctx);
        assert!(err.log2_mag() < -300, "e^(i pi) error {}", err.log2_mag());
    }

    #[test]
    fn exact_rational_round_trip() {
        let ctx = Ctx::new(128);
        // dyadic rationals convert exactly
        let x = ctx.from_rational(&ratio(123, 64));
        assert_eq!(x.to_exact_rational(), ratio(123, 64));
        let y = ctx.from_i64(-77);
        assert_eq!(y.to_exact_rational(), ratio(-77, 1));
    }

    #[test]
    fn complex_roots() {
        let ctx = Ctx::new(192);
        let z = Cplx::from_f64s(-5.0, 12.0, &ctx);
        let s = z.sqrt(&ctx);
        let err = s.mul(&s, &ctx).sub(&z, &ctx).abs2(&ctx);
        assert!(err.log2_mag() < -300);
        assert!(!s.re.is_negative());
        let c = z.cbrt(&ctx);
        let err = c.mul(&c, &ctx).mul(&c, &ctx).sub(&z, &ctx).abs2(&ctx);
        assert!(err.log2_mag() < -300);
    }

    #[test]
    fn bigint_conversion() {
        let ctx = Ctx::new(256);
        let n = BigInt::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        let x = ctx.from_bigint(&n);
        let back = x.to_exact_rational();
        assert_eq!(back, BigRational::from_integer(n));
    }
}
