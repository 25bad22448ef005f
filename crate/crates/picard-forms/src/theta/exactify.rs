//! Rational reconstruction of high-precision values into `Q(r)`.

use crate::bigfloat::{Cplx, Ctx, Real};
use crate::cyclotomic::Cyc;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Euclid, Signed, Zero};

/// Reconstruct a real number as a rational with denominator at most `bound`.
///
/// Walks the continued fraction of the exact dyadic value of `x`; the
/// accepted convergent must approximate `x` to within `2^tol_log2`.
pub fn reconstruct_rational(x: &Real, bound: &BigInt, tol_log2: i64) -> Result<BigRational> {
    let exact = x.to_exact_rational();
    let mut p_prev = BigInt::from(1);
    let mut q_prev = BigInt::from(0);
    let mut p = exact.numer().div_euclid(exact.denom());
    let mut q = BigInt::from(1);
    let mut rem = &exact - BigRational::from_integer(p.clone());
    loop {
        let cand = BigRational::new(p.clone(), q.clone());
        let err = (&exact - &cand).abs();
        if err.is_zero() || log2_rat(&err) <= tol_log2 {
            return Ok(cand);
        }
        if rem.is_zero() {
            break;
        }
        // next continued-fraction step
        let inv = rem.recip();
        let a = inv.numer().div_euclid(inv.denom());
        rem = &inv - BigRational::from_integer(a.clone());
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        if &q_next > bound {
            break;
        }
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
    Err(Error::ReconstructionFailed(format!(
        "no rational with denominator <= {bound} within 2^{tol_log2}"
    )))
}

fn log2_rat(x: &BigRational) -> i64 {
    if x.is_zero() {
        return i64::MIN;
    }
    (x.numer().abs().bits() as i64) - (x.denom().abs().bits() as i64) + 1
}

/// Reconstruct a complex value as an exact element `a + b*r` of `Q(r)`.
///
/// `orientation_conj` selects which primitive third root of unity the
/// embedding sends `r` to.  The result is re-verified by embedding it back
/// at doubled precision and comparing against the input.
pub fn exactify(
    z: &Cplx,
    ctx: &Ctx,
    orientation_conj: bool,
    bound: &BigInt,
    tol_log2: i64,
) -> Result<Cyc> {
    // z = a + b * rho, rho = (-1 + s*i*sqrt(3))/2  =>  b = 2*Im(z)/(s*sqrt3), a = Re(z) + b/2
    let sqrt3 = ctx.sqrt3();
    let two = ctx.from_i64(2);
    let mut b_num = z.im.mul(&two, ctx).div(&sqrt3, ctx);
    if orientation_conj {
        b_num = b_num.neg();
    }
    let a_num = z.re.add(&b_num.div(&two, ctx), ctx);
    let a = reconstruct_rational(&a_num, bound, tol_log2)?;
    let b = reconstruct_rational(&b_num, bound, tol_log2)?;
    let cand = Cyc::new(a, b);
    // back-substitution check at doubled precision
    let ctx2 = Ctx::new(ctx.prec * 2);
    let emb = embed(&cand, &ctx2, orientation_conj);
    let z2 = Cplx::new(
        Real(z.re.0.clone()),
        Real(z.im.0.clone()),
    );
    let diff = emb.sub(&z2, &ctx2);
    if diff.log2_mag() > tol_log2 + 2 {
        return Err(Error::ReconstructionFailed(format!(
            "verification residual 2^{} for candidate {cand}",
            diff.log2_mag()
        )));
    }
    Ok(cand)
}

/// Embed an exact `Q(r)` element at the given precision.
pub fn embed(c: &Cyc, ctx: &Ctx, orientation_conj: bool) -> Cplx {
    let sqrt3 = ctx.sqrt3();
    let two = ctx.from_i64(2);
    let half_sqrt3 = sqrt3.div(&two, ctx);
    let a = ctx.from_rational(&c.a);
    let b = ctx.from_rational(&c.b);
    // rho = -1/2 + s * i*sqrt(3)/2
    let re = a.sub(&b.div(&two, ctx), ctx);
    let mut im = b.mul(&half_sqrt3, ctx);
    if orientation_conj {
        im = im.neg();
    }
    Cplx::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::ratio;

    #[test]
    fn reconstructs_simple_rationals() {
        let ctx = Ctx::new(256);
        let x = ctx.from_rational(&ratio(-211, 729));
        let got = reconstruct_rational(&x, &BigInt::from(1_000_000), -100).unwrap();
        assert_eq!(got, ratio(-211, 729));
        // 18 with tiny error
        let y = ctx.from_i64(18).add(&ctx.from_f64(1e-60), &ctx);
        let got = reconstruct_rational(&y, &BigInt::from(1000), -100).unwrap();
        assert_eq!(got, ratio(18, 1));
    }

    #[test]
    fn rejects_out_of_tolerance() {
        let ctx = Ctx::new(128);
        let x = ctx.from_f64(0.3333); // not 1/3 to high precision
        assert!(reconstruct_rational(&x, &BigInt::from(100), -60).is_err());
    }

    #[test]
    fn exactify_unit() {
        let ctx = Ctx::new(256);
        // 1 + rho = -rho^2 has embedding (1/2, sqrt3/2)
        let z = embed(&Cyc::from_pair(1, 1), &ctx, false);
        let c = exactify(&z, &ctx, false, &BigInt::from(1000), -100).unwrap();
        assert_eq!(c, Cyc::from_pair(1, 1));
        // conjugate orientation
        let z = embed(&Cyc::from_pair(0, 1), &ctx, true);
        let c = exactify(&z, &ctx, true, &BigInt::from(1000), -100).unwrap();
        assert_eq!(c, Cyc::from_pair(0, 1));
    }
}
