//! High-precision complex linear solves for the theta engine.

use crate::bigfloat::{Cplx, Ctx};
use crate::error::{Error, Result};

/// Solve the overdetermined system `A x = b` for several right-hand sides.
///
/// `a` is `K x D` with `K >= D`; each `bs[i]` has length `K`.  Rows are
/// equilibrated by exact powers of two, then eliminated with partial
/// pivoting.  Returns the solutions together with the base-2 magnitude of
/// the worst residual left in the unused rows (a conditioning signal).
pub fn solve_overdetermined(
    ctx: &Ctx,
    a: &[Vec<Cplx>],
    bs: &[Vec<Cplx>],
) -> Result<(Vec<Vec<Cplx>>, i64)> {
    let k = a.len();
    let d = a.first().map(|r| r.len()).unwrap_or(0);
    let r = bs.len();
    if k < d {
        return Err(Error::PrecisionExhausted(format!(
            "underdetermined solve: {k} rows, {d} cols"
        )));
    }
    // augmented working copy, row-equilibrated by powers of two
    let mut m: Vec<Vec<Cplx>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut row: Vec<Cplx> = a[i].clone();
        for b in bs {
            row.push(b[i].clone());
        }
        let mag = row.iter().map(|x| x.log2_mag()).max().unwrap_or(0);
        if mag != i64::MIN && mag != 0 {
            let scale = pow2(ctx, -mag);
            for x in row.iter_mut() {
                *x = x.mul_real(&scale, ctx);
            }
        }
        m.push(row);
    }
    let width = d + r;
    let mut perm: Vec<usize> = (0..k).collect();
    for col in 0..d {
        // partial pivot
        let mut best = col;
        let mut best_mag = i64::MIN;
        for (ri, &p) in perm.iter().enumerate().skip(col) {
            let mag = m[p][col].log2_mag();
            if mag > best_mag {
                best_mag = mag;
                best = ri;
            }
        }
        if best_mag == i64::MIN {
            return Err(Error::PrecisionExhausted(format!(
                "zero pivot at column {col}"
            )));
        }
        perm.swap(col, best);
        let prow = perm[col];
        let pinv = m[prow][col].inv(ctx);
        for w in col..width {
            m[prow][w] = m[prow][w].mul(&pinv, ctx);
        }
        for (ri, &rr) in perm.iter().enumerate() {
            if ri == col {
                continue;
            }
            if m[rr][col].log2_mag() == i64::MIN {
                continue;
            }
            let f = m[rr][col].clone();
            for w in col..width {
                let t = m[prow][w].mul(&f, ctx);
                m[rr][w] = m[rr][w].sub(&t, ctx);
            }
        }
    }
    // residual estimate from the spare rows
    let mut residual = i64::MIN;
    for &rr in perm.iter().skip(d) {
        for w in d..width {
            residual = residual.max(m[rr][w].log2_mag());
        }
    }
    let mut sols = Vec::with_capacity(r);
    for j in 0..r {
        let mut x = Vec::with_capacity(d);
        for i in 0..d {
            x.push(m[perm[i]][d + j].clone());
        }
        sols.push(x);
    }
    Ok((sols, residual))
}

fn pow2(ctx: &Ctx, e: i64) -> crate::bigfloat::Real {
    // exact power of two at working precision
    let mut x = ctx.from_i64(1);
    let two = ctx.from_i64(2);
    let half = ctx.from_i64(1).div(&two, ctx);
    let (mut n, step) = if e >= 0 { (e, two) } else { (-e, half) };
    let mut base = step;
    // fast exponentiation by squaring on the exponent bits
    while n > 0 {
        if n & 1 == 1 {
            x = x.mul(&base, ctx);
        }
        n >>= 1;
        if n > 0 {
            base = base.mul(&base, ctx);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_simple_system() {
        let ctx = Ctx::new(192);
        let c = |x: f64| Cplx::from_f64s(x, 0.0, &ctx);
        // 4x2 system with exact solution (2, -1)
        let a = vec![
            vec![c(1.0), c(1.0)],
            vec![c(1.0), c(-1.0)],
            vec![c(2.0), c(1.0)],
            vec![c(0.0), c(3.0)],
        ];
        let b = vec![vec![c(1.0), c(3.0), c(3.0), c(-3.0)]];
        let (sols, res) = solve_overdetermined(&ctx, &a, &b).unwrap();
        assert!(res < -150, "residual {res}");
        let x = &sols[0];
        assert!((x[0].to_f64s().0 - 2.0).abs() < 1e-30);
        assert!((x[1].to_f64s().0 + 1.0).abs() < 1e-30);
    }
}
