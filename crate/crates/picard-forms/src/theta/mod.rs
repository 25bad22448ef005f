//! High-precision analytic models of the sections `X, Y, Z` and the
//! exactification of the endomorphism operators.
//!
//! The degree-3 line bundle on `E = C / sqrt(-3) Z[r]` is realized through
//! the factor of automorphy
//!
//! ```text
//!   f(u + xi) = exp(2 pi n (conj(xi) u - rho xi conj(xi)) / sqrt(3)) f(u)
//! ```
//!
//! for `xi` in the lattice.  The exponent carries no explicit `i`: the
//! imaginary unit is supplied by the lattice elements themselves (every
//! `xi` is `sqrt(-3)` times an Eisenstein integer), and with that reading
//! the cocycle condition and the degree count out exactly; the
//! periodicity check in [`validate`] confirms the convention numerically.
//!
//! Writing `f = h * g` with `h(u) = exp(-(pi/sqrt3) u^2 + pi sqrt3 u)`
//! makes `g` periodic along `omega_1 = sqrt(-3)`, so `g` has a Fourier
//! expansion `g = sum c_n q^n` with `q = exp(2 pi u / sqrt3)`, and the law
//! along `omega_2 = sqrt(-3) rho` pins the three-term recursion
//!
//! ```text
//!   c_{n+3} = (-1)^n exp(-pi sqrt3 (n+3)) c_n .
//! ```
//!
//! The three free coefficients `c_0, c_1, c_2` give a basis of sections
//! with disjoint Fourier supports; the mu_6 eigenbasis `X, Y+Z, Y-Z` is cut
//! out numerically and scaled so that `Y(0) = 1`, `Z = Y(-r^2 u)` and
//! `X^3 = r (Y^3 - Z^3)` holds on the nose.

pub mod exactify;
pub mod numsolve;
pub mod operators;
pub mod validate;

use crate::bigfloat::{Cplx, Ctx, Real};
use crate::cyclotomic::{ratio, Cyc};
use crate::eisenstein::Eis;
use crate::error::{Error, Result};

/// Guard bits added on top of the requested precision for internal work.
const GUARD_BITS: usize = 128;
/// Extra bits below the running maximum before a Fourier term is dropped.
const TAIL_BITS: i64 = 48;

pub struct AnalyticModel {
    pub user_prec: usize,
    pub ctx: Ctx,
    pub orientation_conj: bool,
    pi: Real,
    sqrt3: Real,
    /// `2 pi / sqrt3`, the basic Fourier frequency.
    qw: Real,
    /// `exp(-pi sqrt3)`.
    e1: Real,
    /// `exp(-3 pi sqrt3)`.
    e3: Real,
    omega1: Cplx,
    omega2: Cplx,
    rho_c: Cplx,
    /// Coefficients of `X, Y, Z` over the three Fourier basis sections.
    lam: [[Cplx; 3]; 3],
}

impl AnalyticModel {
    /// Embedding of `a + b*r` into the complex numbers.
    pub fn embed(&self, e: &Eis) -> Cplx {
        exactify::embed(&e.to_cyc(), &self.ctx, self.orientation_conj)
    }

    pub fn embed_cyc(&self, c: &Cyc) -> Cplx {
        exactify::embed(c, &self.ctx, self.orientation_conj)
    }

    /// Deterministic low-discrepancy points in the fundamental parallelogram.
    pub fn master_points(&self, count: usize) -> Vec<Cplx> {
        let ctx = &self.ctx;
        let a1 = ctx.from_rational(&ratio(7_548_776_662_466_927, 10_000_000_000_000_000));
        let a2 = ctx.from_rational(&ratio(5_698_402_909_980_532, 10_000_000_000_000_000));
        let lo = ctx.from_rational(&ratio(1, 10));
        let span = ctx.from_rational(&ratio(4, 5));
        let mut pts = Vec::with_capacity(count);
        let mut s = ctx.from_rational(&ratio(31, 64));
        let mut t = ctx.from_rational(&ratio(17, 64));
        for _ in 0..count {
            s = frac(&s.add(&a1, ctx), ctx);
            t = frac(&t.add(&a2, ctx), ctx);
            let su = lo.add(&span.mul(&s, ctx), ctx);
            let tu = lo.add(&span.mul(&t, ctx), ctx);
            let p = self
                .omega1
                .mul_real(&su, ctx)
                .add(&self.omega2.mul_real(&tu, ctx), ctx);
            pts.push(p);
        }
        pts
    }

    /// Values of the three Fourier basis sections at `u`.
    pub fn eval_basis(&self, u: &Cplx) -> [Cplx; 3] {
        let ctx = &self.ctx;
        // h(u) = exp(-(pi/sqrt3) u^2 + pi sqrt3 u)
        let pi_over_s3 = self.pi.div(&self.sqrt3, ctx);
        let pi_s3 = self.pi.mul(&self.sqrt3, ctx);
        let u2 = u.mul(u, ctx);
        let harg = u.mul_real(&pi_s3, ctx).sub(&u2.mul_real(&pi_over_s3, ctx), ctx);
        let h = harg.exp(ctx);
        // q = exp((2 pi / sqrt3) u)
        let q = u.mul_real(&self.qw, ctx).exp(ctx);
        let q3 = q.mul(&q, ctx).mul(&q, ctx);
        let q3i = q3.inv(ctx);
        // term-count bounds from the closed-form coefficient magnitudes
        let x = (self.qw.to_f64()) * u.re.to_f64();
        let a2 = std::f64::consts::PI * 3f64.sqrt() / 6.0;
        let drop = (self.ctx.prec as f64 + TAIL_BITS as f64) * std::f64::consts::LN_2;
        let g = |n: f64| -> f64 { -a2 * n * (n + 3.0) + n * x };
        let npeak = (x / a2 - 3.0) / 2.0;
        let gmax = g(npeak).max(g(0.0));
        let mut n_hi = npeak.max(0.0);
        while g(n_hi) > gmax - drop {
            n_hi += 3.0;
        }
        let mut n_lo = npeak.min(0.0);
        while g(n_lo) > gmax - drop {
            n_lo -= 3.0;
        }
        let (n_lo, n_hi) = (n_lo as i64 - 6, n_hi as i64 + 6);

        let mut out = [Cplx::zero(ctx), Cplx::zero(ctx), Cplx::zero(ctx)];
        for r in 0..3usize {
            let mut sum = Cplx::zero(ctx);
            // upward from n = r
            let mut t = q_pow(&q, r as i64, ctx);
            let mut n = r as i64;
            let mut a = real_pow(&self.e1, n + 3, ctx);
            while n <= n_hi {
                sum = sum.add(&t, ctx);
                let mut step = t.mul_real(&a, ctx).mul(&q3, ctx);
                if n.rem_euclid(2) == 1 {
                    step = step.neg();
                }
                t = step;
                a = a.mul(&self.e3, ctx);
                n += 3;
            }
            // downward from n = r - 3
            let mut t = q_pow(&q, r as i64, ctx);
            let mut n = r as i64;
            let mut d = real_pow(&self.e1, -n, ctx);
            while n - 3 >= n_lo {
                let mut step = t.mul_real(&d, ctx).mul(&q3i, ctx);
                if (n + 1).rem_euclid(2) == 1 {
                    step = step.neg();
                }
                t = step;
                d = d.mul(&self.e3, ctx);
                n -= 3;
                sum = sum.add(&t, ctx);
            }
            out[r] = sum.mul(&h, ctx);
        }
        out
    }

    /// Values of the model sections `X, Y, Z` at `u`.
    pub fn eval_xyz(&self, u: &Cplx) -> [Cplx; 3] {
        let b = self.eval_basis(u);
        let ctx = &self.ctx;
        let mut out = [Cplx::zero(ctx), Cplx::zero(ctx), Cplx::zero(ctx)];
        for (i, lam) in self.lam.iter().enumerate() {
            let mut acc = Cplx::zero(ctx);
            for (l, f) in lam.iter().zip(&b) {
                acc = acc.add(&l.mul(f, ctx), ctx);
            }
            out[i] = acc;
        }
        out
    }

    /// The factor of automorphy `e_n(xi, u)` of the n-th bundle power.
    pub fn automorphy(&self, xi: &Cplx, u: &Cplx, n: i64) -> Cplx {
        let ctx = &self.ctx;
        let term = xi
            .conj()
            .mul(u, ctx)
            .sub(&self.rho_c.mul(xi, ctx).mul(&xi.conj(), ctx), ctx);
        term.mul_real(&self.qw, ctx)
            .mul_real(&ctx.from_i64(n), ctx)
            .exp(ctx)
    }

    pub fn lattice_omega1(&self) -> Cplx {
        self.omega1.clone()
    }

    pub fn lattice_omega2(&self) -> Cplx {
        self.omega2.clone()
    }

    pub fn rho_value(&self) -> Cplx {
        self.rho_c.clone()
    }

    /// Tolerance exponent for accepting numeric residuals.
    pub fn residual_tol(&self) -> i64 {
        -((self.user_prec as i64) / 2)
    }
}

fn frac(x: &Real, ctx: &Ctx) -> Real {
    // x - floor(x) for x >= 0 (arguments stay in [0, 2))
    let one = ctx.from_i64(1);
    if x.cmp_abs(&one) != std::cmp::Ordering::Less && !x.is_negative() {
        return x.sub(&one, ctx);
    }
    x.clone()
}

fn q_pow(q: &Cplx, e: i64, ctx: &Ctx) -> Cplx {
    let mut acc = Cplx::one(ctx);
    let base = if e >= 0 { q.clone() } else { q.inv(ctx) };
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(&base, ctx);
    }
    acc
}

fn real_pow(b: &Real, e: i64, ctx: &Ctx) -> Real {
    let mut acc = ctx.from_i64(1);
    let base = if e >= 0 {
        b.clone()
    } else {
        ctx.from_i64(1).div(b, ctx)
    };
    let mut n = e.unsigned_abs();
    let mut pw = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul(&pw, ctx);
        }
        n >>= 1;
        if n > 0 {
            pw = pw.mul(&pw, ctx);
        }
    }
    acc
}

/// Build the analytic model at the requested precision and orientation.
pub fn bootstrap_model(user_prec: usize, orientation_conj: bool) -> Result<AnalyticModel> {
    if user_prec < 128 {
        return Err(Error::OutOfStatedRange(
            "precision_bits must be at least 128".into(),
        ));
    }
    let ctx = Ctx::new(user_prec + GUARD_BITS);
    let pi = ctx.pi();
    let sqrt3 = ctx.sqrt3();
    let two = ctx.from_i64(2);
    let qw = pi.mul(&two, &ctx).div(&sqrt3, &ctx);
    let e1 = pi.mul(&sqrt3, &ctx).neg().exp(&ctx);
    let e3 = e1.mul(&e1, &ctx).mul(&e1, &ctx);
    let sigma = if orientation_conj { -1 } else { 1 };
    // rho = (-1 + sigma i sqrt3)/2, omega1 = sigma i sqrt3, omega2 = omega1 * rho
    let half = ctx.from_i64(1).div(&two, &ctx);
    let rho_c = Cplx::new(
        half.neg(),
        sqrt3.div(&two, &ctx).mul(&ctx.from_i64(sigma), &ctx),
    );
    let omega1 = Cplx::new(ctx.from_i64(0), sqrt3.mul(&ctx.from_i64(sigma), &ctx));
    let omega2 = omega1.mul(&rho_c, &ctx);
    let lam0 = std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { Cplx::one(&ctx) } else { Cplx::zero(&ctx) })
    });
    let mut model = AnalyticModel {
        user_prec,
        ctx,
        orientation_conj,
        pi,
        sqrt3,
        qw,
        e1,
        e3,
        omega1,
        omega2,
        rho_c,
        lam: lam0,
    };
    solve_eigenbasis(&mut model)?;
    self_check(&model)?;
    Ok(model)
}

/// Cut out the mu_6 eigenbasis and fix all scales.
fn solve_eigenbasis(model: &mut AnalyticModel) -> Result<()> {
    let ctx = model.ctx;
    let pts = model.master_points(10);
    // gamma = -rho^2, the generator of the unit action
    let gamma = model.rho_c.mul(&model.rho_c, &ctx).neg();
    // matrix of f_r(gamma u) over f_s(u)
    let mut rows = Vec::new();
    let mut rhs: [Vec<Cplx>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for p in &pts {
        let b = model.eval_basis(p);
        rows.push(b.to_vec());
        let gb = model.eval_basis(&gamma.mul(p, &ctx));
        for r in 0..3 {
            rhs[r].push(gb[r].clone());
        }
    }
    let (cols, res) = numsolve::solve_overdetermined(&ctx, &rows, &rhs)?;
    if res > model.residual_tol() {
        return Err(Error::PrecisionExhausted(format!(
            "unit action solve residual 2^{res}"
        )));
    }
    // a[s][r]: f_r(gamma u) = sum_s a[s][r] f_s(u)
    let a = |s: usize, r: usize| cols[r][s].clone();
    // eigenvectors from adjugate columns of (A - lambda I)
    let eigvec = |lambda: &Cplx| -> Result<[Cplx; 3]> {
        let mut b = [[Cplx::zero(&ctx), Cplx::zero(&ctx), Cplx::zero(&ctx)],
                     [Cplx::zero(&ctx), Cplx::zero(&ctx), Cplx::zero(&ctx)],
                     [Cplx::zero(&ctx), Cplx::zero(&ctx), Cplx::zero(&ctx)]];
        for s in 0..3 {
            for r in 0..3 {
                b[s][r] = a(s, r);
            }
        }
        for i in 0..3 {
            b[i][i] = b[i][i].sub(lambda, &ctx);
        }
        let minor = |r0: usize, c0: usize| -> Cplx {
            let rs: Vec<usize> = (0..3).filter(|&i| i != r0).collect();
            let cs: Vec<usize> = (0..3).filter(|&j| j != c0).collect();
            let m00 = &b[rs[0]][cs[0]];
            let m01 = &b[rs[0]][cs[1]];
            let m10 = &b[rs[1]][cs[0]];
            let m11 = &b[rs[1]][cs[1]];
            m00.mul(m11, &ctx).sub(&m01.mul(m10, &ctx), &ctx)
        };
        let mut best: Option<[Cplx; 3]> = None;
        let mut best_mag = i64::MIN;
        for col in 0..3 {
            // adjugate column = cofactors of row `col`
            let mut v = [Cplx::zero(&ctx), Cplx::zero(&ctx), Cplx::zero(&ctx)];
            for (i, vi) in v.iter_mut().enumerate() {
                let mut c = minor(col, i);
                if (col + i) % 2 == 1 {
                    c = c.neg();
                }
                *vi = c;
            }
            let mag = v.iter().map(|x| x.log2_mag()).max().unwrap();
            if mag > best_mag {
                best_mag = mag;
                best = Some(v);
            }
        }
        let v = best.unwrap();
        if best_mag < -((model.user_prec as i64) / 4) {
            return Err(Error::PrecisionExhausted(
                "degenerate eigenvector solve".into(),
            ));
        }
        Ok(v)
    };
    let one = Cplx::one(&ctx);
    let minus_one = one.neg();
    let minus_rho2 = gamma.clone();
    let v_plus = eigvec(&one)?;
    let v_minus = eigvec(&minus_one)?;
    let v_x = eigvec(&minus_rho2)?;

    let eval_vec = |v: &[Cplx; 3], u: &Cplx| -> Cplx {
        let b = model.eval_basis(u);
        let mut acc = Cplx::zero(&ctx);
        for (c, f) in v.iter().zip(&b) {
            acc = acc.add(&c.mul(f, &ctx), &ctx);
        }
        acc
    };

    // scale P so that P(0) = 2 (hence Y(0) = 1)
    let zero = Cplx::zero(&ctx);
    let p0 = eval_vec(&v_plus, &zero);
    if p0.log2_mag() < -((model.user_prec as i64) / 4) {
        return Err(Error::PrecisionExhausted("P(0) vanished".into()));
    }
    let scale_p = Cplx::from_f64s(2.0, 0.0, &ctx).div(&p0, &ctx);
    let p_vec: [Cplx; 3] = std::array::from_fn(|i| v_plus[i].mul(&scale_p, &ctx));

    // beta and s from the cubic X^3 = rho (3 P^2 M beta + M^3 beta^3)/4 at two points
    let ref_pts = model.master_points(24);
    let mut chosen: Option<(Cplx, Cplx, Cplx, Cplx, Cplx, Cplx)> = None;
    for w in ref_pts.windows(2) {
        let (z1, z2) = (&w[0], &w[1]);
        let fgh = |z: &Cplx| -> (Cplx, Cplx, Cplx) {
            let xv = eval_vec(&v_x, z);
            let pv = eval_vec(&p_vec, z);
            let mv = eval_vec(&v_minus, z);
            let f = xv.mul(&xv, &ctx).mul(&xv, &ctx);
            let g = pv
                .mul(&pv, &ctx)
                .mul(&mv, &ctx)
                .mul_real(&ctx.from_rational(&ratio(3, 4)), &ctx);
            let h = mv
                .mul(&mv, &ctx)
                .mul(&mv, &ctx)
                .mul_real(&ctx.from_rational(&ratio(1, 4)), &ctx);
            (f, g, h)
        };
        let (f1, g1, h1) = fgh(z1);
        let (f2, g2, h2) = fgh(z2);
        let floor = -((model.user_prec as i64) / 4);
        if [&f1, &g1, &h1, &f2, &g2, &h2]
            .iter()
            .all(|v| v.log2_mag() > floor)
        {
            chosen = Some((f1, g1, h1, f2, g2, h2));
            break;
        }
    }
    let Some((f1, g1, h1, f2, g2, h2)) = chosen else {
        return Err(Error::PrecisionExhausted(
            "no well-conditioned reference points".into(),
        ));
    };
    // beta^2 = (F1 G2 - F2 G1)/(F2 H1 - F1 H2)
    let num = f1.mul(&g2, &ctx).sub(&f2.mul(&g1, &ctx), &ctx);
    let den = f2.mul(&h1, &ctx).sub(&f1.mul(&h2, &ctx), &ctx);
    let beta2 = num.div(&den, &ctx);
    let beta = beta2.sqrt(&ctx);
    // s^3 = rho (G1 beta + H1 beta^3) / F1
    let beta3 = beta.mul(&beta2, &ctx);
    let s3 = model
        .rho_c
        .mul(&g1.mul(&beta, &ctx).add(&h1.mul(&beta3, &ctx), &ctx), &ctx)
        .div(&f1, &ctx);
    let s = s3.cbrt(&ctx);

    let half = ctx.from_rational(&ratio(1, 2));
    for i in 0..3 {
        model.lam[0][i] = v_x[i].mul(&s, &ctx);
        let bm = v_minus[i].mul(&beta, &ctx);
        model.lam[1][i] = p_vec[i].add(&bm, &ctx).mul_real(&half, &ctx);
        model.lam[2][i] = p_vec[i].sub(&bm, &ctx).mul_real(&half, &ctx);
    }
    Ok(())
}

/// Numeric self-checks of the bootstrapped model.
fn self_check(model: &AnalyticModel) -> Result<()> {
    let ctx = &model.ctx;
    let tol = model.residual_tol();
    let pts = model.master_points(14);
    let gamma = model.rho_c.mul(&model.rho_c, ctx).neg();
    // Y(0) = 1, X(0) = 0
    let at0 = model.eval_xyz(&Cplx::zero(ctx));
    let y_err = at0[1].sub(&Cplx::one(ctx), ctx);
    if y_err.log2_mag() > tol {
        return Err(Error::ValidationFailed(format!(
            "Y(0) = 1 fails by 2^{}",
            y_err.log2_mag()
        )));
    }
    if at0[0].log2_mag() > tol {
        return Err(Error::ValidationFailed("X(0) = 0 fails".into()));
    }
    for (k, p) in pts.iter().enumerate().take(8) {
        let v = model.eval_xyz(p);
        let scale = v.iter().map(|x| x.log2_mag()).max().unwrap().max(0);
        // cubic relation
        let x3 = v[0].mul(&v[0], ctx).mul(&v[0], ctx);
        let y3 = v[1].mul(&v[1], ctx).mul(&v[1], ctx);
        let z3 = v[2].mul(&v[2], ctx).mul(&v[2], ctx);
        let rhs = model.rho_c.mul(&y3.sub(&z3, ctx), ctx);
        let diff = x3.sub(&rhs, ctx);
        if diff.log2_mag() - scale * 3 > tol {
            return Err(Error::ValidationFailed(format!(
                "cubic relation fails at point {k} by 2^{}",
                diff.log2_mag()
            )));
        }
        // mu_6 equivariance: X(g u) = -rho^2 X(u), Y(g u) = Z(u), Z(g u) = Y(u)
        let vg = model.eval_xyz(&gamma.mul(p, ctx));
        let ex = vg[0].sub(&gamma.mul(&v[0], ctx), ctx);
        let ey = vg[1].sub(&v[2], ctx);
        let ez = vg[2].sub(&v[1], ctx);
        for e in [ex, ey, ez] {
            if e.log2_mag() - scale > tol {
                return Err(Error::ValidationFailed(format!(
                    "unit equivariance fails at point {k} by 2^{}",
                    e.log2_mag()
                )));
            }
        }
        // periodicity law for Y along both lattice generators
        if k < 2 {
            for om in [&model.omega1, &model.omega2] {
                let lhs = model.eval_xyz(&p.add(om, ctx));
                let factor = model.automorphy(om, p, 1);
                for i in 0..3 {
                    let d = lhs[i].sub(&factor.mul(&v[i], ctx), ctx);
                    let sc = lhs[i].log2_mag().max(0);
                    if d.log2_mag() - sc > tol {
                        return Err(Error::ValidationFailed(format!(
                            "periodicity law fails at point {k} by 2^{}",
                            d.log2_mag()
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
