//! Exact tables of the endomorphism operators.
//!
//! `m_alpha` sends a section `s(z)` to `s(alpha z)`, a graded ring map that
//! multiplies degrees by `N(alpha)`; `t_alpha` averages over the cosets of
//! `alpha * lattice` in the other direction, and `t_alpha . m_alpha` is
//! multiplication by `N(alpha)`.  Prime images and `t` matrices are computed
//! numerically from the analytic model and reconstructed exactly; unit images
//! are exact from the start and composite images come from the factorization.

use super::exactify::exactify;
use super::numsolve::solve_overdetermined;
use super::AnalyticModel;
use crate::bigfloat::Cplx;
use crate::cyclotomic::Cyc;
use crate::eisenstein::{enumerate_norm, factor, split_prime, Eis};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::sections::{basis, dim, Section};
use num_bigint::BigInt;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct TableMeta {
    pub precision: usize,
    pub denom_bound: BigInt,
    pub orientation_conj: bool,
}

impl TableMeta {
    pub fn new(precision: usize, denom_bound: BigInt, orientation_conj: bool) -> Self {
        TableMeta {
            precision,
            denom_bound,
            orientation_conj,
        }
    }

    pub fn default_bound() -> BigInt {
        BigInt::from(3).pow(12)
    }
}

/// Exact images and matrices of the endomorphism operators.
pub struct OperatorTable {
    pub meta: TableMeta,
    /// Images `(m_a(X), m_a(Y), m_a(Z))` for canonical primes `a`.
    pub m_prime: BTreeMap<Eis, [Section; 3]>,
    /// Matrices of `t_a` from the degree `n * N(a)` basis to the degree `n` basis.
    pub t_mats: BTreeMap<(Eis, usize), Mat>,
}

impl OperatorTable {
    pub fn empty(meta: TableMeta) -> Self {
        OperatorTable {
            meta,
            m_prime: BTreeMap::new(),
            t_mats: BTreeMap::new(),
        }
    }

    /// Images of the generators under `m_alpha`, for arbitrary nonzero `alpha`.
    ///
    /// Units are exact, primes come from the table, composites compose.
    pub fn m_images(&self, alpha: &Eis) -> Result<[Section; 3]> {
        if alpha.is_zero() {
            return Err(Error::MissingOperatorTable("m_0 is not an operator".into()));
        }
        let (unit, primes) = factor(alpha)?;
        let mut img = [Section::x(), Section::y(), Section::z()];
        for (pi, e) in &primes {
            let pimg = self
                .m_prime
                .get(pi)
                .ok_or_else(|| Error::MissingOperatorTable(format!("m for prime {pi}")))?;
            for _ in 0..*e {
                img = [
                    img[0].substitute(pimg),
                    img[1].substitute(pimg),
                    img[2].substitute(pimg),
                ];
            }
        }
        Ok([
            apply_unit(&img[0], &unit),
            apply_unit(&img[1], &unit),
            apply_unit(&img[2], &unit),
        ])
    }

    /// Apply `m_alpha` to a whole section.
    pub fn apply_m(&self, alpha: &Eis, s: &Section) -> Result<Section> {
        let img = self.m_images(alpha)?;
        Ok(s.substitute(&img))
    }

    pub fn t_matrix(&self, alpha: &Eis, n: usize) -> Result<&Mat> {
        self.t_mats
            .get(&(*alpha, n))
            .ok_or_else(|| Error::MissingOperatorTable(format!("t for ({alpha}, {n})")))
    }

    /// Apply `t_alpha` to a section of degree `n * N(alpha)`.
    pub fn apply_t(&self, alpha: &Eis, n: usize, s: &Section) -> Result<Section> {
        if alpha.is_unit() {
            // single coset: t_a = m_{a^{-1}}, and a^{-1} = conj(a) for units
            return self.apply_m(&alpha.conj(), s);
        }
        if n == 0 {
            // constants: the averaging sum has N(alpha) identical terms
            return Ok(s.scale(&Cyc::from_int(alpha.norm())));
        }
        assert_eq!(s.degree, n * alpha.norm() as usize);
        let mat = self.t_matrix(alpha, n)?;
        let coords = s.coordinates();
        let out = mat.mul_vec(&coords);
        Ok(Section::from_coordinates(n, &out))
    }
}

/// Unit action on a section: `X` picks up `u^a` and `Y, Z` swap on the
/// non-identity coset of `mu_3` in `mu_6`.
pub fn apply_unit(s: &Section, u: &Eis) -> Section {
    if *u == Eis::ONE {
        return s.clone();
    }
    let uc = u.to_cyc();
    let swap = matches!((u.a, u.b), (1, 1) | (-1, 0) | (0, -1));
    let mut out = Section::zero(s.degree);
    for (m, c) in &s.coeffs {
        let tw = uc.pow(m.0 as i64).unwrap();
        let mono = if swap { (m.0, m.2, m.1) } else { *m };
        out.add_term(mono, c * &tw);
    }
    out
}

/// Numerically compute the generator images of `m_alpha` for prime `alpha`
/// and reconstruct them exactly (denominator bound 3^12).
pub fn compute_m(model: &AnalyticModel, alpha: &Eis) -> Result<[Section; 3]> {
    compute_m_bounded(model, alpha, &TableMeta::default_bound())
}

/// As [`compute_m`], with an explicit denominator bound.
pub fn compute_m_bounded(
    model: &AnalyticModel,
    alpha: &Eis,
    bound: &BigInt,
) -> Result<[Section; 3]> {
    let ctx = &model.ctx;
    let d = alpha.norm() as usize;
    let deg_dim = dim(d);
    let k = deg_dim + 8;
    let pts = model.master_points(k);
    let alpha_c = model.embed(alpha);
    let mut rows = Vec::with_capacity(k);
    let mut rhs: [Vec<Cplx>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for p in &pts {
        let v = model.eval_xyz(p);
        rows.push(monomial_row(model, &v, d));
        let va = model.eval_xyz(&alpha_c.mul(p, ctx));
        for i in 0..3 {
            rhs[i].push(va[i].clone());
        }
    }
    let (sols, res) = solve_overdetermined(ctx, &rows, &rhs)?;
    if res > model.residual_tol() {
        return Err(Error::ReconstructionFailed(format!(
            "m_{alpha} solve residual 2^{res}; raise precision"
        )));
    }
    let tol = model.residual_tol();
    let mut out: Vec<Section> = Vec::with_capacity(3);
    for sol in &sols {
        let coeffs: Result<Vec<Cyc>> = sol
            .iter()
            .map(|z| exactify(z, ctx, model.orientation_conj, bound, tol))
            .collect();
        out.push(Section::from_coordinates(d, &coeffs?));
    }
    let images: [Section; 3] = [out[0].clone(), out[1].clone(), out[2].clone()];
    Section::check_relation(&images)?;
    Ok(images)
}

/// Numerically compute the matrix of `t_alpha` on degree `n * N(alpha)`
/// sections and reconstruct it exactly (denominator bound 3^12).
pub fn compute_t(model: &AnalyticModel, alpha: &Eis, n: usize) -> Result<Mat> {
    compute_t_bounded(model, alpha, n, &TableMeta::default_bound())
}

/// As [`compute_t`], with an explicit denominator bound.
pub fn compute_t_bounded(
    model: &AnalyticModel,
    alpha: &Eis,
    n: usize,
    bound: &BigInt,
) -> Result<Mat> {
    let ctx = &model.ctx;
    let na = alpha.norm();
    let deg_in = n * na as usize;
    let out_dim = dim(n);
    let in_dim = dim(deg_in);
    let k = out_dim + 8;
    let pts = model.master_points(k);
    let alpha_c = model.embed(alpha);
    let alpha_inv = Cplx::one(ctx).div(&alpha_c, ctx);
    // cosets sqrt(-3) * (residues of Z[r] mod alpha)
    let reps = Eis::residues_mod(alpha)?;
    if reps.len() != na as usize {
        return Err(Error::CosetEnumeration(format!(
            "quotient size {} != {}",
            reps.len(),
            na
        )));
    }
    let sqrt_m3 = model.embed(&Eis::SQRT_M3);
    let cosets: Vec<Cplx> = reps
        .iter()
        .map(|d| sqrt_m3.mul(&model.embed(d), ctx))
        .collect();
    let n_real = ctx.from_i64(n as i64);
    let in_basis = basis(deg_in);
    // accumulate t(e_mono) at all sample points
    let mut tvals: Vec<Vec<Cplx>> = vec![Vec::with_capacity(k); in_dim];
    let mut vrows = Vec::with_capacity(k);
    for p in &pts {
        let v = model.eval_xyz(p);
        vrows.push(monomial_row(model, &v, n));
        let mut acc: Vec<Cplx> = vec![Cplx::zero(ctx); in_dim];
        for c in &cosets {
            // prefactor exp((2 pi/sqrt3) n (rho |c|^2 - conj(c) z))
            let cc = c.abs2(ctx);
            let arg = model
                .rho_c
                .mul_real(&cc, ctx)
                .sub(&c.conj().mul(p, ctx), ctx)
                .mul_real(&model.qw, ctx)
                .mul_real(&n_real, ctx);
            let pref = arg.exp(ctx);
            let w = alpha_inv.mul(&p.add(c, ctx), ctx);
            let vw = model.eval_xyz(&w);
            let monos = monomial_values(model, &vw, &in_basis);
            for (a, m) in acc.iter_mut().zip(&monos) {
                *a = a.add(&m.mul(&pref, ctx), ctx);
            }
        }
        for (col, a) in acc.into_iter().enumerate() {
            tvals[col].push(a);
        }
    }
    let (sols, res) = solve_overdetermined(ctx, &vrows, &tvals)?;
    if res > model.residual_tol() {
        return Err(Error::ReconstructionFailed(format!(
            "t_{alpha} (degree {n}) solve residual 2^{res}; raise precision"
        )));
    }
    let tol = model.residual_tol();
    let mut mat = Mat::zero(out_dim, in_dim);
    for (col, sol) in sols.iter().enumerate() {
        for (row, z) in sol.iter().enumerate() {
            mat.set(row, col, exactify(z, ctx, model.orientation_conj, bound, tol)?);
        }
    }
    Ok(mat)
}

fn monomial_row(model: &AnalyticModel, v: &[Cplx; 3], degree: usize) -> Vec<Cplx> {
    monomial_values(model, v, &basis(degree))
}

fn monomial_values(model: &AnalyticModel, v: &[Cplx; 3], monos: &[crate::sections::Mono]) -> Vec<Cplx> {
    let ctx = &model.ctx;
    let deg = monos
        .iter()
        .map(|m| m.1.max(m.2) as usize)
        .max()
        .unwrap_or(0);
    let pow_table = |x: &Cplx, e: usize| -> Vec<Cplx> {
        let mut t = Vec::with_capacity(e + 1);
        t.push(Cplx::one(ctx));
        for i in 1..=e {
            let prev = t[i - 1].clone();
            t.push(prev.mul(x, ctx));
        }
        t
    };
    let px = pow_table(&v[0], 2);
    let py = pow_table(&v[1], deg);
    let pz = pow_table(&v[2], deg);
    monos
        .iter()
        .map(|m| {
            px[m.0 as usize]
                .mul(&py[m.1 as usize], ctx)
                .mul(&pz[m.2 as usize], ctx)
        })
        .collect()
}

/// Exact verification `t_a . m_a = N(a) id` on every stored degree for `a`.
pub fn verify_t_m(table: &OperatorTable, alpha: &Eis, n: usize) -> Result<()> {
    let na = alpha.norm();
    let img = table.m_images(alpha)?;
    for mono in basis(n) {
        let e = Section::monomial(mono, Cyc::one());
        let me = e.substitute(&img);
        let te = table.apply_t(alpha, n, &me)?;
        let expect = e.scale(&Cyc::from_int(na));
        if te != expect {
            return Err(Error::ValidationFailed(format!(
                "t_{alpha} m_{alpha} != {na} id on degree {n}"
            )));
        }
    }
    Ok(())
}

/// Canonical primes with norm at most `max_norm` (the ramified prime, split
/// primes in conjugate pairs, inert rational primes).
pub fn required_primes(max_norm: i64) -> Vec<Eis> {
    let mut out = Vec::new();
    for q in 2..=max_norm {
        if !crate::eisenstein::is_rational_prime(q) {
            continue;
        }
        match q.rem_euclid(3) {
            0 => out.push(Eis::SQRT_M3),
            1 => {
                let v = split_prime(q).unwrap();
                out.push(v);
                out.push(crate::eisenstein::canonical_prime(&v.conj()));
            }
            _ => {
                if q * q <= max_norm {
                    out.push(Eis::new(q, 0));
                }
            }
        }
    }
    out
}

/// The `t` matrices needed to apply the Hecke operators at the given primes
/// to series truncated at order `w`.
pub fn required_t_entries(w: usize, hecke_primes: &[i64]) -> Vec<(Eis, usize)> {
    let mut out = Vec::new();
    for &p in hecke_primes {
        match p.rem_euclid(3) {
            1 => {
                let v = split_prime(p).unwrap();
                let vbar = crate::eisenstein::canonical_prime(&v.conj());
                for n in 1..=(w / p as usize) {
                    out.push((v, n));
                    out.push((vbar, n));
                }
            }
            2 => {
                let mp = Eis::new(-p, 0);
                for n in 1..=(w / (p * p) as usize) {
                    out.push((mp, n));
                }
            }
            _ => {}
        }
    }
    out
}

/// Fourier-Jacobi coefficients (as sections) of the theta series with
/// character exponent `nu`: coefficient `n` is
/// `sum over N(xi) = n of rho^(-nu Tr(xi)) m_xi(Y)`.
pub fn theta_series(table: &OperatorTable, nu: u8, w: usize) -> Result<Vec<Section>> {
    series_from_classes(table, w, 1, move |xi| {
        let e = (-(nu as i64) * xi.trace()).rem_euclid(3);
        Cyc::rho().pow(e).unwrap()
    })
}

/// Fourier-Jacobi coefficients of the weight-6 form with character `det`:
/// coefficient `n` is `(1/6) sum over N(xi) = n of xi^5 m_xi(X)`.
pub fn zeta_series(table: &OperatorTable, w: usize) -> Result<Vec<Section>> {
    series_from_classes(table, w, 0, |xi| {
        xi.cyc_pow(5).scale(&crate::cyclotomic::ratio(1, 6))
    })
}

fn series_from_classes(
    table: &OperatorTable,
    w: usize,
    gen: usize,
    weight: impl Fn(&Eis) -> Cyc,
) -> Result<Vec<Section>> {
    let mut out = Vec::with_capacity(w + 1);
    for n in 0..=w {
        let mut coeff = Section::zero(n);
        if n == 0 {
            // xi = 0 evaluates sections at the origin: Y(0) = 1, X(0) = 0
            if gen == 1 {
                coeff.add_term((0, 0, 0), weight(&Eis::ZERO));
            }
            out.push(coeff);
            continue;
        }
        let elts = enumerate_norm(n as i64);
        let mut visited: Vec<Eis> = Vec::new();
        for xi in &elts {
            if visited.contains(xi) {
                continue;
            }
            let (_, primes) = factor(xi)?;
            let mut class_rep = Eis::ONE;
            for (pi, e) in &primes {
                for _ in 0..*e {
                    class_rep = class_rep * *pi;
                }
            }
            let img = table.m_images(&class_rep)?;
            let base = &img[gen];
            for u in Eis::units() {
                let member = class_rep * u;
                visited.push(member);
                let c = weight(&member);
                if c.is_zero() {
                    continue;
                }
                coeff = coeff.add(&apply_unit(base, &u).scale(&c));
            }
        }
        out.push(coeff);
    }
    Ok(out)
}

/// Build the full operator table: `m` images for every canonical prime of
/// norm at most `w`, and `t` matrices for the requested Hecke primes.
/// Retries with doubled precision and denominator bound when
/// reconstruction fails.
pub fn build_table(
    user_prec: usize,
    w: usize,
    hecke_primes: &[i64],
    orientation_conj: bool,
) -> Result<(AnalyticModel, OperatorTable)> {
    build_table_bounded(user_prec, &TableMeta::default_bound(), w, hecke_primes, orientation_conj)
}

/// As [`build_table`], with an explicit starting denominator bound.
pub fn build_table_bounded(
    user_prec: usize,
    denom_bound: &BigInt,
    w: usize,
    hecke_primes: &[i64],
    orientation_conj: bool,
) -> Result<(AnalyticModel, OperatorTable)> {
    let mut prec = user_prec;
    let mut bound = denom_bound.clone();
    let mut last_err = None;
    for _attempt in 0..3 {
        match try_build(prec, &bound, w, hecke_primes, orientation_conj) {
            Ok(v) => return Ok(v),
            Err(e @ (Error::ReconstructionFailed(_) | Error::PrecisionExhausted(_))) => {
                last_err = Some(e);
                prec *= 2;
                bound = &bound * &bound;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn try_build(
    prec: usize,
    bound: &BigInt,
    w: usize,
    hecke_primes: &[i64],
    orientation_conj: bool,
) -> Result<(AnalyticModel, OperatorTable)> {
    let model = super::bootstrap_model(prec, orientation_conj)?;
    let meta = TableMeta::new(prec, bound.clone(), orientation_conj);
    let mut table = OperatorTable::empty(meta);
    let mut prime_set: std::collections::BTreeSet<Eis> =
        required_primes(w as i64).into_iter().collect();
    for &p in hecke_primes {
        match p.rem_euclid(3) {
            1 => {
                let v = split_prime(p)?;
                prime_set.insert(v);
                prime_set.insert(crate::eisenstein::canonical_prime(&v.conj()));
            }
            2 => {
                prime_set.insert(Eis::new(p, 0));
            }
            _ => {}
        }
    }
    for pi in prime_set {
        let img = compute_m_bounded(&model, &pi, bound)?;
        table.m_prime.insert(pi, img);
    }
    for (alpha, n) in required_t_entries(w, hecke_primes) {
        let mat = compute_t_bounded(&model, &alpha, n, bound)?;
        table.t_mats.insert((alpha, n), mat);
        verify_t_m(&table, &alpha, n)?;
    }
    Ok((model, table))
}
