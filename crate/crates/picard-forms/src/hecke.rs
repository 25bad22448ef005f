//! Hecke operators acting on Fourier-Jacobi expansions.
//!
//! For a split prime `p = 1 (mod 3)` with `v vbar = p`, `v = 1 (mod 3)`,
//! the operator `T_v` acts on the last component of a weight-`(j,k)` form by
//!
//! ```text
//!   g_n = v p^(k-2) [ p^j m_v(f_{n/p}) + p^(1-k) t_vbar(f_{np})
//!                     + v^(j-k) t_v(m_vbar(f_n)) ]
//! ```
//!
//! and for an inert prime `p = 2 (mod 3)` the operator `T_{-p}` acts by
//!
//! ```text
//!   g_n = (-p)^(k+j-3) (p 1_Z(n/p) - 1) f_n - p^(2j+2k-3) m_{-p}(f_{n/p^2})
//!         - t_{-p}(f_{np^2}) / p .
//! ```
//!
//! The scalar action is the `j = 0` case of the same formulas.  Truncation
//! accounting is explicit: certifying coefficient `n` of the output requires
//! the input through `n p` (resp. `n p^2`), so `valid_to` divides by `p`
//! (resp. `p^2`) on application.

use crate::cyclotomic::{ratio, Cyc};
use crate::eisenstein::{canonical_prime, is_rational_prime, Eis};
use crate::error::{Error, Result};
use crate::fj::{FjSeries, VectorForm};
use crate::linalg::Mat;
use crate::theta::operators::OperatorTable;
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeOp {
    /// `T_v` for `v = 1 (mod 3)` of split prime norm.
    Nu(Eis),
    /// `T_{-p}` for an inert rational prime `p = 2 (mod 3)`.
    MinusP(i64),
}

impl HeckeOp {
    pub fn nu(v: Eis) -> Result<HeckeOp> {
        let p = v.norm();
        if !is_rational_prime(p) || p.rem_euclid(3) != 1 {
            return Err(Error::OutOfStatedRange(format!(
                "N({v}) = {p} is not a split prime"
            )));
        }
        if !v.is_one_mod_three() {
            return Err(Error::OutOfStatedRange(format!("{v} is not 1 mod 3")));
        }
        Ok(HeckeOp::Nu(v))
    }

    pub fn minus_p(p: i64) -> Result<HeckeOp> {
        if !is_rational_prime(p) || p.rem_euclid(3) != 2 {
            return Err(Error::OutOfStatedRange(format!(
                "{p} is not an inert prime"
            )));
        }
        Ok(HeckeOp::MinusP(p))
    }

    pub fn rational_prime(&self) -> i64 {
        match self {
            HeckeOp::Nu(v) => v.norm(),
            HeckeOp::MinusP(p) => *p,
        }
    }

    pub fn label(&self) -> String {
        match self {
            HeckeOp::Nu(v) => format!("T({v})"),
            HeckeOp::MinusP(p) => format!("T(-{p})"),
        }
    }
}

fn rational_power(base: i64, e: i64) -> Cyc {
    let b = BigRational::from_integer(base.into());
    let mut acc = BigRational::from_integer(1.into());
    for _ in 0..e.unsigned_abs() {
        acc *= &b;
    }
    if e < 0 {
        acc = acc.recip();
    }
    Cyc::new(acc, BigRational::from_integer(0.into()))
}

/// Apply the operator to the last component of a weight-`(j,k)` form.
pub fn apply_last(
    op: &HeckeOp,
    j: usize,
    k: i64,
    f: &FjSeries,
    table: &OperatorTable,
) -> Result<FjSeries> {
    match op {
        HeckeOp::Nu(v) => {
            let p = v.norm();
            let vbar = canonical_prime(&v.conj());
            let out_valid = f.valid_to() / p as usize;
            let lead = v.to_cyc() * rational_power(p, k - 2);
            let c_mid = rational_power(p, 1 - k);
            let c_last = v.cyc_pow(j as i64 - k);
            let pj = rational_power(p, j as i64);
            let mut coeffs = Vec::with_capacity(out_valid + 1);
            for n in 0..=out_valid {
                let mut acc = crate::sections::Section::zero(n);
                // p^j m_v(f_{n/p})
                if n % p as usize == 0 {
                    let part = table.apply_m(v, f.coeff(n / p as usize))?;
                    acc = acc.add(&part.scale(&pj));
                }
                // p^{1-k} t_vbar(f_{np})
                let part = table.apply_t(&vbar, n, f.coeff(n * p as usize))?;
                acc = acc.add(&part.scale(&c_mid));
                // v^{j-k} t_v(m_vbar(f_n))
                let part = table.apply_t(v, n, &table.apply_m(&vbar, f.coeff(n))?)?;
                acc = acc.add(&part.scale(&c_last));
                coeffs.push(acc.scale(&lead));
            }
            Ok(FjSeries::new(coeffs))
        }
        HeckeOp::MinusP(p) => {
            let p = *p;
            let mp = Eis::new(-p, 0);
            let p2 = (p * p) as usize;
            let out_valid = f.valid_to() / p2;
            let c_diag = rational_power(-p, k + j as i64 - 3);
            let c_m = rational_power(p, 2 * (j as i64) + 2 * k - 3);
            let c_t = Cyc::new(ratio(1, p), ratio(0, 1));
            let mut coeffs = Vec::with_capacity(out_valid + 1);
            for n in 0..=out_valid {
                let ind = if n % p as usize == 0 { p - 1 } else { -1 };
                let mut acc = f.coeff(n).scale(&(c_diag.clone() * Cyc::from_int(ind)));
                if n % p2 == 0 {
                    let part = table.apply_m(&mp, f.coeff(n / p2))?;
                    acc = acc.sub(&part.scale(&c_m));
                }
                let part = table.apply_t(&mp, n, f.coeff(n * p2))?;
                acc = acc.sub(&part.scale(&c_t));
                coeffs.push(acc);
            }
            Ok(FjSeries::new(coeffs))
        }
    }
}

/// Scalar forms are the `j = 0` case.
pub fn apply_scalar(op: &HeckeOp, k: i64, f: &FjSeries, table: &OperatorTable) -> Result<FjSeries> {
    apply_last(op, 0, k, f, table)
}

#[derive(Clone, Debug)]
pub struct EigenReport {
    pub form: String,
    pub operator: String,
    pub p: i64,
    pub eigenvalue: Cyc,
    pub coefficients_checked: Vec<usize>,
}

impl EigenReport {
    pub fn delimited(&self) -> String {
        let ns: Vec<String> = self.coefficients_checked.iter().map(|n| n.to_string()).collect();
        format!(
            "{}|{}|{}|{}|{}",
            self.form,
            self.operator,
            self.p,
            self.eigenvalue,
            ns.join(",")
        )
    }
}

/// Solve the eigenvalue from the first nonzero certified coefficient and
/// verify it on every other certified coefficient.
pub fn eigenvalue(
    form: &VectorForm,
    op: &HeckeOp,
    table: &OperatorTable,
) -> Result<EigenReport> {
    let g = apply_last(op, form.j, form.k, &form.last, table)?;
    let mut lambda: Option<Cyc> = None;
    let mut checked = Vec::new();
    for n in 0..=g.valid_to() {
        let fn_ = form.last.coeff(n);
        let gn = g.coeff(n);
        if fn_.is_zero() {
            if !gn.is_zero() {
                return Err(Error::NotAnEigenform(format!(
                    "{}: image has support outside the form at order {n}",
                    form.name
                )));
            }
            continue;
        }
        let (m, c) = fn_.coeffs.iter().next().unwrap();
        let lam = gn
            .coeffs
            .get(m)
            .cloned()
            .unwrap_or_else(Cyc::zero)
            .div(c)
            .unwrap();
        if *gn != fn_.scale(&lam) {
            return Err(Error::NotAnEigenform(format!(
                "{}: inconsistent ratio at order {n}",
                form.name
            )));
        }
        match &lambda {
            None => lambda = Some(lam),
            Some(l0) => {
                if *l0 != lam {
                    return Err(Error::NotAnEigenform(format!(
                        "{}: eigenvalue changes between coefficients",
                        form.name
                    )));
                }
            }
        }
        checked.push(n);
    }
    let eigenvalue = lambda.ok_or(Error::AllCoefficientsZero)?;
    Ok(EigenReport {
        form: form.name.clone(),
        operator: op.label(),
        p: op.rational_prime(),
        eigenvalue,
        coefficients_checked: checked,
    })
}

/// Closed-form Eisenstein eigenvalues for weight `(j,k)`.
pub fn eisenstein_eigenvalue(j: usize, k: i64, op: &HeckeOp) -> Cyc {
    match op {
        HeckeOp::Nu(v) => {
            // (p^(k-2) + 1) v^(j+1) + vbar^(j+k-1)
            let p = v.norm();
            let a = (rational_power(p, k - 2) + Cyc::one()) * v.cyc_pow(j as i64 + 1);
            let b = v.conj().cyc_pow(j as i64 + k - 1);
            a + b
        }
        HeckeOp::MinusP(p) => {
            // (-1)^(j+1) (p^(2k+j-3) + p^(j+1) + (-1)^k (p-1) p^(k+j-3))
            let s1 = rational_power(*p, 2 * k + j as i64 - 3);
            let s2 = rational_power(*p, j as i64 + 1);
            let mut s3 = rational_power(*p, k + j as i64 - 3).scale(&ratio(p - 1, 1));
            if k % 2 != 0 {
                s3 = -s3;
            }
            let mut total = s1 + s2 + s3;
            if (j + 1) % 2 != 0 {
                total = -total;
            }
            total
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum LiftKind {
    /// Eigenvalue shape `a_p v^(a+1) + vbar^(a+b+2)`.
    Theta,
    /// Eigenvalue shape `a_p + v^(a+1) vbar^(b+1)`.
    BaseChange,
}

/// Closed-form eigenvalues of lifted forms at `T_v`.
pub fn lift_eigenvalue(kind: LiftKind, a_p: &Cyc, a: i64, b: i64, v: &Eis) -> Cyc {
    match kind {
        LiftKind::Theta => a_p * &v.cyc_pow(a + 1) + v.conj().cyc_pow(a + b + 2),
        LiftKind::BaseChange => {
            a_p.clone() + v.cyc_pow(a + 1) * v.conj().cyc_pow(b + 1)
        }
    }
}

/// q-expansion of the weight-6 eta product on level 3:
/// `q prod (1-q^n)^6 (1-q^{3n})^6`, through `q^order`.
pub fn eta_product_weight6(order: usize) -> Vec<i64> {
    // dense polynomial arithmetic in q up to the requested order
    let mut coeffs = vec![0i64; order + 1];
    if order >= 1 {
        coeffs[1] = 1;
    }
    let multiply_factor = |step: usize, coeffs: &mut Vec<i64>| {
        // multiply by (1 - q^step)
        for n in (step..=order).rev() {
            let (lo, hi) = coeffs.split_at_mut(n);
            hi[0] -= lo[n - step];
        }
    };
    for n in 1..=order {
        for _ in 0..6 {
            multiply_factor(n, &mut coeffs);
            if 3 * n <= order {
                multiply_factor(3 * n, &mut coeffs);
            }
        }
    }
    coeffs
}

/// Matrix of the operator on a linearly independent span of forms sharing
/// `(j, k, ell)`: column `i` holds the coordinates of `T(f_i)` over the span.
pub fn hecke_matrix(
    forms: &[&VectorForm],
    op: &HeckeOp,
    table: &OperatorTable,
) -> Result<Mat> {
    if forms.is_empty() {
        return Err(Error::NotInvariant("empty span".into()));
    }
    let (j, k, ell) = (forms[0].j, forms[0].k, forms[0].ell);
    if forms.iter().any(|f| f.j != j || f.k != k || f.ell != ell) {
        return Err(Error::NotInvariant("span mixes weights or characters".into()));
    }
    let images: Vec<FjSeries> = forms
        .iter()
        .map(|f| apply_last(op, j, k, &f.last, table))
        .collect::<Result<_>>()?;
    let v = images.iter().map(FjSeries::valid_to).min().unwrap();
    let coords = |s: &FjSeries| -> Vec<Cyc> {
        let mut out = Vec::new();
        for n in 0..=v {
            out.extend(s.coeff(n).coordinates());
        }
        out
    };
    let basis_mat = Mat::from_rows(transpose(
        forms.iter().map(|f| coords(&f.last)).collect::<Vec<_>>(),
    ));
    if basis_mat.rank() != forms.len() {
        return Err(Error::TruncationAmbiguous(format!(
            "span of {} forms has deficient rank at truncation {v}",
            forms.len()
        )));
    }
    let mut out = Mat::zero(forms.len(), forms.len());
    for (i, img) in images.iter().enumerate() {
        let x = basis_mat
            .solve(&coords(img))
            .ok_or_else(|| Error::NotInvariant(format!("image of form {i} leaves the span")))?;
        for (s, val) in x.into_iter().enumerate() {
            out.set(s, i, val);
        }
    }
    Ok(out)
}

fn transpose(rows: Vec<Vec<Cyc>>) -> Vec<Vec<Cyc>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut out = vec![Vec::with_capacity(rows.len()); ncols];
    for row in rows {
        for (c, v) in row.into_iter().enumerate() {
            out[c].push(v);
        }
    }
    out
}

/// Dimension of the `lambda`-eigenspace of `m` (0 when not an eigenvalue).
pub fn eigenspace_dim(m: &Mat, lambda: &Cyc) -> usize {
    let shifted = m.sub(&Mat::identity(m.rows).scale(lambda));
    m.rows - shifted.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::split_prime;

    #[test]
    fn eisenstein_closed_forms() {
        // weight (0,3): (p+1) v + vbar^2 and -1-p^3
        let v = split_prime(7).unwrap();
        let lam = eisenstein_eigenvalue(0, 3, &HeckeOp::Nu(v));
        assert_eq!(lam, Cyc::from_pair(3, 27));
        let lam = eisenstein_eigenvalue(0, 3, &HeckeOp::minus_p(2).unwrap());
        assert_eq!(lam, Cyc::from_int(-9));
        // weight (3,3) at p = 2 evaluates to 72
        let lam = eisenstein_eigenvalue(3, 3, &HeckeOp::minus_p(2).unwrap());
        assert_eq!(lam, Cyc::from_int(72));
        // weight (1,1) eigenvalues are not integral
        let lam = eisenstein_eigenvalue(1, 1, &HeckeOp::Nu(v));
        assert!(!lam.is_integral());
    }

    #[test]
    fn eta_product_expansion() {
        let e = eta_product_weight6(20);
        // q - 6q^2 + 9q^3 + 4q^4 + 6q^5 - 54q^6 - 40q^7 + 168q^8 + 81q^9 ...
        assert_eq!(&e[1..=9], &[1, -6, 9, 4, 6, -54, -40, 168, 81]);
    }

    #[test]
    fn operator_constructors_validate() {
        assert!(HeckeOp::nu(split_prime(7).unwrap()).is_ok());
        assert!(HeckeOp::nu(Eis::new(2, 1)).is_err()); // norm 3
        assert!(HeckeOp::minus_p(2).is_ok());
        assert!(HeckeOp::minus_p(7).is_err());
    }
}
