//! Truncated Fourier-Jacobi series with section-valued coefficients.
//!
//! A series holds coefficients `c_0 .. c_v` with `c_n` homogeneous of degree
//! `n`; `v` is the last trustworthy index (`valid_to`), which shrinks under
//! division by a series with positive-order leading term and under the Hecke
//! maps.  The normalized bracket replaces the two analytic gradient
//! directions by the degree operator `N : c_n -> n c_n` and the formal
//! derivation of the section ring; with that convention every coefficient
//! stays in `Q(r)` and the printed expansions are reproduced verbatim.

use crate::cyclotomic::{ratio, Cyc};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::sections::{DiffSection, Section};

/// A truncated series with prime-free section coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FjSeries {
    pub coeffs: Vec<Section>,
}

impl FjSeries {
    /// Wrap coefficients; aborts when the grading is broken.
    pub fn new(coeffs: Vec<Section>) -> Self {
        for (n, c) in coeffs.iter().enumerate() {
            assert_eq!(c.degree, n, "graded compatibility violated at order {n}");
        }
        FjSeries { coeffs }
    }

    pub fn zero(w: usize) -> Self {
        FjSeries::new((0..=w).map(Section::zero).collect())
    }

    pub fn constant(c: Cyc, w: usize) -> Self {
        let mut s = FjSeries::zero(w);
        s.coeffs[0] = Section::constant(c);
        s
    }

    pub fn one(w: usize) -> Self {
        FjSeries::constant(Cyc::one(), w)
    }

    pub fn valid_to(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Section {
        &self.coeffs[n]
    }

    pub fn truncate(&self, w: usize) -> FjSeries {
        let take = w.min(self.valid_to());
        FjSeries {
            coeffs: self.coeffs[..=take].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Section::is_zero)
    }

    pub fn lowest_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &FjSeries) -> FjSeries {
        let v = self.valid_to().min(other.valid_to());
        FjSeries {
            coeffs: (0..=v).map(|n| self.coeffs[n].add(&other.coeffs[n])).collect(),
        }
    }

    pub fn sub(&self, other: &FjSeries) -> FjSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FjSeries {
        FjSeries {
            coeffs: self.coeffs.iter().map(Section::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Cyc) -> FjSeries {
        FjSeries {
            coeffs: self.coeffs.iter().map(|s| s.scale(c)).collect(),
        }
    }

    /// Cauchy product, truncated at the smaller valid order.
    pub fn mul(&self, other: &FjSeries) -> FjSeries {
        let v = self.valid_to().min(other.valid_to());
        let mut out: Vec<Section> = (0..=v).map(Section::zero).collect();
        for (i, a) in self.coeffs.iter().enumerate().take(v + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(v + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        FjSeries { coeffs: out }
    }

    pub fn pow(&self, e: usize) -> FjSeries {
        let mut acc = FjSeries::one(self.valid_to());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The degree operator `N : c_n -> n c_n` (the normalized second
    /// gradient direction).
    pub fn n_operator(&self) -> FjSeries {
        FjSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.scale(&Cyc::from_int(n as i64)))
                .collect(),
        }
    }

    /// Coefficientwise formal derivation (the normalized first gradient
    /// direction).
    pub fn derivation(&self) -> FjDiffSeries {
        FjDiffSeries {
            coeffs: self.coeffs.iter().map(Section::derivation).collect(),
        }
    }

    /// Coefficientwise generator substitution (cusp stabilizer moves).
    pub fn substitute(&self, images: &[Section; 3]) -> FjSeries {
        FjSeries {
            coeffs: self.coeffs.iter().map(|c| c.substitute(images)).collect(),
        }
    }

    /// Exact series division.  `valid_to` shrinks by the order of the leading
    /// coefficient of `g`.
    pub fn divide(&self, g: &FjSeries) -> Result<FjSeries> {
        let n0 = g
            .lowest_nonzero()
            .ok_or_else(|| Error::NotDivisible("division by zero series".into()))?;
        let g0 = &g.coeffs[n0];
        let v = self.valid_to().min(g.valid_to());
        if v < n0 {
            return Err(Error::TruncationTooShallow(
                "divisor order exceeds truncation".into(),
            ));
        }
        // check vanishing below the divisor order
        for n in 0..n0.min(self.coeffs.len()) {
            if !self.coeffs[n].is_zero() {
                return Err(Error::NotDivisible(format!(
                    "numerator has order {n} below divisor order {n0}"
                )));
            }
        }
        let qv = v - n0;
        let mut q: Vec<Section> = Vec::with_capacity(qv + 1);
        for n in 0..=qv {
            let mut rem = self.coeffs[n + n0].clone();
            for (i, qi) in q.iter().enumerate() {
                if qi.is_zero() {
                    continue;
                }
                let gc = &g.coeffs[n + n0 - i];
                if gc.is_zero() {
                    continue;
                }
                rem = rem.sub(&qi.mul(gc));
            }
            q.push(rem.exact_divide(g0)?);
        }
        Ok(FjSeries { coeffs: q })
    }

    /// Restriction to the modular curve: evaluate every coefficient at the
    /// marked point (`X -> 0, Y -> 1, Z -> 1`), giving a q-expansion.
    pub fn restrict_to_curve(&self) -> Vec<Cyc> {
        self.coeffs.iter().map(Section::ev_zero).collect()
    }

    pub fn equal_through(&self, other: &FjSeries, w: usize) -> bool {
        if w > self.valid_to() || w > other.valid_to() {
            return false;
        }
        (0..=w).all(|n| self.coeffs[n] == other.coeffs[n])
    }
}

/// A truncated series whose coefficients may carry one derivative symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct FjDiffSeries {
    pub coeffs: Vec<DiffSection>,
}

impl FjDiffSeries {
    pub fn new(coeffs: Vec<DiffSection>) -> Self {
        for (n, c) in coeffs.iter().enumerate() {
            assert_eq!(c.degree, n, "graded compatibility violated at order {n}");
        }
        FjDiffSeries { coeffs }
    }

    pub fn zero(w: usize) -> Self {
        FjDiffSeries {
            coeffs: (0..=w).map(DiffSection::zero).collect(),
        }
    }

    pub fn from_plain(s: &FjSeries) -> Self {
        FjDiffSeries {
            coeffs: s.coeffs.iter().map(|c| DiffSection::from_base(c.clone())).collect(),
        }
    }

    pub fn valid_to(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncate(&self, w: usize) -> FjDiffSeries {
        let take = w.min(self.valid_to());
        FjDiffSeries {
            coeffs: self.coeffs[..=take].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(DiffSection::is_zero)
    }

    pub fn add(&self, other: &FjDiffSeries) -> FjDiffSeries {
        let v = self.valid_to().min(other.valid_to());
        FjDiffSeries {
            coeffs: (0..=v).map(|n| self.coeffs[n].add(&other.coeffs[n])).collect(),
        }
    }

    pub fn sub(&self, other: &FjDiffSeries) -> FjDiffSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FjDiffSeries {
        FjDiffSeries {
            coeffs: self.coeffs.iter().map(DiffSection::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Cyc) -> FjDiffSeries {
        FjDiffSeries {
            coeffs: self.coeffs.iter().map(|s| s.scale(c)).collect(),
        }
    }

    /// Product with a prime-free series.
    pub fn mul_plain(&self, other: &FjSeries) -> FjDiffSeries {
        let v = self.valid_to().min(other.valid_to());
        let mut out: Vec<DiffSection> = (0..=v).map(DiffSection::zero).collect();
        for (i, a) in self.coeffs.iter().enumerate().take(v + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(v + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul_section(b));
            }
        }
        FjDiffSeries { coeffs: out }
    }

    /// Translation-type substitution on base and prime parts.
    pub fn substitute(&self, images: &[Section; 3]) -> FjDiffSeries {
        FjDiffSeries {
            coeffs: self.coeffs.iter().map(|c| c.substitute(images)).collect(),
        }
    }

    /// Exact division by a prime-free series, coefficient solves running in
    /// the Wronskian-reduced module.
    pub fn divide(&self, g: &FjSeries) -> Result<FjDiffSeries> {
        let n0 = g
            .lowest_nonzero()
            .ok_or_else(|| Error::NotDivisible("division by zero series".into()))?;
        let g0 = &g.coeffs[n0];
        let v = self.valid_to().min(g.valid_to());
        if v < n0 {
            return Err(Error::TruncationTooShallow(
                "divisor order exceeds truncation".into(),
            ));
        }
        for n in 0..n0.min(self.coeffs.len()) {
            if !self.coeffs[n].is_zero() {
                return Err(Error::NotDivisible(format!(
                    "numerator has order {n} below divisor order {n0}"
                )));
            }
        }
        let qv = v - n0;
        let mut q: Vec<DiffSection> = Vec::with_capacity(qv + 1);
        for n in 0..=qv {
            let mut rem = self.coeffs[n + n0].clone();
            for (i, qi) in q.iter().enumerate() {
                if qi.is_zero() {
                    continue;
                }
                let gc = &g.coeffs[n + n0 - i];
                if gc.is_zero() {
                    continue;
                }
                rem = rem.sub(&qi.mul_section(gc));
            }
            q.push(diff_exact_divide(&rem, g0)?);
        }
        Ok(FjDiffSeries { coeffs: q })
    }
}

/// Solve `q * g = rem` for a differential section `q`, working modulo the
/// Wronskian relations.
pub fn diff_exact_divide(rem: &DiffSection, g: &Section) -> Result<DiffSection> {
    if g.is_zero() {
        return Err(Error::NotDivisible("division by zero section".into()));
    }
    if rem.is_zero() {
        if rem.degree < g.degree {
            return Err(Error::NotDivisible("degree too small".into()));
        }
        return Ok(DiffSection::zero(rem.degree - g.degree));
    }
    if rem.degree < g.degree {
        return Err(Error::NotDivisible("degree too small".into()));
    }
    // fast path: prime-free numerators divide in the plain ring
    if rem.is_prime_free() {
        let q = rem.base.exact_divide(g)?;
        return Ok(DiffSection::from_base(q));
    }
    let qdeg = rem.degree - g.degree;
    let cols = DiffSection::coord_len(qdeg);
    let rows = DiffSection::coord_len(rem.degree);
    let mut mat = Mat::zero(rows, cols);
    for j in 0..cols {
        let mut unit = vec![Cyc::zero(); cols];
        unit[j] = Cyc::one();
        let e = DiffSection::from_coordinates(qdeg, &unit);
        for (i, c) in e.mul_section(g).coordinates().into_iter().enumerate() {
            mat.set(i, j, c);
        }
    }
    match mat.solve(&rem.coordinates()) {
        Some(x) => Ok(DiffSection::from_coordinates(qdeg, &x)),
        None => Err(Error::NotDivisible(format!(
            "no differential quotient in degree {qdeg}"
        ))),
    }
}

/// The normalized bracket of two scalar series of weights `k` and `l`:
/// last component `(1/l) f N(h) - (1/k) h N(f)`, first component the same
/// expression with the formal derivation in place of `N`.
pub fn bracket(f: &FjSeries, k: i64, h: &FjSeries, l: i64) -> (FjDiffSeries, FjSeries) {
    assert!(k >= 1 && l >= 1);
    let il = Cyc::new(ratio(1, l), ratio(0, 1));
    let ik = Cyc::new(ratio(1, k), ratio(0, 1));
    let last = f.mul(&h.n_operator()).scale(&il).sub(&h.mul(&f.n_operator()).scale(&ik));
    let first = h
        .derivation()
        .mul_plain(f)
        .scale(&il)
        .sub(&f.derivation().mul_plain(h).scale(&ik));
    (first, last)
}

/// A vector-valued form carried by its last Fourier-Jacobi component,
/// with the next-to-last component and a symmetric-power presentation
/// where the construction provides them.
#[derive(Clone, Debug)]
pub struct VectorForm {
    pub name: String,
    pub j: usize,
    pub k: i64,
    pub ell: u8,
    pub last: FjSeries,
    /// Next-to-last component; for `j = 1` this is the first component.
    pub first: Option<FjDiffSeries>,
    pub presentation: Option<SymPresentation>,
    /// Ratio of the stored leading coefficient to a published leading
    /// coefficient, recorded when a form is only pinned up to scale.
    pub printed_scale: Option<Cyc>,
}

/// `form = Sym^power(num_first, num_last) / denom`.
#[derive(Clone, Debug)]
pub struct SymPresentation {
    pub power: usize,
    pub num_first: FjDiffSeries,
    pub num_last: FjSeries,
    pub denom: FjSeries,
}

impl VectorForm {
    pub fn scalar(name: &str, k: i64, ell: u8, series: FjSeries) -> Self {
        VectorForm {
            name: name.into(),
            j: 0,
            k,
            ell,
            last: series,
            first: None,
            presentation: None,
            printed_scale: None,
        }
    }

    /// Divide every stored component by a scalar series.
    pub fn divide(&self, name: &str, g: &FjSeries, dk: i64, dell: u8) -> Result<VectorForm> {
        let last = self.last.divide(g)?;
        let first = match &self.first {
            Some(f) => Some(f.divide(g)?),
            None => None,
        };
        Ok(VectorForm {
            name: name.into(),
            j: self.j,
            k: self.k - dk,
            ell: (self.ell + 3 - dell % 3) % 3,
            last,
            first,
            presentation: None,
            printed_scale: None,
        })
    }
}

/// Wedge of `power + 1` symmetric-power forms via the pairwise factorization
/// of the symmetric-power determinant: the determinant of
/// `[Sym^j v_0 | ... | Sym^j v_j]` equals the product of the pairwise
/// determinants `a_i b_l - a_l b_i`, each of which is Wronskian-reducible
/// for genuine wedges.
pub fn wedge(forms: &[&VectorForm]) -> Result<FjSeries> {
    if forms.is_empty() {
        return Err(Error::ShapeMismatch("empty wedge".into()));
    }
    let j = forms[0].j;
    if forms.len() != j + 1 {
        return Err(Error::ShapeMismatch(format!(
            "wedge of Sym^{j} needs {} forms, got {}",
            j + 1,
            forms.len()
        )));
    }
    let pres: Vec<&SymPresentation> = forms
        .iter()
        .map(|f| {
            f.presentation
                .as_ref()
                .ok_or_else(|| Error::ShapeMismatch(format!("{} has no presentation", f.name)))
        })
        .collect::<Result<_>>()?;
    if pres.iter().any(|p| p.power != j) {
        return Err(Error::ShapeMismatch("mixed symmetric powers".into()));
    }
    let mut numerator: Option<FjSeries> = None;
    for i in 0..forms.len() {
        for l in (i + 1)..forms.len() {
            let factor = pairwise_wedge(&pres[i].num_first, &pres[i].num_last, &pres[l].num_first, &pres[l].num_last)?;
            numerator = Some(match numerator {
                None => factor,
                Some(acc) => acc.mul(&factor),
            });
        }
    }
    let mut out = numerator.unwrap();
    for p in &pres {
        out = out.divide(&p.denom)?;
    }
    Ok(out)
}

/// `a_i b_l - a_l b_i`, Wronskian-reduced to a prime-free series.
pub fn pairwise_wedge(
    a_i: &FjDiffSeries,
    b_i: &FjSeries,
    a_l: &FjDiffSeries,
    b_l: &FjSeries,
) -> Result<FjSeries> {
    let d = a_i.mul_plain(b_l).sub(&a_l.mul_plain(b_i));
    let coeffs: Result<Vec<Section>> = d.coeffs.iter().map(DiffSection::wronskian_reduce).collect();
    Ok(FjSeries::new(coeffs?))
}
