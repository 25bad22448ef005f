//! The graded section algebra `A = Q(r)[X,Y,Z] / (X^3 - r(Y^3 - Z^3))`
//! and its degree-one differential extension.
//!
//! The degree-`n` piece of `A` models the space of sections of the n-th
//! power of the degree-3 line bundle on the CM elliptic curve
//! `C / sqrt(-3) Z[r]`; its canonical basis is
//! `{X^a Y^b Z^c : 0 <= a <= 2, a + b + c = n}` (dimension `3n` for `n >= 1`).
//!
//! Differential elements carry a prime part `u X' + v Y' + w Z'` with
//! `u, v, w` of one degree lower.  They are kept in a normal form modulo the
//! Wronskian relations below, in which `kappa = 1` fixes the overall scale of
//! the derivative symbols:
//!
//! ```text
//!   Y Z' - Y' Z = X^2          (the normalization convention)
//!   Z X' - Z' X = -r Y^2
//!   X Y' - X' Y =  r Z^2
//!   X^2 X' = r Y^2 Y' - r Z^2 Z'
//! ```
//!
//! The second and third relations are forced by the first: multiplying
//! `Z X' - Z' X` by `X^2` and reducing with the differentiated cubic
//! `X^2 X' = r(Y^2 Y' - Z^2 Z')` gives
//! `X^2 (Z X' - Z' X) = r Y^2 (Z Y' - Y Z') = -r Y^2 X^2`, and cancelling
//! `X^2` (the ring is a domain) leaves `Z X' - Z' X = -r Y^2`; the third
//! relation follows the same way from `X^2 (X Y' - X' Y) = r Z^2 X^2`.

use crate::cyclotomic::Cyc;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;

/// A reduced monomial `X^a Y^b Z^c` with `a <= 2`.
pub type Mono = (u8, u16, u16);

pub fn mono_degree(m: &Mono) -> usize {
    m.0 as usize + m.1 as usize + m.2 as usize
}

/// Canonical basis of the degree-`n` piece, in lexicographic `(a, b, c)` order.
pub fn basis(n: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    for a in 0..=2.min(n) {
        for b in 0..=(n - a) {
            let c = n - a - b;
            out.push((a as u8, b as u16, c as u16));
        }
    }
    out
}

pub fn dim(n: usize) -> usize {
    if n == 0 {
        1
    } else {
        3 * n
    }
}

/// A homogeneous element of `A`.
#[derive(Clone, PartialEq, Debug)]
pub struct Section {
    pub degree: usize,
    pub coeffs: BTreeMap<Mono, Cyc>,
}

impl Section {
    pub fn zero(degree: usize) -> Self {
        Section {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: Cyc) -> Self {
        let mut s = Section::zero(0);
        s.add_term((0, 0, 0), c);
        s
    }

    pub fn one() -> Self {
        Section::constant(Cyc::one())
    }

    pub fn monomial(m: Mono, c: Cyc) -> Self {
        let mut s = Section::zero(mono_degree(&m));
        s.add_term(m, c);
        s
    }

    /// Degree-1 generators.
    pub fn x() -> Self {
        Section::monomial((1, 0, 0), Cyc::one())
    }
    pub fn y() -> Self {
        Section::monomial((0, 1, 0), Cyc::one())
    }
    pub fn z() -> Self {
        Section::monomial((0, 0, 1), Cyc::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Cyc) {
        debug_assert_eq!(mono_degree(&m), self.degree);
        debug_assert!(m.0 <= 2);
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.coeffs.remove(&m);
                }
            }
            None => {
                self.coeffs.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Section) -> Section {
        // the zero section is degree-ambiguous
        if self.is_zero() && self.degree != other.degree {
            return other.clone();
        }
        if other.is_zero() && self.degree != other.degree {
            return self.clone();
        }
        assert_eq!(self.degree, other.degree, "degree mismatch in add");
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Section) -> Section {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Section {
        let mut out = Section::zero(self.degree);
        for (m, c) in &self.coeffs {
            out.coeffs.insert(*m, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Cyc) -> Section {
        let mut out = Section::zero(self.degree);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.coeffs {
            out.add_term(*m, v * c);
        }
        out
    }

    /// Product of two reduced monomials, reducing `X^3 -> r(Y^3 - Z^3)`.
    fn mono_mul(m1: &Mono, m2: &Mono, c: &Cyc, out: &mut Section) {
        let a = m1.0 + m2.0;
        let b = m1.1 + m2.1;
        let z = m1.2 + m2.2;
        if a <= 2 {
            out.add_term((a, b, z), c.clone());
        } else {
            // a in {3, 4}: X^a = X^(a-3) * r * (Y^3 - Z^3)
            let r = Cyc::rho();
            let cr = c * &r;
            out.add_term((a - 3, b + 3, z), cr.clone());
            out.add_term((a - 3, b, z + 3), -cr);
        }
    }

    pub fn mul(&self, other: &Section) -> Section {
        let mut out = Section::zero(self.degree + other.degree);
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &other.coeffs {
                let c = c1 * c2;
                Section::mono_mul(m1, m2, &c, &mut out);
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> Section {
        let mut acc = Section::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coordinates in the canonical basis of the degree piece.
    pub fn coordinates(&self) -> Vec<Cyc> {
        basis(self.degree)
            .iter()
            .map(|m| self.coeffs.get(m).cloned().unwrap_or_else(Cyc::zero))
            .collect()
    }

    pub fn from_coordinates(degree: usize, coords: &[Cyc]) -> Section {
        let bs = basis(degree);
        assert_eq!(bs.len(), coords.len());
        let mut s = Section::zero(degree);
        for (m, c) in bs.into_iter().zip(coords) {
            s.add_term(m, c.clone());
        }
        s
    }

    /// Ring-homomorphic substitution by images of `X, Y, Z`, all of one
    /// common degree `d >= 1`; the result has degree `d * self.degree`.
    ///
    /// The image triple must satisfy the cubic relation; check it once per
    /// triple with [`Section::check_relation`] before batch substitution.
    pub fn substitute(&self, images: &[Section; 3]) -> Section {
        let d = images[0].degree;
        assert!(images.iter().all(|s| s.degree == d));
        let mut max_a = 0u8;
        let mut max_b = 0u16;
        let mut max_c = 0u16;
        for (m, _) in &self.coeffs {
            max_a = max_a.max(m.0);
            max_b = max_b.max(m.1);
            max_c = max_c.max(m.2);
        }
        let powers = |s: &Section, e: usize| -> Vec<Section> {
            let mut v = vec![Section::one()];
            for i in 1..=e {
                v.push(v[i - 1].mul(s));
            }
            v
        };
        let px = powers(&images[0], max_a as usize);
        let py = powers(&images[1], max_b as usize);
        let pz = powers(&images[2], max_c as usize);
        let mut out = Section::zero(d * self.degree);
        for (m, c) in &self.coeffs {
            let term = px[m.0 as usize]
                .mul(&py[m.1 as usize])
                .mul(&pz[m.2 as usize])
                .scale(c);
            out = out.add(&term);
        }
        out
    }

    /// Verify that an image triple preserves `X^3 = r (Y^3 - Z^3)`.
    pub fn check_relation(images: &[Section; 3]) -> Result<()> {
        let lhs = images[0].pow(3);
        let rhs = images[1].pow(3).sub(&images[2].pow(3)).scale(&Cyc::rho());
        if lhs == rhs {
            Ok(())
        } else {
            Err(Error::RelationViolated(format!(
                "images of degree {}",
                images[0].degree
            )))
        }
    }

    /// Exact division: the unique `q` with `q * g = self`, if it exists.
    ///
    /// Monomial divisors go through direct coefficient manipulation.  A
    /// divisor whose twist product `g * s(g) * s^2(g)` (with
    /// `s : (Y, Z) -> (rY, r^2 Z)`) is a monomial is handled by rewriting
    /// `f/g = (f * s(g) * s^2(g)) / (g * s(g) * s^2(g))`; that covers every
    /// product of `Y - r^k Z` factors.  Everything else falls back to an
    /// exact linear solve.
    pub fn exact_divide(&self, g: &Section) -> Result<Section> {
        if g.is_zero() {
            return Err(Error::NotDivisible("division by zero section".into()));
        }
        if self.degree < g.degree {
            return Err(Error::NotDivisible("degree too small".into()));
        }
        if self.is_zero() {
            return Ok(Section::zero(self.degree - g.degree));
        }
        if g.coeffs.len() == 1 {
            let (m, c) = g.coeffs.iter().next().unwrap();
            return self.divide_monomial(*m, c);
        }
        // monomialization through the (Y, Z) twist
        let tw = CuspAction::r3();
        let g1 = g.substitute(&tw);
        let g2 = g1.substitute(&tw);
        let cof = g1.mul(&g2);
        let prod = g.mul(&cof);
        if prod.coeffs.len() == 1 {
            let (m, c) = prod.coeffs.iter().next().unwrap();
            return self.mul(&cof).divide_monomial(*m, c);
        }
        self.divide_by_solve(g)
    }

    fn divide_by_solve(&self, g: &Section) -> Result<Section> {
        let qdeg = self.degree - g.degree;
        let qbasis = basis(qdeg);
        let rows = dim(self.degree);
        let mut mat = Mat::zero(rows, qbasis.len());
        for (j, m) in qbasis.iter().enumerate() {
            let col = Section::monomial(*m, Cyc::one()).mul(g);
            for (i, c) in col.coordinates().into_iter().enumerate() {
                mat.set(i, j, c);
            }
        }
        let rhs = self.coordinates();
        match mat.solve(&rhs) {
            Some(x) => {
                let q = Section::from_coordinates(qdeg, &x);
                debug_assert_eq!(q.mul(g), *self);
                Ok(q)
            }
            None => Err(Error::NotDivisible(format!(
                "no quotient in degree {qdeg}"
            ))),
        }
    }

    fn divide_monomial(&self, m: Mono, c: &Cyc) -> Result<Section> {
        let mut q = self.clone();
        // Y^b and Z^c divide termwise or not at all
        if m.1 > 0 || m.2 > 0 {
            let mut out = Section::zero(q.degree - m.1 as usize - m.2 as usize);
            for (t, v) in &q.coeffs {
                if t.1 < m.1 || t.2 < m.2 {
                    return Err(Error::NotDivisible(format!(
                        "monomial Y^{}Z^{} does not divide",
                        m.1, m.2
                    )));
                }
                out.add_term((t.0, t.1 - m.1, t.2 - m.2), v.clone());
            }
            q = out;
        }
        for _ in 0..m.0 {
            q = q.divide_x()?;
        }
        Ok(q.scale(&c.inv().expect("nonzero divisor coefficient")))
    }

    /// Divide by the generator `X`, using `X * X^2 = r (Y^3 - Z^3)` to
    /// account for `X`-free terms.
    fn divide_x(&self) -> Result<Section> {
        if self.degree == 0 {
            return Err(Error::NotDivisible("degree too small".into()));
        }
        let mut q = Section::zero(self.degree - 1);
        let mut xfree = Section::zero(self.degree);
        for (t, v) in &self.coeffs {
            if t.0 >= 1 {
                q.add_term((t.0 - 1, t.1, t.2), v.clone());
            } else {
                xfree.add_term(*t, v.clone());
            }
        }
        if xfree.is_zero() {
            return Ok(q);
        }
        // the X-free part must be r (Y^3 - Z^3) * G, with G landing on X^2
        if self.degree < 3 {
            return Err(Error::NotDivisible("X-free remainder".into()));
        }
        let mut p = xfree.scale(&Cyc::rho2()); // divide by r
        let mut gpart = Section::zero(self.degree - 3);
        while let Some((t, v)) = p
            .coeffs
            .iter()
            .filter(|(t, _)| t.1 >= 3)
            .max_by_key(|(t, _)| t.1)
            .map(|(t, v)| (*t, v.clone()))
        {
            p.coeffs.remove(&t);
            gpart.add_term((0, t.1 - 3, t.2), v.clone());
            // subtract v (Y^3 - Z^3) Y^{b-3} Z^c, whose Y^b part is t itself
            p.add_term((0, t.1 - 3, t.2 + 3), v);
        }
        if !p.is_zero() {
            return Err(Error::NotDivisible("X-free part not a relation multiple".into()));
        }
        for (t, v) in gpart.coeffs {
            q.add_term((2, t.1, t.2), v);
        }
        Ok(q)
    }

    /// Evaluation at the marked point of the modular curve:
    /// the ring map `X -> 0, Y -> 1, Z -> 1`.
    pub fn ev_zero(&self) -> Cyc {
        let mut acc = Cyc::zero();
        for (m, c) in &self.coeffs {
            if m.0 == 0 {
                acc += c;
            }
        }
        acc
    }

    /// Leibniz extension `X -> X', Y -> Y', Z -> Z'` into the differential module.
    pub fn derivation(&self) -> DiffSection {
        if self.degree == 0 {
            return DiffSection::zero(0);
        }
        let n = self.degree;
        let mut d = DiffSection::zero(n);
        for (m, c) in &self.coeffs {
            let (a, b, z) = *m;
            if a > 0 {
                d.dx.add_term((a - 1, b, z), c.scale(&BigRational::from_integer((a as i64).into())));
            }
            if b > 0 {
                d.dy.add_term((a, b - 1, z), c.scale(&BigRational::from_integer((b as i64).into())));
            }
            if z > 0 {
                d.dz.add_term((a, b, z - 1), c.scale(&BigRational::from_integer((z as i64).into())));
            }
        }
        d.normalize();
        d
    }
}

impl fmt::Display for Section {
    /// Canonical text form: `coef*X^a*Y^b*Z^c` terms joined with ` + `,
    /// in lexicographic monomial order; `0` for the zero element.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| format!("({})*X^{}*Y^{}*Z^{}", c, m.0, m.1, m.2))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// An element of `A ⊕ A·X' ⊕ A·Y' ⊕ A·Z'` in Wronskian normal form.
///
/// The normal form eliminates every `X'` term whose coefficient monomial
/// contains `Y` or `Z` (or equals `X^2`), and every `Z'` term whose
/// coefficient contains `Y`.  What remains is a canonical complement of the
/// relation submodule: the coordinate count per degree `n` is `6n`, matching
/// the rank-2 extension bundle the prime-linear elements model.
#[derive(Clone, PartialEq, Debug)]
pub struct DiffSection {
    pub degree: usize,
    pub base: Section,
    pub dx: Section,
    pub dy: Section,
    pub dz: Section,
}

impl DiffSection {
    pub fn zero(degree: usize) -> Self {
        let pd = degree.saturating_sub(1);
        DiffSection {
            degree,
            base: Section::zero(degree),
            dx: Section::zero(pd),
            dy: Section::zero(pd),
            dz: Section::zero(pd),
        }
    }

    pub fn from_base(s: Section) -> Self {
        let mut d = DiffSection::zero(s.degree);
        d.base = s;
        d
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.dx.is_zero() && self.dy.is_zero() && self.dz.is_zero()
    }

    pub fn is_prime_free(&self) -> bool {
        self.dx.is_zero() && self.dy.is_zero() && self.dz.is_zero()
    }

    pub fn add(&self, other: &DiffSection) -> DiffSection {
        if self.is_zero() && self.degree != other.degree {
            return other.clone();
        }
        if other.is_zero() && self.degree != other.degree {
            return self.clone();
        }
        assert_eq!(self.degree, other.degree);
        let mut out = DiffSection {
            degree: self.degree,
            base: self.base.add(&other.base),
            dx: self.dx.add(&other.dx),
            dy: self.dy.add(&other.dy),
            dz: self.dz.add(&other.dz),
        };
        out.normalize();
        out
    }

    pub fn sub(&self, other: &DiffSection) -> DiffSection {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffSection {
        DiffSection {
            degree: self.degree,
            base: self.base.neg(),
            dx: self.dx.neg(),
            dy: self.dy.neg(),
            dz: self.dz.neg(),
        }
    }

    pub fn scale(&self, c: &Cyc) -> DiffSection {
        DiffSection {
            degree: self.degree,
            base: self.base.scale(c),
            dx: self.dx.scale(c),
            dy: self.dy.scale(c),
            dz: self.dz.scale(c),
        }
    }

    pub fn mul_section(&self, s: &Section) -> DiffSection {
        let degree = self.degree + s.degree;
        let pd = degree.saturating_sub(1);
        let fix = |sec: Section, want: usize| -> Section {
            if sec.is_zero() {
                Section::zero(want)
            } else {
                debug_assert_eq!(sec.degree, want);
                sec
            }
        };
        let mut out = DiffSection {
            degree,
            base: fix(self.base.mul(s), degree),
            dx: fix(self.dx.mul(s), pd),
            dy: fix(self.dy.mul(s), pd),
            dz: fix(self.dz.mul(s), pd),
        };
        out.normalize();
        out
    }

    /// Rewrite to the Wronskian normal form.  Uses, in order:
    /// `(Y m) X' -> m X Y' - r m Z^2`, `(Z m) X' -> m X Z' - r m Y^2`,
    /// `X^2 X' -> r Y^2 Y' - r Z^2 Z'`, and then
    /// `(Y m) Z' -> m Z Y' + m X^2` until no `Z'` coefficient contains `Y`.
    pub fn normalize(&mut self) {
        let rho = Cyc::rho();
        // X' coefficients
        let pd = self.dx.degree;
        let dx = std::mem::replace(&mut self.dx, Section::zero(pd));
        for (m, c) in dx.coeffs {
            let (a, b, z) = m;
            if b >= 1 {
                // (Y m') X' = m' X Y' - r m' Z^2
                Section::mono_mul(&(a, b - 1, z), &(1, 0, 0), &c, &mut self.dy);
                Section::mono_mul(&(a, b - 1, z), &(0, 0, 2), &(-(&c * &rho)), &mut self.base);
            } else if z >= 1 {
                // (Z m') X' = m' X Z' - r m' Y^2
                Section::mono_mul(&(a, b, z - 1), &(1, 0, 0), &c, &mut self.dz);
                Section::mono_mul(&(a, b, z - 1), &(0, 2, 0), &(-(&c * &rho)), &mut self.base);
            } else if a == 2 {
                // X^2 X' = r Y^2 Y' - r Z^2 Z'
                self.dy.add_term((0, 2, 0), &c * &rho);
                self.dz.add_term((0, 0, 2), -(&c * &rho));
            } else {
                self.dx.add_term(m, c);
            }
        }
        // Z' coefficients: remove Y until none remains
        loop {
            let offending: Vec<(Mono, Cyc)> = self
                .dz
                .coeffs
                .iter()
                .filter(|(m, _)| m.1 >= 1)
                .map(|(m, c)| (*m, c.clone()))
                .collect();
            if offending.is_empty() {
                break;
            }
            for (m, c) in offending {
                self.dz.coeffs.remove(&m);
                let (a, b, z) = m;
                // (Y m') Z' = m' Z Y' + m' X^2
                Section::mono_mul(&(a, b - 1, z), &(0, 0, 1), &c, &mut self.dy);
                Section::mono_mul(&(a, b - 1, z), &(2, 0, 0), &c, &mut self.base);
            }
        }
    }

    /// The prime-free section equal to this element modulo the Wronskian
    /// relations, or `NotReducible` when there is none.
    pub fn wronskian_reduce(&self) -> Result<Section> {
        let mut e = self.clone();
        e.normalize();
        if e.is_prime_free() {
            Ok(e.base)
        } else {
            Err(Error::NotReducible(format!(
                "normal form keeps prime terms in degree {}",
                self.degree
            )))
        }
    }

    /// Apply a generator substitution to base and prime parts alike
    /// (valid for the translation-type cusp moves, where the derivative
    /// symbols transform without an extra factor).
    pub fn substitute(&self, images: &[Section; 3]) -> DiffSection {
        assert_eq!(
            images[0].degree, 1,
            "prime parts only substitute along degree-1 images"
        );
        let mut out = DiffSection::zero(self.degree);
        out.base = self.base.substitute(images);
        // m * V' with V' in {X', Y', Z'} maps to sub(m) * sub(V)', where the
        // primed image of a degree-1 element is taken coefficientwise.
        let pd = self.degree.saturating_sub(1);
        let mut dx = Section::zero(pd);
        let mut dy = Section::zero(pd);
        let mut dz = Section::zero(pd);
        for (src, gen) in [(&self.dx, 0usize), (&self.dy, 1), (&self.dz, 2)] {
            if src.is_zero() {
                continue;
            }
            let m_img = src.substitute(images);
            for (mono, c) in &images[gen].coeffs {
                let term = m_img.scale(c);
                let tgt = match mono {
                    (1, 0, 0) => &mut dx,
                    (0, 1, 0) => &mut dy,
                    (0, 0, 1) => &mut dz,
                    _ => unreachable!("degree-1 images are linear in X, Y, Z"),
                };
                *tgt = tgt.add(&term);
            }
        }
        out.dx = dx;
        out.dy = dy;
        out.dz = dz;
        out.normalize();
        out
    }

    /// Canonical coordinates: base basis, then the `Y'` block (full basis of
    /// degree `n-1`), then the reduced `Z'` block (`Y`-free monomials), then
    /// the reduced `X'` block (pure `X^a`, only in low degree).
    pub fn coordinates(&self) -> Vec<Cyc> {
        let mut v = self.base.coordinates();
        let pd = self.degree.saturating_sub(1);
        v.extend(self.dy.coordinates());
        for m in Self::z_block(pd) {
            v.push(self.dz.coeffs.get(&m).cloned().unwrap_or_else(Cyc::zero));
        }
        for m in Self::x_block(pd) {
            v.push(self.dx.coeffs.get(&m).cloned().unwrap_or_else(Cyc::zero));
        }
        v
    }

    fn z_block(pd: usize) -> Vec<Mono> {
        basis(pd).into_iter().filter(|m| m.1 == 0).collect()
    }

    fn x_block(pd: usize) -> Vec<Mono> {
        // pure X^a monomials survive only when pd <= 1 (X^2 X' reduces away)
        basis(pd)
            .into_iter()
            .filter(|m| m.1 == 0 && m.2 == 0 && m.0 <= 1)
            .collect()
    }

    pub fn coord_len(degree: usize) -> usize {
        let pd = degree.saturating_sub(1);
        let primes = if degree == 0 {
            0
        } else {
            dim(pd) + Self::z_block(pd).len() + Self::x_block(pd).len()
        };
        dim(degree) + primes
    }

    pub fn from_coordinates(degree: usize, coords: &[Cyc]) -> DiffSection {
        let mut it = coords.iter().cloned();
        let mut d = DiffSection::zero(degree);
        for m in basis(degree) {
            d.base.add_term(m, it.next().unwrap());
        }
        if degree > 0 {
            let pd = degree - 1;
            for m in basis(pd) {
                d.dy.add_term(m, it.next().unwrap());
            }
            for m in Self::z_block(pd) {
                d.dz.add_term(m, it.next().unwrap());
            }
            for m in Self::x_block(pd) {
                d.dx.add_term(m, it.next().unwrap());
            }
        }
        assert!(it.next().is_none());
        d
    }
}

/// Images of `(X, Y, Z)` under the cusp stabilizer generators and the
/// endomorphism unit group.
pub struct CuspAction;

impl CuspAction {
    /// Transposition-type generator: `(X, Y, Z) -> (-X, Z, Y)`.
    pub fn r2() -> [Section; 3] {
        [Section::x().neg(), Section::z(), Section::y()]
    }

    /// 3-cycle-type generator: `(X, Y, Z) -> (X, rY, r^2 Z)`.
    pub fn r3() -> [Section; 3] {
        [
            Section::x(),
            Section::y().scale(&Cyc::rho()),
            Section::z().scale(&Cyc::rho2()),
        ]
    }

    /// The multiplier-`u` endomorphism action for each of the six units,
    /// `u = (-r^2)^k`: `X` is twisted by `u` and `Y, Z` swap for odd powers.
    pub fn unit(u: &crate::eisenstein::Eis) -> [Section; 3] {
        let uc = u.to_cyc();
        let x = Section::x().scale(&uc);
        // units in the "+" coset {1, r, r^2} fix Y and Z; the "-" coset swaps them
        let swap = matches!((u.a, u.b), (1, 1) | (-1, 0) | (0, -1));
        if swap {
            [x, Section::z(), Section::y()]
        } else {
            [x, Section::y(), Section::z()]
        }
    }

    pub fn identity() -> [Section; 3] {
        [Section::x(), Section::y(), Section::z()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::Eis;
    use proptest::prelude::*;

    #[test]
    fn dimension_of_degree_pieces() {
        assert_eq!(basis(0).len(), 1);
        for n in 1..=40 {
            assert_eq!(basis(n).len(), 3 * n, "degree {n}");
        }
    }

    #[test]
    fn defining_relation() {
        // X^2 * X = r Y^3 - r Z^3
        let x = Section::x();
        let p = x.pow(2).mul(&x);
        let mut expect = Section::zero(3);
        expect.add_term((0, 3, 0), Cyc::rho());
        expect.add_term((0, 0, 3), -Cyc::rho());
        assert_eq!(p, expect);
    }

    #[test]
    fn unit_and_simple_products() {
        let s = Section::y().mul(&Section::z()).add(&Section::x().pow(2));
        assert_eq!(Section::one().mul(&s), s);
        let yz = Section::y().add(&Section::z());
        let ymz = Section::y().sub(&Section::z());
        let mut expect = Section::zero(2);
        expect.add_term((0, 2, 0), Cyc::one());
        expect.add_term((0, 0, 2), -Cyc::one());
        assert_eq!(yz.mul(&ymz), expect);
    }

    #[test]
    fn exact_divide_examples() {
        // (r Y^3 - r Z^3) / X = X^2
        let mut n = Section::zero(3);
        n.add_term((0, 3, 0), Cyc::rho());
        n.add_term((0, 0, 3), -Cyc::rho());
        assert_eq!(n.exact_divide(&Section::x()).unwrap(), Section::x().pow(2));
        // (Y^2 - Z^2)/(Y - Z) = Y + Z
        let num = Section::y().pow(2).sub(&Section::z().pow(2));
        let den = Section::y().sub(&Section::z());
        assert_eq!(num.exact_divide(&den).unwrap(), Section::y().add(&Section::z()));
        // Y / X fails
        assert!(Section::y().exact_divide(&Section::x()).is_err());
    }

    #[test]
    fn substitution_examples() {
        let r2 = CuspAction::r2();
        let ymz = Section::y().sub(&Section::z());
        assert_eq!(ymz.substitute(&r2), Section::z().sub(&Section::y()));
        let r3 = CuspAction::r3();
        let s = Section::y().add(&Section::z()).scale(&Cyc::from_int(9));
        let img = s.substitute(&r3);
        let mut expect = Section::zero(1);
        expect.add_term((0, 1, 0), Cyc::from_int(9) * Cyc::rho());
        expect.add_term((0, 0, 1), Cyc::from_int(9) * Cyc::rho2());
        assert_eq!(img, expect);
        // generators preserve the cubic
        Section::check_relation(&r2).unwrap();
        Section::check_relation(&r3).unwrap();
        for u in Eis::units() {
            Section::check_relation(&CuspAction::unit(&u)).unwrap();
        }
    }

    #[test]
    fn mu6_eigenvectors() {
        // the generator -r^2 acts with eigenvalues -r^2, 1, -1 on X, Y+Z, Y-Z
        let g = CuspAction::unit(&Eis::new(1, 1));
        let x = Section::x();
        assert_eq!(x.substitute(&g), x.scale(&Cyc::from_pair(1, 1)));
        let p = Section::y().add(&Section::z());
        assert_eq!(p.substitute(&g), p);
        let m = Section::y().sub(&Section::z());
        assert_eq!(m.substitute(&g), m.neg());
    }

    #[test]
    fn ev_zero_examples() {
        let s = Section::y().add(&Section::z()).scale(&Cyc::from_int(9));
        assert_eq!(s.ev_zero(), Cyc::from_int(18));
        let mut q = Section::zero(2);
        q.add_term((0, 2, 0), Cyc::from_int(27));
        q.add_term((0, 1, 1), Cyc::from_int(54));
        q.add_term((0, 0, 2), Cyc::from_int(27));
        assert_eq!(q.ev_zero(), Cyc::from_int(108));
        assert_eq!(Section::x().mul(&Section::y()).ev_zero(), Cyc::zero());
    }

    #[test]
    fn derivation_examples() {
        let ymz = Section::y().sub(&Section::z());
        let d = ymz.derivation();
        assert!(d.base.is_zero());
        assert_eq!(d.dy, Section::constant(Cyc::one()));
        assert_eq!(d.dz, Section::constant(-Cyc::one()));
        assert!(Section::one().derivation().is_zero());
    }

    #[test]
    fn wronskian_relations_vanish() {
        // Y Z' - Z Y' - X^2
        let mut r1 = DiffSection::zero(2);
        r1.dz = Section::y();
        r1.dy = Section::z().neg();
        r1.base = Section::x().pow(2).neg();
        r1.normalize();
        assert!(r1.is_zero(), "r1 should normalize to zero: {r1:?}");
        // Z X' - X Z' + r Y^2
        let mut r2 = DiffSection::zero(2);
        r2.dx = Section::z();
        r2.dz = Section::x().neg();
        r2.base = Section::y().pow(2).scale(&Cyc::rho());
        r2.normalize();
        assert!(r2.is_zero(), "r2 should normalize to zero: {r2:?}");
        // X Y' - Y X' - r Z^2
        let mut r3 = DiffSection::zero(2);
        r3.dx = Section::y().neg();
        r3.dy = Section::x();
        r3.base = Section::z().pow(2).scale(&Cyc::rho()).neg();
        r3.normalize();
        assert!(r3.is_zero(), "r3 should normalize to zero: {r3:?}");
        // X^2 X' - r Y^2 Y' + r Z^2 Z'
        let mut r4 = DiffSection::zero(3);
        r4.dx = Section::x().pow(2);
        r4.dy = Section::y().pow(2).scale(&Cyc::rho()).neg();
        r4.dz = Section::z().pow(2).scale(&Cyc::rho());
        r4.normalize();
        assert!(r4.is_zero(), "r4 should normalize to zero: {r4:?}");
    }

    #[test]
    fn derived_cubic_consistency() {
        // reduce(3 X^2 X') = 3 r Y^2 Y' - 3 r Z^2 Z'
        let mut e = DiffSection::zero(3);
        e.dx = Section::x().pow(2).scale(&Cyc::from_int(3));
        e.normalize();
        let mut expect = DiffSection::zero(3);
        expect.dy = Section::y().pow(2).scale(&(Cyc::from_int(3) * Cyc::rho()));
        expect.dz = Section::z().pow(2).scale(&(Cyc::from_int(3) * Cyc::rho())).neg();
        assert_eq!(e, expect);
    }

    #[test]
    fn wronskian_reduce_examples() {
        // Y Z' - Y' Z  ->  X^2
        let mut e = DiffSection::zero(2);
        e.dz = Section::y();
        e.dy = Section::z().neg();
        assert_eq!(e.wronskian_reduce().unwrap(), Section::x().pow(2));
        // prime-free input unchanged
        let s = Section::x().mul(&Section::y());
        assert_eq!(DiffSection::from_base(s.clone()).wronskian_reduce().unwrap(), s);
        // a lone Y' is not reducible
        let mut bad = DiffSection::zero(2);
        bad.dy = Section::y();
        assert!(bad.wronskian_reduce().is_err());
    }

    #[test]
    fn normal_form_coordinate_count() {
        for n in 1..=12 {
            assert_eq!(DiffSection::coord_len(n), 6 * n, "degree {n}");
        }
    }

    fn arb_section(degree: usize) -> impl Strategy<Value = Section> {
        let b = basis(degree);
        proptest::collection::vec(-6i64..6, b.len()).prop_map(move |cs| {
            let coords: Vec<Cyc> = cs.into_iter().map(Cyc::from_int).collect();
            Section::from_coordinates(degree, &coords)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mul_commutative_associative(f in arb_section(2), g in arb_section(3), h in arb_section(1)) {
            prop_assert_eq!(f.mul(&g), g.mul(&f));
            prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        }

        #[test]
        fn divide_round_trip(f in arb_section(3), g in arb_section(2)) {
            prop_assume!(!g.is_zero());
            let p = f.mul(&g);
            prop_assert_eq!(p.exact_divide(&g).unwrap(), f);
        }

        #[test]
        fn ev_zero_is_ring_map(f in arb_section(2), g in arb_section(3)) {
            prop_assert_eq!(f.mul(&g).ev_zero(), f.ev_zero() * g.ev_zero());
        }

        #[test]
        fn leibniz_rule(f in arb_section(2), g in arb_section(2)) {
            let lhs = f.mul(&g).derivation();
            let rhs = f.derivation().mul_section(&g).add(&g.derivation().mul_section(&f));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn normalize_is_additive_and_linear(f in arb_section(3), g in arb_section(2), m in arb_section(2)) {
            // a relation multiple always normalizes to zero
            let mut rel = DiffSection::zero(2);
            rel.dz = Section::y();
            rel.dy = Section::z().neg();
            rel.base = Section::x().pow(2).neg();
            let shifted = rel.mul_section(&m);
            prop_assert!(shifted.is_zero());
            // A-linearity of reduction through products
            let d = f.derivation();
            let a = d.mul_section(&g);
            let b = DiffSection {
                degree: d.degree + g.degree,
                base: d.base.mul(&g),
                dx: d.dx.mul(&g),
                dy: d.dy.mul(&g),
                dz: d.dz.mul(&g),
            };
            let mut b2 = b.clone();
            b2.normalize();
            prop_assert_eq!(a, b2);
        }
    }
}

#[cfg(test)]
mod division_fastpath_tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_section(degree: usize) -> impl Strategy<Value = Section> {
        let b = basis(degree);
        proptest::collection::vec(-5i64..5, b.len()).prop_map(move |cs| {
            let coords: Vec<Cyc> = cs.into_iter().map(Cyc::from_int).collect();
            Section::from_coordinates(degree, &coords)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn monomial_division_round_trip(f in arb_section(4), a in 0u8..3, b in 0u16..3, c in 0u16..3) {
            let m = Section::monomial((a, b, c), Cyc::from_pair(2, -1));
            let p = f.mul(&m);
            prop_assert_eq!(p.exact_divide(&m).unwrap(), f);
        }

        #[test]
        fn twist_product_division_round_trip(f in arb_section(5)) {
            // divisor with a (Y - Z)-type leading form times X
            let mut g = Section::zero(2);
            g.add_term((1, 1, 0), Cyc::from_int(3));
            g.add_term((1, 0, 1), Cyc::from_int(-3));
            let p = f.mul(&g);
            prop_assert_eq!(p.exact_divide(&g).unwrap(), f.clone());
            // and one that has no nice structure, exercising the solve
            let mut g2 = Section::zero(2);
            g2.add_term((0, 2, 0), Cyc::from_int(1));
            g2.add_term((1, 0, 1), Cyc::from_int(1));
            g2.add_term((2, 0, 0), Cyc::from_pair(0, 1));
            let p2 = f.mul(&g2);
            prop_assert_eq!(p2.exact_divide(&g2).unwrap(), f);
        }
    }
}
