//! Acceptance suite: every published value the engine must reproduce, run
//! at truncation order 32 with the shared operator cache.
//!
//! Each criterion prints one `ACCEPTANCE <id> PASS|FAIL` line; the tests
//! fail if any criterion fails.


use picard_forms::catalog::{proportionality, Catalog};
use picard_forms::config::Config;
use picard_forms::cyclotomic::Cyc;
use picard_forms::eisenstein::{split_prime, Eis};
use picard_forms::fj::{FjSeries, VectorForm};
use picard_forms::hecke::{
    eigenvalue, eisenstein_eigenvalue, eta_product_weight6, hecke_matrix,
    lift_eigenvalue, HeckeOp, LiftKind,
};
use picard_forms::linalg::Mat;
use picard_forms::sections::Section;
use picard_forms::structure::{
    action_matrices, dim_formula, isotypic_decompose, kernel_contains, kernel_of_span,
    rank_of_span, relation_vector, s4_restriction, span_products, stabilizer_projector,
    SpanEntry,
};
use picard_forms::theta::operators::OperatorTable;
use std::path::PathBuf;
use std::sync::OnceLock;

const W: usize = 32;
const HECKE_PRIMES: [i64; 4] = [2, 5, 7, 13];

fn shared_cache_path() -> PathBuf {
    if let Ok(p) = std::env::var("PICARD_TEST_CACHE") {
        return PathBuf::from(p);
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/picard-acceptance-cache.txt")
}

fn table() -> &'static OperatorTable {
    static TABLE: OnceLock<OperatorTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cfg = Config {
            truncation: W,
            cache_path: shared_cache_path(),
            ..Config::default()
        };
        picard_forms::cache_ensure::ensure_table(
            &cfg,
            W,
            &HECKE_PRIMES,
            picard_forms::cache_ensure::EnsureMode::Compute,
            600_000,
        )
        .expect("operator table")
        .table
    })
}

struct Gate {
    results: Vec<(String, bool)>,
}

impl Gate {
    fn new() -> Self {
        Gate { results: Vec::new() }
    }

    fn check(&mut self, id: &str, ok: bool) {
        println!("ACCEPTANCE {id} {}", if ok { "PASS" } else { "FAIL" });
        self.results.push((id.to_string(), ok));
    }

    fn finish(self) {
        let failures: Vec<String> = self
            .results
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(id, _)| id.clone())
            .collect();
        assert!(failures.is_empty(), "failed criteria: {failures:?}");
    }
}

fn sec(degree: usize, terms: &[(u8, u16, u16, i64)]) -> Section {
    let mut s = Section::zero(degree);
    for &(a, b, c, v) in terms {
        s.add_term((a, b, c), Cyc::from_int(v));
    }
    s
}

fn scaled_sec(degree: usize, terms: &[(u8, u16, u16, i64)], scale: &Cyc) -> Section {
    sec(degree, terms).scale(scale)
}

#[test]
fn criteria_1_to_5_series_and_identities() {
    let table = table();
    let cat = Catalog::new(table, W);
    let mut gate = Gate::new();

    // ---- criterion 1: exact golden series ----
    let phi0 = cat.scalar("phi0").unwrap();
    let ok = *phi0.coeff(0) == Section::one()
        && *phi0.coeff(1) == sec(1, &[(0, 1, 0, 9), (0, 0, 1, 9)])
        && *phi0.coeff(2) == sec(2, &[(0, 2, 0, 27), (0, 1, 1, 54), (0, 0, 2, 27)])
        && *phi0.coeff(3)
            == sec(3, &[(0, 3, 0, 36), (0, 2, 1, 81), (0, 1, 2, 81), (0, 0, 3, 36)]);
    gate.check("c1-phi0-through-w3", ok);

    let zeta = cat.scalar("zeta").unwrap();
    let ok = zeta.coeff(0).is_zero()
        && *zeta.coeff(1) == sec(1, &[(1, 0, 0, 1)])
        && zeta.coeff(2).is_zero()
        && *zeta.coeff(3) == sec(3, &[(1, 1, 1, -27)])
        && *zeta.coeff(4) == sec(4, &[(1, 3, 0, 32), (1, 0, 3, 32)])
        && zeta.coeff(5).is_zero()
        && zeta.coeff(6).is_zero()
        && *zeta.coeff(7) == sec(7, &[(1, 6, 0, -211), (1, 3, 3, 136), (1, 0, 6, -211)]);
    gate.check("c1-zeta-through-w7", ok);

    let ph0 = cat.form("big_phi0").unwrap();
    let ok = ph0.last.coeff(0).is_zero()
        && *ph0.last.coeff(1) == sec(1, &[(0, 1, 0, 1), (0, 0, 1, -1)])
        && *ph0.last.coeff(2) == sec(2, &[(0, 2, 0, -6), (0, 0, 2, 6)]);
    gate.check("c1-big-phi0-through-w2", ok);

    let six = Cyc::from_int(6);
    let g12 = cat.form("gamma12").unwrap().last.scale(&six);
    let ok = *g12.coeff(1) == sec(1, &[(1, 0, 0, -1)])
        && *g12.coeff(2) == sec(2, &[(1, 1, 0, 18), (1, 0, 1, 18)])
        && *g12.coeff(3) == sec(3, &[(1, 2, 0, -54), (1, 1, 1, -27), (1, 0, 2, -54)])
        && *g12.coeff(4) == sec(4, &[(1, 3, 0, 88), (1, 0, 3, 88)])
        && *g12.coeff(5)
            == sec(5, &[(1, 4, 0, -198), (1, 3, 1, 18), (1, 1, 3, 18), (1, 0, 4, -198)]);
    gate.check("c1-6gamma12-through-w5", ok);

    let g34 = cat.form("gamma34").unwrap().last.scale(&six);
    let ok = *g34.coeff(1) == sec(1, &[(1, 0, 0, 1)])
        && *g34.coeff(2) == sec(2, &[(1, 1, 0, -6), (1, 0, 1, -6)])
        && *g34.coeff(3) == sec(3, &[(1, 2, 0, -18), (1, 1, 1, 27), (1, 0, 2, -18)]);
    gate.check("c1-6gamma34-through-w3", ok);

    let d0 = cat.form("d0").unwrap();
    let ok = *d0.last.coeff(1) == sec(1, &[(0, 1, 0, 1), (0, 0, 1, -1)])
        && d0.last.coeff(2).is_zero()
        && *d0.last.coeff(3)
            == sec(3, &[(0, 3, 0, 9), (0, 2, 1, -27), (0, 1, 2, 27), (0, 0, 3, -9)])
        && *d0.last.coeff(4)
            == sec(4, &[(0, 4, 0, 8), (0, 3, 1, -56), (0, 1, 3, 56), (0, 0, 4, -8)]);
    gate.check("c1-d0-through-w4", ok);

    // E0 through w^3 at the printed -3^{-5} scale, E3 through w^5 at -3^{-3}
    let e0 = cat.form("e33_0").unwrap();
    let s5 = Cyc::from_ratio(-1, 243);
    let ok = *e0.last.coeff(1) == scaled_sec(1, &[(0, 1, 0, 1), (0, 0, 1, -1)], &s5)
        && *e0.last.coeff(2) == scaled_sec(2, &[(0, 2, 0, 6), (0, 0, 2, -6)], &s5)
        && *e0.last.coeff(3)
            == scaled_sec(3, &[(0, 3, 0, 27), (0, 2, 1, 9), (0, 1, 2, -9), (0, 0, 3, -27)], &s5);
    gate.check("c1-e33-0-through-w3", ok);

    let e3 = cat.form("e33_3").unwrap();
    let s3 = Cyc::from_ratio(-1, 27);
    let ok = e3.last.coeff(1).is_zero()
        && e3.last.coeff(2).is_zero()
        && *e3.last.coeff(3) == scaled_sec(3, &[(0, 3, 0, 1), (0, 0, 3, -1)], &s3)
        && e3.last.coeff(4).is_zero()
        && *e3.last.coeff(5) == scaled_sec(5, &[(0, 4, 1, -18), (0, 1, 4, 18)], &s3);
    gate.check("c1-e33-3-through-w5", ok);

    // ---- criterion 2: proportional golden series ----
    let psi1 = cat.form("psi1").unwrap();
    let mut printed = FjSeries::zero(6);
    printed.coeffs[2] = sec(2, &[(2, 0, 0, 1)]);
    printed.coeffs[4] = sec(4, &[(2, 1, 1, -24)]);
    printed.coeffs[5] = sec(5, &[(2, 3, 0, 34), (2, 0, 3, 34)]);
    printed.coeffs[6] = sec(6, &[(2, 2, 2, -81)]);
    gate.check(
        "c2-psi1-proportional-w6",
        proportionality(&psi1.last.truncate(6), &printed, 6).is_some(),
    );

    let psi2 = cat.form("psi2").unwrap();
    let mut printed = FjSeries::zero(6);
    printed.coeffs[2] = sec(2, &[(2, 0, 0, 1)]);
    printed.coeffs[4] = sec(4, &[(2, 1, 1, -6)]);
    printed.coeffs[5] = sec(5, &[(2, 3, 0, 70), (2, 0, 3, 70)]);
    printed.coeffs[6] = sec(6, &[(2, 2, 2, -405)]);
    gate.check(
        "c2-psi2-proportional-w6",
        proportionality(&psi2.last.truncate(6), &printed, 6).is_some(),
    );

    let phi1 = cat.scalar("phi1").unwrap();
    let r = phi1.restrict_to_curve();
    let expect = [1i64, -9, 27, -9, -117];
    let ok = (0..=4).all(|n| r[n] == Cyc::from_int(expect[n]));
    gate.check("c2-phi1-restriction-proportional", ok);

    // ---- criterion 3: exact restriction ----
    let r = phi0.restrict_to_curve();
    let expect = [1i64, 18, 108, 234, 234];
    let ok = (0..=4).all(|n| r[n] == Cyc::from_int(expect[n]));
    gate.check("c3-phi0-restriction-exact", ok);

    // ---- criterion 4: ring and module identities ----
    for id in [
        "zeta_cubed",
        "gamma_sum",
        "phi_g_lemma",
        "phi_big_phi_relation",
        "r4",
        "r5",
        "existence_divisions",
        "x_sums",
    ] {
        let rep = cat.verify_identity(id).unwrap();
        gate.check(&format!("c4-{id}"), rep.passed() && rep.w_checked >= 16);
    }

    // ---- criterion 5: wedge identities ----
    for id in [
        "wedge_phi_family",
        "wedge_ratio_psi_phi",
        "wedge_d_family",
        "wedge_e_family",
        "psi1_gamma_wedges",
    ] {
        let rep = cat.verify_identity(id).unwrap();
        if !rep.passed() {
            for (claim, ok, detail) in &rep.checks {
                if !ok {
                    println!("  ({claim}: {detail})");
                }
            }
        }
        gate.check(&format!("c5-{id}"), rep.passed());
    }

    gate.finish();
}

fn form_product(name: &str, phi: &FjSeries, f: &VectorForm, dk: i64, dell: u8) -> VectorForm {
    VectorForm {
        name: name.into(),
        j: f.j,
        k: f.k + dk,
        ell: (f.ell + dell) % 3,
        last: phi.mul(&f.last),
        first: f.first.as_ref().map(|fr| fr.mul_plain(phi)),
        presentation: None,
        printed_scale: None,
    }
}

/// Greedily select a linearly independent subset, by last-component
/// coordinates.
fn select_basis(forms: Vec<VectorForm>) -> Vec<VectorForm> {
    let v = forms.iter().map(|f| f.last.valid_to()).min().unwrap();
    let coords = |s: &FjSeries| -> Vec<Cyc> {
        let mut out = Vec::new();
        for n in 0..=v {
            out.extend(s.coeff(n).coordinates());
        }
        out
    };
    let mut rows: Vec<Vec<Cyc>> = Vec::new();
    let mut chosen = Vec::new();
    for f in forms {
        rows.push(coords(&f.last));
        let m = Mat::from_rows(rows.clone());
        if m.rank() == rows.len() {
            chosen.push(f);
        } else {
            rows.pop();
        }
    }
    chosen
}

fn cycpair(a: i64, b: i64) -> Cyc {
    Cyc::from_pair(a, b)
}

/// Build the combination of span forms with the given coefficients.
fn combine(forms: &[VectorForm], coeffs: &[Cyc], name: &str) -> VectorForm {
    let mut last = FjSeries::zero(forms[0].last.valid_to());
    for (f, c) in forms.iter().zip(coeffs) {
        last = last.add(&f.last.scale(c));
    }
    VectorForm {
        name: name.into(),
        j: forms[0].j,
        k: forms[0].k,
        ell: forms[0].ell,
        last,
        first: None,
        presentation: None,
        printed_scale: None,
    }
}

/// Nonzero forms spanning the image of the trivial/sign stabilizer
/// projector on the span.
fn projector_basis(forms: &[VectorForm], onto_sign: bool) -> Vec<VectorForm> {
    let refs: Vec<&VectorForm> = forms.iter().collect();
    let (a2, a3) = action_matrices(&refs).expect("stabilizer action");
    let p = stabilizer_projector(&a2, &a3, onto_sign);
    let mut cols: Vec<Vec<Cyc>> = Vec::new();
    for c in 0..p.cols {
        let col: Vec<Cyc> = (0..p.rows).map(|r| p.at(r, c).clone()).collect();
        if col.iter().all(Cyc::is_zero) {
            continue;
        }
        cols.push(col);
        if Mat::from_rows(cols.clone()).rank() != cols.len() {
            cols.pop();
        }
    }
    cols.iter()
        .enumerate()
        .map(|(i, c)| combine(forms, c, &format!("proj{i}")))
        .collect()
}

/// Exact check that `T f = lambda f` through the certified range; prints the
/// computed value when the claim fails (the structured table-vs-pipeline
/// report).
fn direct_eigen_check(gate: &mut Gate, id: &str, f: &VectorForm, op: &HeckeOp, lambda: Cyc) {
    match eigenvalue(f, op, table()) {
        Ok(rep) => {
            let ok = rep.eigenvalue == lambda;
            if !ok {
                println!(
                    "  ({id}: table value {lambda}, pipeline value {} checked on {:?})",
                    rep.eigenvalue, rep.coefficients_checked
                );
            }
            gate.check(id, ok);
        }
        Err(e) => {
            println!("  ({id}: {e})");
            gate.check(id, false);
        }
    }
}

/// Eigenspace of an exactly computed operator matrix, as forms.
fn matrix_eigenspace(forms: &[VectorForm], m: &Mat, lambda: &Cyc) -> Vec<VectorForm> {
    let shifted = m.sub(&Mat::identity(m.rows).scale(lambda));
    shifted
        .kernel()
        .into_iter()
        .enumerate()
        .map(|(i, v)| combine(forms, &v, &format!("eig{i}")))
        .collect()
}

#[test]
fn criteria_6_7_hecke_eigenvalues() {
    let table = table();
    let cat = Catalog::new(table, W);
    let mut gate = Gate::new();
    let v7 = split_prime(7).unwrap();
    let v13 = split_prime(13).unwrap();
    let t7 = HeckeOp::nu(v7).unwrap();
    let t13 = HeckeOp::nu(v13).unwrap();
    let tm2 = HeckeOp::minus_p(2).unwrap();
    let tm5 = HeckeOp::minus_p(5).unwrap();

    // ---- the weight-(1,7) family ----
    let ph0 = cat.form("big_phi0").unwrap();
    let checks = [
        (&t7, cycpair(759, 261)),
        (&t13, cycpair(-4137, 1683)),
        (&tm2, cycpair(72, 0)),
        (&tm5, cycpair(89622, 0)),
    ];
    for (op, expect) in checks {
        direct_eigen_check(&mut gate, &format!("c6-big-phi0-{}", op.label()), &ph0, op, expect);
    }

    // ---- weight (1,10), trivial character: span of phi_i * Phi_j ----
    let phis: Vec<_> = (0..3).map(|i| cat.scalar(&format!("phi{i}")).unwrap()).collect();
    let bigs: Vec<_> = (0..3).map(|i| cat.form(&format!("big_phi{i}")).unwrap()).collect();
    let mut products = Vec::new();
    for (i, p) in phis.iter().enumerate() {
        for (j, f) in bigs.iter().enumerate() {
            products.push(form_product(&format!("phi{i}Phi{j}"), p, f, 3, 0));
        }
    }
    let basis = select_basis(products);
    assert_eq!(basis.len(), 8, "S(1,10) span should have rank 8");
    let refs: Vec<&VectorForm> = basis.iter().collect();
    let m7 = hecke_matrix(&refs, &t7, table).expect("T7 on S(1,10)");
    for (id, lambda, irrep, lam2) in [
        ("s110-s31", cycpair(-13515, 3573), "s[3,1]", cycpair(36, 0)),
        ("s110-s22", cycpair(15159, 10863), "s[2,2]", cycpair(1008, 0)),
        ("s110-s211", cycpair(26985, 20097), "s[2,1,1]", cycpair(-1548, 0)),
    ] {
        let eig = matrix_eigenspace(&basis, &m7, &lambda);
        let (t, sg, d) = s4_restriction(irrep).unwrap();
        let mut ok = eig.len() == t + sg + 2 * d;
        if ok {
            let refs: Vec<&VectorForm> = eig.iter().collect();
            ok &= isotypic_decompose(&refs).map(|r| r == (t, sg, d)).unwrap_or(false);
        }
        gate.check(&format!("c6-{id}-p7"), ok);
        // the T(-2) value carried by the same eigenvectors
        if let Some(e) = eig.first() {
            direct_eigen_check(&mut gate, &format!("c6-{id}-p2"), e, &tm2, lam2);
        } else {
            gate.check(&format!("c6-{id}-p2"), false);
        }
    }

    // ---- weight (1,7) with character det ----
    let gammas: Vec<VectorForm> = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)]
        .iter()
        .map(|(i, j)| (*cat.form(&format!("gamma{i}{j}")).unwrap()).clone())
        .collect();
    let grefs: Vec<&VectorForm> = gammas.iter().collect();
    let m2 = hecke_matrix(&grefs, &tm2, table).expect("T(-2) on S(1,7) det");
    let eig180 = matrix_eigenspace(&gammas, &m2, &cycpair(180, 0));
    let mut ok = eig180.len() == 2;
    if ok {
        let refs: Vec<&VectorForm> = eig180.iter().collect();
        ok &= isotypic_decompose(&refs)
            .map(|r| r == s4_restriction("s[2,2]").unwrap())
            .unwrap_or(false);
    }
    gate.check("c6-s17det-s22-p2", ok);
    if let Some(e) = eig180.first() {
        direct_eigen_check(&mut gate, "c6-s17det-s22-p7", e, &t7, cycpair(-294, 855));
    } else {
        gate.check("c6-s17det-s22-p7", false);
    }

    // criterion 7: the sign-projector vector generates the lift, whose
    // eigenvalues come from the weight-6 eta product
    let sign_vecs = projector_basis(&gammas, true);
    gate.check("c7-s17det-lift-sign-space", sign_vecs.len() == 1);
    if let Some(lift) = sign_vecs.first() {
        let eta = eta_product_weight6(50);
        for (p, v, op) in [(7usize, v7, &t7), (13, v13, &t13)] {
            let a_p = Cyc::from_int(eta[p]);
            let lam = lift_eigenvalue(LiftKind::Theta, &a_p, 1, 4, &v);
            direct_eigen_check(&mut gate, &format!("c7-s17det-lift-p{p}"), lift, op, lam);
        }
    }

    // ---- weight (1,10) with character det ----
    let mut products = Vec::new();
    for (i, p) in phis.iter().enumerate() {
        for g in &gammas {
            products.push(form_product(&format!("phi{i}{}", g.name), p, g, 3, 0));
        }
    }
    let basis = select_basis(products);
    assert_eq!(basis.len(), 12, "S(1,10) det span should have rank 12");
    let sign_vecs = projector_basis(&basis, true);
    gate.check("c6-s110det-sign-space", sign_vecs.len() == 1);
    if let Some(f) = sign_vecs.first() {
        direct_eigen_check(&mut gate, "c6-s110det-s211-p7", f, &t7, cycpair(-19320, -7497));
        direct_eigen_check(&mut gate, "c6-s110det-s211-p2", f, &tm2, cycpair(-36, 0));
    }

    // ---- weight (1,10) with character det^2 ----
    let psi2 = cat.form("psi2").unwrap();
    direct_eigen_check(&mut gate, "c6-psi2-T(1+3*r)", &psi2, &t7, cycpair(-6549, -17352));
    direct_eigen_check(&mut gate, "c6-psi2-T(-2)", &psi2, &tm2, cycpair(-684, 0));

    // ---- weight (2,5) ----
    let d0 = cat.form("d0").unwrap();
    direct_eigen_check(&mut gate, "c6-d0-T(1+3*r)", &d0, &t7, cycpair(-105, -297));
    direct_eigen_check(&mut gate, "c6-d0-T(-2)", &d0, &tm2, cycpair(-72, 0));
    direct_eigen_check(&mut gate, "c6-d0-T(-5)", &d0, &tm5, cycpair(-810, 0));

    // ---- weight (2,8), trivial character ----
    let ds: Vec<_> = (0..3).map(|i| cat.form(&format!("d{i}")).unwrap()).collect();
    let mut products = Vec::new();
    for (i, p) in phis.iter().enumerate() {
        for (j, d) in ds.iter().enumerate() {
            products.push(form_product(&format!("phi{i}d{j}"), p, d, 3, 0));
        }
    }
    let basis = select_basis(products);
    assert_eq!(basis.len(), 9, "S(2,8) span should have rank 9");
    // the sign projector lands in s[2,1,1] + s[1,1,1,1]; both of its basis
    // vectors turn out to be eigenforms carrying the published eigenvalue
    let sign_vecs = projector_basis(&basis, true);
    gate.check("c6-s28-sign-space", sign_vecs.len() == 2);
    for (i, f) in sign_vecs.iter().enumerate() {
        direct_eigen_check(
            &mut gate,
            &format!("c6-s28-s211-p7-vec{i}"),
            f,
            &t7,
            cycpair(-3039, -765),
        );
    }

    // ---- weight (2,8) with character det^2: K-family products ----
    let k2 = cat.form("k2").unwrap();
    let k5 = cat.form("k5").unwrap();
    let k8 = cat.form("k8").unwrap();
    let mut products = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let pp = phis[i].mul(&phis[j]);
            products.push(form_product(&format!("phi{i}{j}k2"), &pp, &k2, 6, 0));
        }
    }
    for (i, p) in phis.iter().enumerate() {
        products.push(form_product(&format!("phi{i}k5"), p, &k5, 3, 0));
    }
    products.push((*k8).clone());
    let basis = select_basis(products);
    assert_eq!(basis.len(), 10, "M(2,8) det^2 span should have rank 10");
    let refs: Vec<&VectorForm> = basis.iter().collect();
    let m2 = hecke_matrix(&refs, &tm2, table).expect("T(-2) on M(2,8) det^2");
    let eig792 = matrix_eigenspace(&basis, &m2, &cycpair(792, 0));
    gate.check("c6-m28det2-s31-p2", eig792.len() >= 3);
    if let Some(e) = eig792.first() {
        direct_eigen_check(&mut gate, "c6-m28det2-s31-p7", e, &t7, cycpair(-2175, -1602));
    } else {
        gate.check("c6-m28det2-s31-p7", false);
    }

    // ---- weight (3,6) ----
    let span36: Vec<VectorForm> = ["g0", "g1", "g2", "h1", "h2", "j0", "j1", "j2"]
        .iter()
        .map(|n| (*cat.form(n).unwrap()).clone())
        .collect();
    let basis = select_basis(span36);
    assert_eq!(basis.len(), 8, "S(3,6) span should have rank 8");
    let sign_vecs = projector_basis(&basis, true);
    let triv_vecs = projector_basis(&basis, false);
    gate.check(
        "c6-s36-projector-spaces",
        sign_vecs.len() == 1 && triv_vecs.len() == 1,
    );
    if let Some(f) = sign_vecs.first() {
        direct_eigen_check(&mut gate, "c6-s36-s211-p7", f, &t7, cycpair(3189, -459));
        direct_eigen_check(&mut gate, "c6-s36-s211-p2", f, &tm2, cycpair(-36, 0));
    }
    if let Some(f) = triv_vecs.first() {
        direct_eigen_check(&mut gate, "c6-s36-s31-p7", f, &t7, cycpair(273, 2457));
        direct_eigen_check(&mut gate, "c6-s36-s31-p2", f, &tm2, cycpair(-36, 0));
    }

    // ---- criterion 7: closed-form cross-checks ----
    let x1 = VectorForm::scalar("x1", 3, 0, (*cat.scalar("x1").unwrap()).clone());
    let scalar_checks: [(&HeckeOp, Cyc); 4] = [
        (&t7, cycpair(3, 27)),
        (&t13, cycpair(21, -27)),
        (&tm2, cycpair(-9, 0)),
        (&tm5, cycpair(-126, 0)),
    ];
    for (op, expect) in scalar_checks {
        let formula = eisenstein_eigenvalue(0, 3, op);
        gate.check(
            &format!("c7-scalar-weight3-formula-{}", op.label()),
            formula == expect,
        );
        direct_eigen_check(
            &mut gate,
            &format!("c7-scalar-weight3-{}", op.label()),
            &x1,
            op,
            expect,
        );
    }
    for i in 0..4 {
        let e = cat.form(&format!("e33_{i}")).unwrap();
        for op in [&t7, &tm2] {
            let expect = eisenstein_eigenvalue(3, 3, op);
            direct_eigen_check(&mut gate, &format!("c7-e33-{i}-{}", op.label()), &e, op, expect);
        }
    }

    gate.finish();
}

#[test]
fn criterion_8_property_suites() {
    let table = table();
    let cat = Catalog::new(table, W);
    let mut gate = Gate::new();

    // t o m = N(a) id for every cached matrix
    let mut ok = true;
    for (alpha, n) in table.t_mats.keys() {
        ok &= picard_forms::theta::operators::verify_t_m(table, alpha, *n).is_ok();
    }
    gate.check("c8-t-m-identity-all-cached", ok);

    // multiplicativity and commutativity of the m-images
    let pairs = [
        (Eis::SQRT_M3, Eis::new(2, 0)),
        (Eis::SQRT_M3, split_prime(7).unwrap()),
        (split_prime(7).unwrap(), Eis::new(2, 0)),
    ];
    let mut ok = true;
    for (a, b) in pairs {
        let ia = table.m_images(&a).unwrap();
        let ib = table.m_images(&b).unwrap();
        let ab: [Section; 3] = std::array::from_fn(|g| ib[g].substitute(&ia));
        let ba: [Section; 3] = std::array::from_fn(|g| ia[g].substitute(&ib));
        let direct = table.m_images(&(a * b)).unwrap();
        ok &= ab == ba && ab == direct;
    }
    gate.check("c8-m-multiplicativity", ok);

    // divide-mul round trips on catalog series
    let phi0 = cat.scalar("phi0").unwrap();
    let zeta = cat.scalar("zeta").unwrap();
    let p = phi0.mul(&zeta);
    let ok = p.divide(&zeta).map(|q| q.equal_through(&phi0, q.valid_to())).unwrap_or(false);
    let phi1 = cat.scalar("phi1").unwrap();
    let d = phi1.sub(&phi0);
    let p2 = zeta.mul(&d);
    let ok2 = p2.divide(&d).map(|q| q.equal_through(&zeta, q.valid_to())).unwrap_or(false);
    gate.check("c8-divide-mul-round-trip", ok && ok2);

    // determinism of exactification across precisions
    let m192 = {
        let model = picard_forms::theta::bootstrap_model(192, false).unwrap();
        picard_forms::theta::operators::compute_m(&model, &Eis::SQRT_M3).unwrap()
    };
    let m320 = {
        let model = picard_forms::theta::bootstrap_model(320, false).unwrap();
        picard_forms::theta::operators::compute_m(&model, &Eis::SQRT_M3).unwrap()
    };
    gate.check("c8-exactify-determinism", m192 == m320 && m192 == *table.m_images(&Eis::SQRT_M3).as_ref().unwrap());

    // integrality observation: all table entries lie in Z[r][1/3]
    let mut ok = true;
    for img in table.m_prime.values() {
        for s in img {
            for c in s.coeffs.values() {
                ok &= !c.denominator_has_prime_other_than_3();
            }
        }
    }
    for mat in table.t_mats.values() {
        for row in &mat.data {
            for c in row {
                ok &= !c.denominator_has_prime_other_than_3();
            }
        }
    }
    gate.check("c8-entries-in-z-rho-one-third", ok);

    // rank and kernel checks of the module presentations
    let (rc0, rc1, rc2) = (
        cat.scalar("phi0").unwrap(),
        cat.scalar("phi1").unwrap(),
        cat.scalar("phi2").unwrap(),
    );
    let phis: [&FjSeries; 3] = [&rc0, &rc1, &rc2];

    let bigs: Vec<_> = (0..3).map(|i| cat.form(&format!("big_phi{i}")).unwrap()).collect();
    // weight (1, 3k+1) with trivial character: multiplier degree k-2
    let mut ok = true;
    for k in 2..=4i64 {
        let d = (k - 2) as usize;
        let entries: Vec<SpanEntry> = bigs.iter().map(|f| SpanEntry { form: f, degree: d }).collect();
        let rank = rank_of_span(&entries, &phis).unwrap();
        ok &= rank as i64 == dim_formula("s1_det", 1, k, 0).unwrap();
        if k == 3 {
            let (kernel, labels) = kernel_of_span(&entries, &phis).unwrap();
            ok &= kernel.len() == 1;
            let rel = relation_vector(
                &entries,
                &labels,
                &[
                    (0, (1, 0, 0), Cyc::one()),
                    (1, (0, 1, 0), Cyc::one()),
                    (2, (0, 0, 1), Cyc::one()),
                ],
            );
            ok &= kernel_contains(&kernel, &rel);
        }
    }
    gate.check("c8-rank-weight17-family", ok);

    // the det^2 pair is free: rank k^2 in weight (1, 3k+4)
    let psi1 = cat.form("psi1").unwrap();
    let psi2 = cat.form("psi2").unwrap();
    let mut ok = true;
    for k in 1..=3usize {
        let mut entries = vec![SpanEntry { form: &psi1, degree: k - 1 }];
        if k >= 2 {
            entries.push(SpanEntry { form: &psi2, degree: k - 2 });
        }
        let rank = rank_of_span(&entries, &phis).unwrap();
        ok &= rank == k * k;
        let (kernel, _) = kernel_of_span(&entries, &phis).unwrap();
        ok &= kernel.is_empty();
    }
    gate.check("c8-rank-psi-free-module", ok);

    // the weight-(2,5) families are free of rank 3 dim M_d
    let mut ok = true;
    for (names, label) in [(["d0", "d1", "d2"], "d"), (["d0p", "d1p", "d2p"], "dp")] {
        let forms: Vec<_> = names.iter().map(|n| cat.form(n).unwrap()).collect();
        for d in 0..=2usize {
            if label == "dp" && d > 1 {
                continue;
            }
            let entries: Vec<SpanEntry> =
                forms.iter().map(|f| SpanEntry { form: f, degree: d }).collect();
            let rank = rank_of_span(&entries, &phis).unwrap();
            ok &= rank as i64 == dim_formula("s2", 2, d as i64 + 1, 0).unwrap();
        }
    }
    gate.check("c8-rank-weight25-families", ok);

    // K-family: M(2, 2+3k) with character det^2 has dimension (3k^2+3k+2)/2
    let k2 = cat.form("k2").unwrap();
    let k5 = cat.form("k5").unwrap();
    let k8 = cat.form("k8").unwrap();
    let mut ok = true;
    for d in 0..=2usize {
        let mut entries = vec![SpanEntry { form: &k2, degree: d }];
        if d >= 1 {
            entries.push(SpanEntry { form: &k5, degree: d - 1 });
        }
        if d >= 2 {
            entries.push(SpanEntry { form: &k8, degree: d - 2 });
        }
        let rank = rank_of_span(&entries, &phis).unwrap();
        ok &= rank as i64 == dim_formula("m2_det2", 2, d as i64, 2).unwrap();
    }
    gate.check("c8-rank-k-family", ok);

    // the weight-(3,3) family is free of rank 4
    let es: Vec<_> = (0..4).map(|i| cat.form(&format!("e33_{i}")).unwrap()).collect();
    let mut ok = true;
    for d in 0..=1usize {
        let entries: Vec<SpanEntry> = es.iter().map(|f| SpanEntry { form: f, degree: d }).collect();
        let rank = rank_of_span(&entries, &phis).unwrap();
        ok &= rank as i64 == dim_formula("m3", 3, d as i64, 0).unwrap();
        if d == 1 {
            let (kernel, _) = kernel_of_span(&entries, &phis).unwrap();
            ok &= kernel.is_empty();
        }
    }
    gate.check("c8-rank-e33-free", ok);

    // weight (3,6) generators and the published relations
    let gh: Vec<_> = ["g0", "g1", "g2", "h1", "h2", "j0", "j1", "j2"]
        .iter()
        .map(|n| cat.form(n).unwrap())
        .collect();
    let entries: Vec<SpanEntry> = gh.iter().map(|f| SpanEntry { form: f, degree: 0 }).collect();
    let rank0 = rank_of_span(&entries, &phis).unwrap();
    let entries1: Vec<SpanEntry> = gh.iter().map(|f| SpanEntry { form: f, degree: 1 }).collect();
    let rank1 = rank_of_span(&entries1, &phis).unwrap();
    let (kernel1, labels1) = kernel_of_span(&entries1, &phis).unwrap();
    let r4 = relation_vector(
        &entries1,
        &labels1,
        &[
            (0, (1, 0, 0), Cyc::one()),
            (1, (0, 1, 0), Cyc::one()),
            (2, (0, 0, 1), Cyc::one()),
        ],
    );
    let mut ok = rank0 == 8 && rank1 == 20 && kernel1.len() == 4 && kernel_contains(&kernel1, &r4);
    // R5 on the K-quadruple
    let ks: Vec<_> = ["k02", "k12", "k23", "k13"].iter().map(|n| cat.form(n).unwrap()).collect();
    let entries_k: Vec<SpanEntry> = ks.iter().map(|f| SpanEntry { form: f, degree: 1 }).collect();
    let (kernel_k, labels_k) = kernel_of_span(&entries_k, &phis).unwrap();
    let r5 = relation_vector(
        &entries_k,
        &labels_k,
        &[
            (0, (0, 1, 0), Cyc::one()),
            (1, (1, 0, 0), -Cyc::one()),
            (2, (0, 0, 1), -Cyc::one()),
            (2, (1, 0, 0), Cyc::one()),
            (3, (0, 1, 0), Cyc::one()),
            (3, (1, 0, 0), -Cyc::one()),
        ],
    );
    ok &= kernel_contains(&kernel_k, &r5);
    gate.check("c8-rank-weight36-presentation", ok);

    // stabilizer content of the named spans
    let phi_forms: Vec<VectorForm> = (0..3)
        .map(|i| VectorForm::scalar(&format!("phi{i}"), 3, 0, (*cat.scalar(&format!("phi{i}")).unwrap()).clone()))
        .collect();
    let refs: Vec<&VectorForm> = phi_forms.iter().collect();
    let ok1 = isotypic_decompose(&refs).unwrap() == s4_restriction("s[2,1,1]").unwrap();
    let zeta_form = vec![VectorForm::scalar("zeta", 6, 1, (*cat.scalar("zeta").unwrap()).clone())];
    let refs: Vec<&VectorForm> = zeta_form.iter().collect();
    let ok2 = isotypic_decompose(&refs).unwrap() == s4_restriction("s[1,1,1,1]").unwrap();
    let k2_form = vec![(*cat.form("k2").unwrap()).clone()];
    let refs: Vec<&VectorForm> = k2_form.iter().collect();
    let ok3 = isotypic_decompose(&refs).unwrap() == s4_restriction("s[4]").unwrap();
    let big_forms: Vec<VectorForm> = (0..3).map(|i| (*cat.form(&format!("big_phi{i}")).unwrap()).clone()).collect();
    let refs: Vec<&VectorForm> = big_forms.iter().collect();
    let ok4 = isotypic_decompose(&refs).unwrap() == s4_restriction("s[2,1,1]").unwrap();
    let d_forms: Vec<VectorForm> = (0..3).map(|i| (*cat.form(&format!("d{i}")).unwrap()).clone()).collect();
    let refs: Vec<&VectorForm> = d_forms.iter().collect();
    let ok5 = isotypic_decompose(&refs).unwrap() == s4_restriction("s[3,1]").unwrap();
    let e_forms: Vec<VectorForm> = (0..4).map(|i| (*cat.form(&format!("e33_{i}")).unwrap()).clone()).collect();
    let refs: Vec<&VectorForm> = e_forms.iter().collect();
    let (t, s, d) = isotypic_decompose(&refs).unwrap();
    let ok6 = (t, s, d) == (0, 2, 1); // s[2,1,1] + s[1,1,1,1] restricted
    gate.check("c8-isotypic-decompositions", ok1 && ok2 && ok3 && ok4 && ok5 && ok6);

    // cusp flags and the twist transport
    for id in ["cusp_flags", "twist_transport", "restriction_parity", "k2_alternative"] {
        let rep = cat.verify_identity(id).unwrap();
        gate.check(&format!("c8-{id}"), rep.passed());
    }

    // x_i coefficients transform correctly under span analysis:
    // {x2, x3, x4} spans the same 3-space as the phis with the s[2,1,1] content
    let span_products_sanity = {
        let entries: Vec<SpanEntry> = phi_forms.iter().map(|f| SpanEntry { form: f, degree: 0 }).collect();
        let (m, _, _) = span_products(&entries, &phis).unwrap();
        m.rank() == 3
    };
    gate.check("c8-span-products-sanity", span_products_sanity);

    gate.finish();
}
