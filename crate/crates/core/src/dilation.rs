//! Truncated block Toeplitz dilations of a tetrablock contraction.
//!
//! The dilation space is `H (+) l2(D)`, `D` the defect space of `T3`, cut down to
//! `H (+) D^N`. Each operator has the block lower-triangular form
//!
//! ```text
//! V_j = [ T_j   0       ]
//!       [ C_j   T_phi_j ]
//! ```
//!
//! with `T_phi` the analytic block Toeplitz matrix of a polynomial symbol: the
//! coefficient of `z^k` sits on the `k`-th block subdiagonal. Finite sections of
//! analytic Toeplitz matrices multiply exactly, so products and the `(1, 1)` block are
//! unaffected by truncation. Identities that involve adjoints (`V3* V3 = I`,
//! `V1 = V2* V3`) fail only in the last block columns and are checked on a leading
//! interior section.

use serde::Serialize;

use crate::calculus::exponents_up_to;
use crate::matrix::{norm_unchecked, ComplexMatrix};
use crate::structure::{CommutingTriple, FundamentalPair};
use crate::{Result, TetraError};

/// Tolerance for the endpoint conditions on extended symbols.
pub const SYMBOL_TOL: f64 = 1e-12;

/// Polynomial symbol with operator coefficients on the defect space; index = power of z.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToeplitzSymbol {
    pub coefficients: Vec<ComplexMatrix>,
}

impl ToeplitzSymbol {
    pub fn new(coefficients: Vec<ComplexMatrix>) -> Result<Self> {
        if let Some(first) = coefficients.first() {
            let k = first.rows();
            if coefficients.iter().any(|c| c.rows() != k || c.cols() != k) {
                return Err(TetraError::InvalidInput(
                    "symbol coefficients must be square and of equal size".into(),
                ));
            }
        }
        Ok(Self { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coefficient(&self, k: usize, dim: usize) -> ComplexMatrix {
        self.coefficients
            .get(k)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(dim, dim))
    }

    /// Finite section on `depth` block coordinates.
    pub fn toeplitz_section(&self, dim: usize, depth: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(dim * depth, dim * depth);
        for (k, c) in self.coefficients.iter().enumerate() {
            for col in 0..depth.saturating_sub(k) {
                out.set_block((col + k) * dim, col * dim, c);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedDilation {
    pub depth: usize,
    pub h_dim: usize,
    pub defect_dim: usize,
    /// 1-based block position of `D` in the column `C3`.
    pub slot: usize,
    /// `phi3 = z^power I`.
    pub power: usize,
    pub v1: ComplexMatrix,
    pub v2: ComplexMatrix,
    pub v3: ComplexMatrix,
    pub symbols: [ToeplitzSymbol; 3],
    /// Conditions the construction is known to depend on but does not verify.
    pub unchecked_conditions: Vec<String>,
}

impl TruncatedDilation {
    pub fn size(&self) -> usize {
        self.h_dim + self.depth * self.defect_dim
    }

    pub fn operators(&self) -> [&ComplexMatrix; 3] {
        [&self.v1, &self.v2, &self.v3]
    }
}

/// Column operator `H -> D^depth` with `entry` in block `slot` (0-based).
fn column(entry: &ComplexMatrix, slot: usize, depth: usize) -> ComplexMatrix {
    let (k, h) = (entry.rows(), entry.cols());
    let mut c = ComplexMatrix::zeros(k * depth, h);
    c.set_block(slot * k, 0, entry);
    c
}

fn assemble(t: &ComplexMatrix, c: &ComplexMatrix, toeplitz: &ComplexMatrix) -> ComplexMatrix {
    let h = t.rows();
    let n = h + toeplitz.rows();
    let mut v = ComplexMatrix::zeros(n, n);
    v.set_block(0, 0, t);
    v.set_block(h, 0, c);
    v.set_block(h, h, toeplitz);
    v
}

fn check_pair(t: &CommutingTriple, p: &FundamentalPair) -> Result<()> {
    let n = t.dim();
    if p.f1.rows() != n || p.f2.rows() != n || p.defect.rows() != n {
        return Err(TetraError::InvalidInput(format!(
            "fundamental pair acts on dimension {}, triple on {n}",
            p.f1.rows()
        )));
    }
    Ok(())
}

struct Parts {
    f1: ComplexMatrix,
    f2: ComplexMatrix,
    d: ComplexMatrix,
    k: usize,
}

fn parts(p: &FundamentalPair) -> Parts {
    Parts {
        f1: p.f1_on_defect(),
        f2: p.f2_on_defect(),
        d: p.defect_map(),
        k: p.defect_dim(),
    }
}

fn build(
    t: &CommutingTriple,
    parts: &Parts,
    symbols: [ToeplitzSymbol; 3],
    power: usize,
    depth: usize,
    slot: usize,
    unchecked_conditions: Vec<String>,
) -> TruncatedDilation {
    let Parts { f1, f2, d, k } = parts;
    let columns = [
        column(&f2.adjoint().matmul(d), 0, depth),
        column(&f1.adjoint().matmul(d), 0, depth),
        column(d, slot - 1, depth),
    ];
    let [v1, v2, v3] = [0, 1, 2].map(|j| {
        assemble(
            t.matrices()[j],
            &columns[j],
            &symbols[j].toeplitz_section(*k, depth),
        )
    });
    TruncatedDilation {
        depth,
        h_dim: t.dim(),
        defect_dim: *k,
        slot,
        power,
        v1,
        v2,
        v3,
        symbols,
        unchecked_conditions,
    }
}

/// The tuple with `phi1 = F1 + F2* z`, `phi2 = F2 + F1* z`, `phi3 = z`,
/// `C1 = (F2* D, 0, ...)`, `C2 = (F1* D, 0, ...)` and `D` in block `slot` of `C3`.
///
/// With `slot = 1` the `(1, 1)` block of `V2* V3` is `T2* T3 + D F1 D = T1`.
pub fn build_theorem_b(
    t: &CommutingTriple,
    p: &FundamentalPair,
    depth: usize,
    slot: usize,
) -> Result<TruncatedDilation> {
    check_pair(t, p)?;
    if depth < 2 {
        return Err(TetraError::InvalidParameter(
            "depth must be at least 2".into(),
        ));
    }
    if slot == 0 || slot > depth {
        return Err(TetraError::InvalidParameter(format!(
            "slot must lie in 1..={depth}, got {slot}"
        )));
    }
    let parts = parts(p);
    let k = parts.k;
    let symbols = [
        ToeplitzSymbol::new(vec![parts.f1.clone(), parts.f2.adjoint()])?,
        ToeplitzSymbol::new(vec![parts.f2.clone(), parts.f1.adjoint()])?,
        ToeplitzSymbol::new(vec![ComplexMatrix::zeros(k, k), ComplexMatrix::identity(k)])?,
    ];
    Ok(build(t, &parts, symbols, 1, depth, slot, Vec::new()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtendedForm {
    /// `phi3 = z^2`, `phi1 = F1 + Xi z + F2* z^2`, `phi2 = F2 + Xi* z + F1* z^2`.
    Square,
    /// `phi3 = z^n`, `phi1 = F1 + Xi z + F2* z^n`, `phi2 = F2 + Xi* z^{n-1} + F1* z^n`.
    General { n: usize },
}

const XI_CAVEAT: &str =
    "relations among the middle symbol coefficients (conditions on Xi) are not verified";

/// Dilation with `phi3 = z^n`. `xi` is given on H (it is compressed to the defect
/// space). Only the endpoint conditions on the symbols are enforced.
pub fn build_extended(
    t: &CommutingTriple,
    p: &FundamentalPair,
    xi: &ComplexMatrix,
    depth: usize,
    form: ExtendedForm,
) -> Result<TruncatedDilation> {
    check_pair(t, p)?;
    let n = match form {
        ExtendedForm::Square => 2,
        ExtendedForm::General { n } => n,
    };
    if n < 1 {
        return Err(TetraError::InvalidParameter(
            "power n must be at least 1".into(),
        ));
    }
    if xi.rows() != t.dim() || xi.cols() != t.dim() {
        return Err(TetraError::InvalidInput(format!(
            "Xi must be {0}x{0}, got {1}x{2}",
            t.dim(),
            xi.rows(),
            xi.cols()
        )));
    }
    let pr = parts(p);
    let k = pr.k;
    let xi = p.compress(xi);
    let mut c1 = vec![ComplexMatrix::zeros(k, k); n + 1];
    let mut c2 = vec![ComplexMatrix::zeros(k, k); n + 1];
    c1[0] = pr.f1.clone();
    c2[0] = pr.f2.clone();
    if n >= 2 {
        c1[1] = &c1[1] + &xi;
        c2[n - 1] = &c2[n - 1] + &xi.adjoint();
    }
    c1[n] = &c1[n] + &pr.f2.adjoint();
    c2[n] = &c2[n] + &pr.f1.adjoint();
    build_from_symbols(
        t,
        p,
        ToeplitzSymbol::new(c1)?,
        ToeplitzSymbol::new(c2)?,
        n,
        depth,
    )
}

/// Assembles a dilation from arbitrary symbols `phi1`, `phi2` (coefficients on the
/// defect space) with `phi3 = z^n`, after checking
/// `phi1(0) = F1`, `phi2(0) = F2` and that the `z^n` coefficients are `F2*`, `F1*`.
pub fn build_from_symbols(
    t: &CommutingTriple,
    p: &FundamentalPair,
    phi1: ToeplitzSymbol,
    phi2: ToeplitzSymbol,
    n: usize,
    depth: usize,
) -> Result<TruncatedDilation> {
    check_pair(t, p)?;
    if depth < n + 2 {
        return Err(TetraError::InvalidParameter(format!(
            "depth must be at least n + 2 = {}",
            n + 2
        )));
    }
    let pr = parts(p);
    let k = pr.k;
    for (name, s) in [("phi1", &phi1), ("phi2", &phi2)] {
        if s.degree() > n {
            return Err(TetraError::InvalidSymbol(format!(
                "{name} has degree {} > {n}",
                s.degree()
            )));
        }
        if s.coefficients.iter().any(|c| c.rows() != k) {
            return Err(TetraError::InvalidSymbol(format!(
                "{name} coefficients must act on the {k}-dimensional defect space"
            )));
        }
    }
    let endpoint = |got: ComplexMatrix, want: &ComplexMatrix, what: &str| -> Result<()> {
        let err = norm_unchecked(&(&got - want));
        if err > SYMBOL_TOL {
            return Err(TetraError::InvalidSymbol(format!(
                "{what} (mismatch {err:e})"
            )));
        }
        Ok(())
    };
    endpoint(phi1.coefficient(0, k), &pr.f1, "phi1(0) must equal F1")?;
    endpoint(phi2.coefficient(0, k), &pr.f2, "phi2(0) must equal F2")?;
    endpoint(
        phi2.coefficient(n, k).adjoint(),
        &pr.f1,
        "top coefficient of phi2 must be F1*",
    )?;
    endpoint(
        phi1.coefficient(n, k).adjoint(),
        &pr.f2,
        "top coefficient of phi1 must be F2*",
    )?;
    let mut phi3 = vec![ComplexMatrix::zeros(k, k); n + 1];
    phi3[n] = ComplexMatrix::identity(k);
    let symbols = [phi1, phi2, ToeplitzSymbol::new(phi3)?];
    Ok(build(
        t,
        &pr,
        symbols,
        n,
        depth,
        1,
        vec![XI_CAVEAT.to_owned()],
    ))
}

/// `max_j || V_j*|_H - T_j* ||`, with `V_j*|_H` taken as a map into the full space.
pub fn verify_coinvariance(d: &TruncatedDilation, t: &CommutingTriple) -> f64 {
    let h = d.h_dim;
    d.operators()
        .iter()
        .zip(t.matrices())
        .map(|(v, tj)| {
            let restricted = v.adjoint().block(0, 0, d.size(), h);
            let mut want = ComplexMatrix::zeros(d.size(), h);
            want.set_block(0, 0, &tj.adjoint());
            norm_unchecked(&(&restricted - &want))
        })
        .fold(0.0, f64::max)
}

/// `max || P_H m(V)|_H - m(T) ||` over monomials `m = z1^i z2^j z3^k`, `i + j + k <= maxdeg`.
pub fn verify_compression(d: &TruncatedDilation, t: &CommutingTriple, maxdeg: u32) -> f64 {
    let h = d.h_dim;
    let vp: Vec<Vec<ComplexMatrix>> = d
        .operators()
        .iter()
        .map(|v| (0..=maxdeg).map(|e| v.powi(e)).collect())
        .collect();
    let tp: Vec<Vec<ComplexMatrix>> = t
        .matrices()
        .iter()
        .map(|m| (0..=maxdeg).map(|e| m.powi(e)).collect())
        .collect();
    exponents_up_to(maxdeg)
        .iter()
        .map(|e| {
            let [i, j, k] = e.map(|x| x as usize);
            let mv = vp[0][i].matmul(&vp[1][j]).matmul(&vp[2][k]);
            let mt = tp[0][i].matmul(&tp[1][j]).matmul(&tp[2][k]);
            norm_unchecked(&(&mv.leading(h) - &mt))
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsometryResiduals {
    pub isometry_interior: f64,
    pub commutation_interior: f64,
    pub v1_eq_v2star_v3_interior: f64,
    pub v2_norm: f64,
}

/// Algebraic tetrablock-isometry conditions on the leading section
/// `H (+) D^interior_depth`: `V3* V3 = I`, pairwise commutation, `V1 = V2* V3`; plus
/// `||V2||` on the full truncation.
pub fn verify_isometry_conditions(
    d: &TruncatedDilation,
    interior_depth: usize,
) -> Result<IsometryResiduals> {
    if interior_depth == 0 || interior_depth + d.power + 1 > d.depth {
        return Err(TetraError::InvalidParameter(format!(
            "interior depth must lie in 1..={} for depth {} and phi3 = z^{}",
            d.depth.saturating_sub(d.power + 1),
            d.depth,
            d.power
        )));
    }
    let m = d.h_dim + interior_depth * d.defect_dim;
    let sec = |x: &ComplexMatrix| norm_unchecked(&x.leading(m));
    let iso = &d.v3.adjoint().matmul(&d.v3) - &ComplexMatrix::identity(d.size());
    let [v1, v2, v3] = d.operators();
    let commutation = [(v1, v2), (v1, v3), (v2, v3)]
        .iter()
        .map(|(a, b)| sec(&a.commutator(b)))
        .fold(0.0, f64::max);
    let v1_gap = v1 - &v2.adjoint().matmul(v3);
    Ok(IsometryResiduals {
        isometry_interior: sec(&iso),
        commutation_interior: commutation,
        v1_eq_v2star_v3_interior: sec(&v1_gap),
        v2_norm: norm_unchecked(v2),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub coinvariance: f64,
    pub compression_maxdeg: f64,
    pub isometry_interior: f64,
    pub commutation_interior: f64,
    pub v1_eq_v2star_v3_interior: f64,
    pub v2_norm: f64,
}

pub fn residual_report(
    d: &TruncatedDilation,
    t: &CommutingTriple,
    maxdeg: u32,
    interior_depth: usize,
) -> Result<ResidualReport> {
    let iso = verify_isometry_conditions(d, interior_depth)?;
    Ok(ResidualReport {
        coinvariance: verify_coinvariance(d, t),
        compression_maxdeg: verify_compression(d, t, maxdeg),
        isometry_interior: iso.isometry_interior,
        commutation_interior: iso.commutation_interior,
        v1_eq_v2star_v3_interior: iso.v1_eq_v2star_v3_interior,
        v2_norm: iso.v2_norm,
    })
}

/// `(1, 1)` block of `V2* V3`; equals `T2* T3 + D F1 D` when `slot = 1`.
pub fn v2star_v3_corner(d: &TruncatedDilation) -> ComplexMatrix {
    d.v2.adjoint().matmul(&d.v3).leading(d.h_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::structure::fundamental_operators;

    fn family(a: f64, b: f64, c: f64) -> (CommutingTriple, FundamentalPair) {
        let t = CommutingTriple::nilpotent_family([c64(a, 0.0), c64(b, 0.0), c64(c, 0.0)]);
        let p = fundamental_operators(&t).unwrap();
        (t, p)
    }

    #[test]
    fn toeplitz_section_layout() {
        let a = ComplexMatrix::identity(1);
        let b = ComplexMatrix::identity(1).scale(c64(2.0, 0.0));
        let s = ToeplitzSymbol::new(vec![a, b]).unwrap();
        let m = s.toeplitz_section(1, 3);
        let want =
            ComplexMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [0.0, 2.0, 1.0]]);
        assert_eq!(m, want);
    }

    #[test]
    fn v3_truncation_is_isometric_except_last_block() {
        let (t, p) = family(0.1, 0.1, 0.15);
        let d = build_theorem_b(&t, &p, 6, 1).unwrap();
        let g = &d.v3.adjoint().matmul(&d.v3) - &ComplexMatrix::identity(d.size());
        let keep = d.h_dim + 5 * d.defect_dim;
        assert!(norm_unchecked(&g.leading(keep)) < 1e-12);
        assert!(norm_unchecked(&g) > 0.5);
    }

    #[test]
    fn corner_blocks_are_the_triple() {
        let (t, p) = family(0.2, 0.1, 0.15);
        for slot in [1, 2] {
            let d = build_theorem_b(&t, &p, 5, slot).unwrap();
            for (v, tj) in d.operators().iter().zip(t.matrices()) {
                assert_eq!(&v.leading(2), tj);
            }
        }
    }

    #[test]
    fn empty_defect_collapses_to_triple() {
        let u = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let t2 = ComplexMatrix::from_real_rows(&[[0.3, 0.1], [0.1, 0.3]]);
        let t1 = t2.adjoint().matmul(&u);
        let t = CommutingTriple::new(t1, t2, u).unwrap();
        let p = fundamental_operators(&t).unwrap();
        for depth in [2, 7] {
            let d = build_theorem_b(&t, &p, depth, 1).unwrap();
            assert_eq!(d.size(), 2);
            for (v, tj) in d.operators().iter().zip(t.matrices()) {
                assert_eq!(*v, tj);
            }
        }
    }

    #[test]
    fn coinvariance_is_exact_and_detects_perturbation() {
        let (t, p) = family(0.2, 0.1, 0.15);
        let mut d = build_theorem_b(&t, &p, 4, 1).unwrap();
        assert!(verify_coinvariance(&d, &t) <= 1e-12);
        let eps = 1e-3;
        let mut e = ComplexMatrix::zeros(2, d.size() - 2);
        e[(0, 0)] = c64(eps, 0.0);
        d.v1.set_block(0, 2, &e);
        assert!((verify_coinvariance(&d, &t) - eps).abs() < 1e-15);
    }

    #[test]
    fn compression_is_exact_and_detects_perturbation() {
        let (t, p) = family(0.2, 0.1, 0.15);
        let mut d = build_theorem_b(&t, &p, 4, 1).unwrap();
        assert!(verify_compression(&d, &t, 1) <= 1e-12);
        assert!(verify_compression(&d, &t, 3) <= 1e-12);
        let eps = 1e-4;
        let shifted = t.t1() + &ComplexMatrix::identity(2).scale(c64(eps, 0.0));
        d.v1.set_block(0, 0, &shifted);
        let r = verify_compression(&d, &t, 3);
        assert!((r - eps).abs() <= 1e-9, "{r}");
    }

    #[test]
    fn toeplitz_tuple_for_commuting_pair() {
        let (t, p) = family(0.1, 0.1, 0.15);
        let d = build_theorem_b(&t, &p, 8, 1).unwrap();
        let r = verify_isometry_conditions(&d, 5).unwrap();
        assert!(r.isometry_interior <= 1e-12);
        assert!(r.commutation_interior <= 1e-10);
        assert!(r.v1_eq_v2star_v3_interior <= 1e-10);
        assert!(r.v2_norm <= 1.0 + 1e-10);
    }

    #[test]
    fn toeplitz_tuple_fails_to_commute_for_counterexample() {
        let (t, p) = family(0.2, 0.1, 0.15);
        let d = build_theorem_b(&t, &p, 8, 1).unwrap();
        let r = verify_isometry_conditions(&d, 5).unwrap();
        assert!(r.commutation_interior >= 1e-4);
        // V1 = V2* V3 does not need commuting F's.
        assert!(r.v1_eq_v2star_v3_interior <= 1e-10);
    }

    #[test]
    fn corner_of_v2star_v3_decomposes_into_fundamental_equation() {
        let (t, p) = family(0.2, 0.1, 0.15);
        let d = build_theorem_b(&t, &p, 6, 1).unwrap();
        let want = &t.t2().adjoint().matmul(t.t3()) + &p.defect.matmul(&p.f1).matmul(&p.defect);
        let corner = v2star_v3_corner(&d);
        assert!(norm_unchecked(&(&corner - &want)) <= 1e-12);
        assert!(norm_unchecked(&(&corner - t.t1())) <= 1e-12);
        // Printed second-slot placement loses the D F1 D term.
        let d2 = build_theorem_b(&t, &p, 6, 2).unwrap();
        let r = verify_isometry_conditions(&d2, 3).unwrap();
        assert!(r.v1_eq_v2star_v3_interior > 1e-3);
    }

    #[test]
    fn interior_depth_bounds() {
        let (t, p) = family(0.1, 0.1, 0.15);
        let d = build_theorem_b(&t, &p, 6, 1).unwrap();
        assert!(verify_isometry_conditions(&d, 5).is_err());
        assert!(verify_isometry_conditions(&d, 0).is_err());
        assert!(verify_isometry_conditions(&d, 4).is_ok());
        assert!(build_theorem_b(&t, &p, 1, 1).is_err());
        assert!(build_theorem_b(&t, &p, 4, 5).is_err());
    }

    #[test]
    fn extended_square_form() {
        let (t, p) = family(0.1, 0.1, 0.15);
        let d =
            build_extended(&t, &p, &ComplexMatrix::zeros(2, 2), 7, ExtendedForm::Square).unwrap();
        assert_eq!(d.power, 2);
        assert_eq!(d.unchecked_conditions.len(), 1);
        assert!(verify_coinvariance(&d, &t) <= 1e-12);
        assert!(verify_compression(&d, &t, 3) <= 1e-12);
        let r = verify_isometry_conditions(&d, 4).unwrap();
        assert!(r.isometry_interior <= 1e-12);
    }

    #[test]
    fn extended_general_n_symbols() {
        let (t, p) = family(0.1, 0.1, 0.15);
        let d = build_extended(
            &t,
            &p,
            &ComplexMatrix::zeros(2, 2),
            6,
            ExtendedForm::General { n: 3 },
        )
        .unwrap();
        let f1 = p.f1_on_defect();
        let f2 = p.f2_on_defect();
        let s1 = &d.symbols[0].coefficients;
        let s2 = &d.symbols[1].coefficients;
        assert_eq!(s1.len(), 4);
        assert_eq!(s1[0], f1);
        assert_eq!(s1[3], f2.adjoint());
        assert_eq!(s2[0], f2);
        assert_eq!(s2[3], f1.adjoint());
        for k in 1..3 {
            assert_eq!(s1[k].max_abs(), 0.0);
            assert_eq!(s2[k].max_abs(), 0.0);
        }
        assert!(build_extended(
            &t,
            &p,
            &ComplexMatrix::zeros(2, 2),
            4,
            ExtendedForm::General { n: 3 }
        )
        .is_err());
    }

    #[test]
    fn injected_symbol_mismatch_rejected() {
        let (t, p) = family(0.1, 0.1, 0.15);
        let k = p.defect_dim();
        let bad0 = &p.f1_on_defect() + &ComplexMatrix::identity(k).scale(c64(1e-3, 0.0));
        let phi1 = ToeplitzSymbol::new(vec![
            bad0,
            ComplexMatrix::zeros(k, k),
            p.f2_on_defect().adjoint(),
        ])
        .unwrap();
        let phi2 = ToeplitzSymbol::new(vec![
            p.f2_on_defect(),
            ComplexMatrix::zeros(k, k),
            p.f1_on_defect().adjoint(),
        ])
        .unwrap();
        let err = build_from_symbols(&t, &p, phi1, phi2, 2, 6).unwrap_err();
        assert!(matches!(err, TetraError::InvalidSymbol(_)));
    }
}
