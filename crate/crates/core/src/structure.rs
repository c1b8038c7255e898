//! Commuting triples, their joint spectrum, tetrablock-contraction certificates and
//! fundamental operators.

use nalgebra::linalg::Schur;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{eval_triple, random_poly, BoundarySamples, Poly3};
use crate::domain::{member, polydisk_worst_point, MembershipStatus, TetraPoint};
use crate::matrix::{
    defect_operator, norm_unchecked, operator_norm, random_gaussian, range_basis,
    restricted_inverse, ComplexMatrix, DEFAULT_RANK_TOL,
};
use crate::{seed, Result, TetraError, C64};

/// Largest pairwise commutator norm accepted by [`CommutingTriple::new`].
pub const COMMUTATION_TOL: f64 = 1e-10;

/// Residual allowed in `D F D = T1 - T2* T3` (and the twin equation).
pub const SOLVE_TOL: f64 = 1e-10;

pub const JOINT_SPECTRUM_TOL: f64 = 1e-8;

const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutingTriple {
    t1: ComplexMatrix,
    t2: ComplexMatrix,
    t3: ComplexMatrix,
    commutation_residual: f64,
}

impl CommutingTriple {
    pub fn new(t1: ComplexMatrix, t2: ComplexMatrix, t3: ComplexMatrix) -> Result<Self> {
        let n = t1.rows();
        for (k, t) in [&t1, &t2, &t3].into_iter().enumerate() {
            if t.rows() != n || t.cols() != n {
                return Err(TetraError::InvalidInput(format!(
                    "T{} is {}x{}, expected {n}x{n}",
                    k + 1,
                    t.rows(),
                    t.cols()
                )));
            }
            if !t.is_finite() {
                return Err(TetraError::InvalidInput(format!(
                    "T{} has non-finite entries",
                    k + 1
                )));
            }
        }
        let residual = [(&t1, &t2), (&t1, &t3), (&t2, &t3)]
            .iter()
            .map(|(a, b)| norm_unchecked(&a.commutator(b)))
            .fold(0.0, f64::max);
        if residual > COMMUTATION_TOL {
            return Err(TetraError::InvalidTriple { residual });
        }
        Ok(Self {
            t1,
            t2,
            t3,
            commutation_residual: residual,
        })
    }

    /// `T_j = [[0, lambda_j], [0, 0]]`.
    pub fn nilpotent_family(lambda: [C64; 3]) -> Self {
        let zero = C64::new(0.0, 0.0);
        let [t1, t2, t3] = lambda.map(|l| ComplexMatrix::from_rows(&[[zero, l], [zero, zero]]));
        Self {
            t1,
            t2,
            t3,
            commutation_residual: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.t1.rows()
    }

    pub fn matrices(&self) -> [&ComplexMatrix; 3] {
        [&self.t1, &self.t2, &self.t3]
    }

    pub fn t1(&self) -> &ComplexMatrix {
        &self.t1
    }

    pub fn t2(&self) -> &ComplexMatrix {
        &self.t2
    }

    pub fn t3(&self) -> &ComplexMatrix {
        &self.t3
    }

    pub fn commutation_residual(&self) -> f64 {
        self.commutation_residual
    }
}

/// Joint eigenvalues of a commuting triple.
///
/// A Schur basis for a random linear combination `c1 T1 + c2 T2 + c3 T3` triangularizes
/// every member of the triple when the combination is generic; the diagonals of the
/// three triangular forms are then read off in matching order. Non-generic draws are
/// detected by a residual below-diagonal part and retried with a fresh combination,
/// up to five times. Repeated points (within `tol`) are reported once.
pub fn joint_spectrum(t: &CommutingTriple, tol: f64) -> Result<Vec<TetraPoint>> {
    let n = t.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mats = t.matrices();
    let mut worst = f64::INFINITY;
    for attempt in 0..5u64 {
        let mut rng = seed::rng(seed::derive(0x6a6f_696e_7473_7063, attempt));
        let coeffs: [C64; 3] = std::array::from_fn(|_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let mut combo = ComplexMatrix::zeros(n, n);
        for (c, m) in coeffs.iter().zip(mats) {
            combo = &combo + &m.scale(*c);
        }
        let Some(schur) = Schur::try_new(combo.to_dmatrix(), f64::EPSILON, 10_000) else {
            continue;
        };
        let (q, _) = schur.unpack();
        let q = ComplexMatrix::from_dmatrix(&q);
        let qh = q.adjoint();
        let tri: Vec<ComplexMatrix> = mats.iter().map(|m| qh.matmul(m).matmul(&q)).collect();
        let below = tri
            .iter()
            .zip(mats)
            .map(|(b, m)| {
                let mut low = 0.0_f64;
                for i in 0..n {
                    for j in 0..i {
                        low = low.max(b[(i, j)].norm());
                    }
                }
                low / norm_unchecked(m).max(1.0)
            })
            .fold(0.0, f64::max);
        worst = worst.min(below);
        if below > tol {
            continue;
        }
        let mut points: Vec<TetraPoint> = Vec::new();
        for i in 0..n {
            let p = TetraPoint::new(tri[0][(i, i)], tri[1][(i, i)], tri[2][(i, i)]);
            if !points.iter().any(|q| q.distance(&p) <= tol) {
                points.push(p);
            }
        }
        return Ok(points);
    }
    Err(TetraError::NumericalDegeneracy(format!(
        "could not simultaneously triangularize the triple (best residual {worst:e})"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    NotCertified,
    StatisticalPass,
    StatisticalFail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMethod {
    SchwarzPath,
    Sampling,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub method: CertMethod,
    pub details: Vec<Metric>,
    pub seed: u64,
}

impl CertificationReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.details
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.value)
    }

    pub fn is_positive(&self) -> bool {
        matches!(self.verdict, Verdict::Certified | Verdict::StatisticalPass)
    }
}

fn metric(name: &str, value: f64) -> Metric {
    Metric {
        name: name.to_owned(),
        value,
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Torus grid used to confirm that the polydisk of radius `r` sits inside E.
const POLYDISK_CHECK_GRID: usize = 24;

/// Deterministic certificate for `T_j = [[0, lambda_j], [0, 0]]`.
///
/// The joint spectrum is `{0}`. For `f` bounded by 1 on E, `f(T) = f(0) I + b E12` with
/// `b = sum_j lambda_j df/dz_j(0)`; the polydisk of radius `r` inside E gives
/// `r sum_j |df/dz_j(0)| <= 1 - |f(0)|^2`, so `0 < |lambda_j| < r` bounds `|b|` by
/// `(max_j |lambda_j| / r)(1 - |f(0)|^2)`. A Blaschke factor moves `f(0)` to 0 and von
/// Neumann's inequality for the single contraction `(B o f)(T)` brings the bound back.
///
/// The report is `certified` iff `r` is in `(0, 1)`, the radius-`r` polydisk is
/// confirmed inside E, and `0 < |lambda_j| < r` for all `j`.
pub fn certify_nilpotent_family(lambda: [C64; 3], r: f64) -> CertificationReport {
    let moduli = lambda.map(|l| l.norm());
    let mut details = vec![
        metric("lambda1_modulus", moduli[0]),
        metric("lambda2_modulus", moduli[1]),
        metric("lambda3_modulus", moduli[2]),
        metric("r", r),
    ];
    let r_ok = r > 0.0 && r < 1.0;
    let polydisk_excess = if r_ok {
        polydisk_worst_point(r, POLYDISK_CHECK_GRID).excess
    } else {
        f64::INFINITY
    };
    let triple = CommutingTriple::nilpotent_family(lambda);
    let spectrum_ok = joint_spectrum(&triple, JOINT_SPECTRUM_TOL)
        .map(|pts| {
            pts.iter().all(|p| {
                member(p, MEMBERSHIP_TOL).is_ok_and(|v| v.status != MembershipStatus::Outside)
            })
        })
        .unwrap_or(false);
    let positive = moduli.iter().all(|&m| m > 0.0);
    let below_r = moduli.iter().all(|&m| m < r);
    let max_mod = moduli.iter().copied().fold(0.0, f64::max);
    details.extend([
        metric("polydisk_excess", polydisk_excess.min(f64::MAX)),
        metric("spectrum_in_closure", flag(spectrum_ok)),
        metric("moduli_positive", flag(positive)),
        metric("moduli_below_r", flag(below_r)),
        metric("schwarz_gain", if r_ok { max_mod / r } else { f64::MAX }),
        metric("moduli_gap_12", (moduli[0] - moduli[1]).abs()),
    ]);
    let certified = r_ok && polydisk_excess < 0.0 && spectrum_ok && positive && below_r;
    CertificationReport {
        verdict: if certified {
            Verdict::Certified
        } else {
            Verdict::NotCertified
        },
        method: CertMethod::SchwarzPath,
        details,
        seed: 0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingParams {
    pub npolys: usize,
    pub degree: u32,
    pub nsamples: usize,
    pub slack: f64,
    /// Extra polynomials checked after the random ones.
    #[serde(skip)]
    pub probes: Vec<Poly3>,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            npolys: 200,
            degree: 4,
            nsamples: 2000,
            slack: 5e-2,
            probes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplingOutcome {
    pub report: CertificationReport,
    pub max_ratio: f64,
    /// Polynomial attaining `max_ratio` when it exceeds `1 + slack`.
    pub failing_polynomial: Option<Poly3>,
}

/// Statistical spot check of `||f(T)|| <= sup_{E} |f|` over random polynomials.
///
/// Sup norms are sampled lower estimates, so a genuine tetrablock contraction can show
/// ratios slightly above 1; the check fails only above `1 + slack`. A pass is evidence,
/// not a proof.
pub fn certify_sampling(
    t: &CommutingTriple,
    params: &SamplingParams,
    seed: u64,
) -> Result<SamplingOutcome> {
    for p in joint_spectrum(t, JOINT_SPECTRUM_TOL)? {
        if member(&p, MEMBERSHIP_TOL)?.status == MembershipStatus::Outside {
            return Err(TetraError::Precondition(format!(
                "joint spectrum point {p:?} lies outside the closed tetrablock"
            )));
        }
    }
    let samples = BoundarySamples::new(params.nsamples.max(1), seed::substream(seed, "boundary"));
    let poly_root = seed::substream(seed, "polys");
    let total = params.npolys + params.probes.len();
    let ratio_of = |k: usize| -> (f64, usize) {
        let owned;
        let f = if k < params.npolys {
            owned = random_poly(params.degree, seed::derive(poly_root, k as u64));
            &owned
        } else {
            &params.probes[k - params.npolys]
        };
        let value = norm_unchecked(&eval_triple(f, t));
        let sup = samples.sup_norm(f);
        let ratio = if sup > 0.0 {
            value / sup
        } else if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        (ratio, k)
    };
    let ratios: Vec<(f64, usize)> = (0..total).into_par_iter().map(ratio_of).collect();
    let (max_ratio, arg) =
        ratios
            .iter()
            .copied()
            .fold((0.0, usize::MAX), |a, b| if b.0 > a.0 { b } else { a });
    let limit = 1.0 + params.slack;
    let failures = ratios.iter().filter(|r| r.0 > limit).count();
    let pass = failures == 0;
    let failing_polynomial = (!pass).then(|| {
        if arg < params.npolys {
            random_poly(params.degree, seed::derive(poly_root, arg as u64))
        } else {
            params.probes[arg - params.npolys].clone()
        }
    });
    let report = CertificationReport {
        verdict: if pass {
            Verdict::StatisticalPass
        } else {
            Verdict::StatisticalFail
        },
        method: CertMethod::Sampling,
        details: vec![
            metric("max_ratio", max_ratio),
            metric("failures", failures as f64),
            metric("npolys", params.npolys as f64),
            metric("probes", params.probes.len() as f64),
            metric("degree", f64::from(params.degree)),
            metric("nsamples", params.nsamples as f64),
            metric("slack", params.slack),
        ],
        seed,
    };
    Ok(SamplingOutcome {
        report,
        max_ratio,
        failing_polynomial,
    })
}

/// Fundamental operators of a triple, stored as full-size matrices that vanish off
/// the defect space of `T3`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FundamentalPair {
    pub f1: ComplexMatrix,
    pub f2: ComplexMatrix,
    /// `D = (I - T3* T3)^{1/2}`
    pub defect: ComplexMatrix,
    /// Orthogonal projection onto the closed range of `D`.
    pub defect_projector: ComplexMatrix,
    /// Orthonormal basis of the defect space, one column per dimension.
    #[serde(skip)]
    pub defect_basis: ComplexMatrix,
    pub solve_residual: f64,
}

impl FundamentalPair {
    pub fn defect_dim(&self) -> usize {
        self.defect_basis.cols()
    }

    /// `Q* X Q` for an operator `X` on H, `Q` the defect basis.
    pub fn compress(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.defect_basis
            .adjoint()
            .matmul(x)
            .matmul(&self.defect_basis)
    }

    pub fn f1_on_defect(&self) -> ComplexMatrix {
        self.compress(&self.f1)
    }

    pub fn f2_on_defect(&self) -> ComplexMatrix {
        self.compress(&self.f2)
    }

    /// `D` as a map from H onto the defect space, in defect-basis coordinates.
    pub fn defect_map(&self) -> ComplexMatrix {
        self.defect_basis.adjoint().matmul(&self.defect)
    }
}

/// Solves `T1 - T2* T3 = D F1 D` and `T2 - T1* T3 = D F2 D` on the defect space of `T3`.
pub fn fundamental_operators(t: &CommutingTriple) -> Result<FundamentalPair> {
    let d = defect_operator(t.t3())?;
    let d_plus = restricted_inverse(&d, DEFAULT_RANK_TOL);
    let a1 = t.t1() - &t.t2().adjoint().matmul(t.t3());
    let a2 = t.t2() - &t.t1().adjoint().matmul(t.t3());
    let f1 = d_plus.matmul(&a1).matmul(&d_plus);
    let f2 = d_plus.matmul(&a2).matmul(&d_plus);
    let residual = operator_norm(&(&d.matmul(&f1).matmul(&d) - &a1))?
        .max(operator_norm(&(&d.matmul(&f2).matmul(&d) - &a2))?);
    if residual > SOLVE_TOL {
        return Err(TetraError::NotTetrablockCompatible { residual });
    }
    let projector = d_plus.matmul(&d);
    let projector = (&projector + &projector.adjoint()).scale(C64::new(0.5, 0.0));
    Ok(FundamentalPair {
        f1,
        f2,
        defect_basis: range_basis(&d, DEFAULT_RANK_TOL),
        defect: d,
        defect_projector: projector,
        solve_residual: residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Commutator {
    pub matrix: ComplexMatrix,
    pub norm: f64,
}

/// `F1 F2 - F2 F1` and its operator norm.
pub fn commutator(p: &FundamentalPair) -> Commutator {
    let matrix = p.f1.commutator(&p.f2);
    let norm = norm_unchecked(&matrix);
    Commutator { matrix, norm }
}

/// Closed forms of `F1`, `F2` for the nilpotent family:
/// `F1 = [[0, l1/s], [0, -conj(l2) l3 / s^2]]`, `F2 = [[0, l2/s], [0, -conj(l1) l3 / s^2]]`,
/// `s = sqrt(1 - |l3|^2)`.
pub fn nilpotent_fundamental_closed_form(lambda: [C64; 3]) -> (ComplexMatrix, ComplexMatrix) {
    let [l1, l2, l3] = lambda;
    let s2 = 1.0 - l3.norm_sqr();
    let s = s2.sqrt();
    let zero = C64::new(0.0, 0.0);
    let f1 = ComplexMatrix::from_rows(&[[zero, l1 / s], [zero, -l2.conj() * l3 / s2]]);
    let f2 = ComplexMatrix::from_rows(&[[zero, l2 / s], [zero, -l1.conj() * l3 / s2]]);
    (f1, f2)
}

/// `||[F1, F2]|| = ||l1|^2 - |l2|^2| |l3| / (1 - |l3|^2)^{3/2}` for the nilpotent family.
pub fn nilpotent_commutator_norm(lambda: [C64; 3]) -> f64 {
    let [l1, l2, l3] = lambda;
    (l1.norm_sqr() - l2.norm_sqr()).abs() * l3.norm() / (1.0 - l3.norm_sqr()).powf(1.5)
}

/// A random commuting triple `(A, p(A), q(A))` with `A` scaled to norm `scale`; used by
/// tests and benches.
pub fn random_commuting_triple(dim: usize, scale: f64, seed: u64) -> CommutingTriple {
    let a = random_gaussian(dim, dim, seed::derive(seed, 0));
    let a = a.scale(C64::new(scale / norm_unchecked(&a), 0.0));
    let mut rng = seed::rng(seed::derive(seed, 1));
    let mut coef = || C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    let (p1, p2, q1, q2) = (coef(), coef(), coef(), coef());
    let id = ComplexMatrix::identity(dim);
    let a2 = a.matmul(&a);
    let t2 = &(&id.scale(p1) + &a.scale(p2)) + &a2.scale(C64::new(0.3, 0.0));
    let t3 = &(&id.scale(q1) + &a.scale(q2)) - &a2.scale(C64::new(0.2, 0.0));
    CommutingTriple::new(a, t2, t3).expect("polynomials in one matrix commute")
}
