//! End-to-end reproduction of a tetrablock contraction with non-commuting fundamental
//! operators.
//!
//! For `T_j = [[0, lambda_j], [0, 0]]` with `0 < |lambda_j| < r` (`r` the inscribed
//! polydisk radius) and `|lambda1| != |lambda2|`, the triple is a tetrablock contraction
//! while `[F1, F2] != 0`, so no dilation of the block Toeplitz form built in
//! [`crate::dilation`] can be a commuting tuple.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dilation::{build_theorem_b, verify_isometry_conditions};
use crate::domain::inscribed_polydisk_radius;
use crate::matrix::ComplexMatrix;
use crate::structure::{
    certify_nilpotent_family, commutator, fundamental_operators, nilpotent_commutator_norm,
    nilpotent_fundamental_closed_form, CertificationReport, CommutingTriple, FundamentalPair,
    Verdict,
};
use crate::{seed, Result, TetraError, C64};

/// Agreement required between computed and closed-form values.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// Seeded draws with `||lambda1| - |lambda2|| below this are redrawn.
pub const MIN_MODULUS_GAP: f64 = 1e-6;

/// Lower bound on the block Toeplitz commutation residual expected for every record.
pub const NONCOMMUTING_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// `lambda` must satisfy `|lambda_j| < r - margin`.
    pub margin: f64,
    pub radius_tol: f64,
    pub dilation_depth: usize,
    pub interior_depth: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            margin: 1e-3,
            radius_tol: 1e-6,
            dilation_depth: 8,
            interior_depth: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaSource {
    Explicit([C64; 3]),
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleRecord {
    pub lambda: [C64; 3],
    pub r_used: f64,
    pub certification: CertificationReport,
    pub fundamental: FundamentalPair,
    pub commutator_norm: f64,
    pub theorem_b_commutation_interior: f64,
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    config: PipelineConfig,
    radius: f64,
}

impl Pipeline {
    /// Computes the inscribed radius once at `config.radius_tol`.
    pub fn new(config: PipelineConfig) -> Result<Self> {
        if !(config.radius_tol > 0.0 && config.radius_tol < 1e-2) {
            return Err(TetraError::InvalidParameter(format!(
                "radius tolerance must lie in (0, 1e-2), got {}",
                config.radius_tol
            )));
        }
        let radius = inscribed_polydisk_radius(config.radius_tol);
        Self::with_radius(config, radius)
    }

    /// Uses a previously computed radius.
    pub fn with_radius(config: PipelineConfig, radius: f64) -> Result<Self> {
        if !(config.margin >= 0.0 && config.margin < radius && radius < 1.0) {
            return Err(TetraError::InvalidParameter(format!(
                "need 0 <= margin < r < 1, got margin {} and r {radius}",
                config.margin
            )));
        }
        if config.dilation_depth < 2 || config.interior_depth + 2 > config.dilation_depth {
            return Err(TetraError::InvalidParameter(format!(
                "need 1 <= interior depth <= depth - 2, got {} and {}",
                config.interior_depth, config.dilation_depth
            )));
        }
        Ok(Self { config, radius })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Strict upper bound on `|lambda_j|`.
    pub fn admissible_bound(&self) -> f64 {
        self.radius - self.config.margin
    }

    /// Checks the three hypotheses on an explicit `lambda`.
    pub fn check_hypotheses(&self, lambda: &[C64; 3]) -> Result<()> {
        let bound = self.admissible_bound();
        for (j, l) in lambda.iter().enumerate() {
            let m = l.norm();
            if !m.is_finite() {
                return Err(TetraError::InvalidInput(format!(
                    "lambda{} is not finite",
                    j + 1
                )));
            }
            if m <= 0.0 {
                return Err(TetraError::ConstraintViolation(format!(
                    "hypothesis 0 < |lambda{}| violated",
                    j + 1
                )));
            }
            if m >= bound {
                return Err(TetraError::ConstraintViolation(format!(
                    "hypothesis |lambda{}| < r - margin = {bound} violated (|lambda{}| = {m})",
                    j + 1,
                    j + 1
                )));
            }
        }
        if lambda[0].norm() == lambda[1].norm() {
            return Err(TetraError::ConstraintViolation(
                "hypothesis |lambda1| != |lambda2| violated".into(),
            ));
        }
        Ok(())
    }

    /// Area-uniform draw from `{0 < |z| < r - margin}^3` with
    /// `||lambda1| - |lambda2|| >= MIN_MODULUS_GAP`.
    pub fn sample_lambda(&self, seed: u64) -> [C64; 3] {
        let bound = self.admissible_bound();
        let mut rng = seed::rng(seed);
        loop {
            let lambda: [C64; 3] = std::array::from_fn(|_| {
                let u: f64 = rng.random();
                let th: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                C64::from_polar(bound * u.sqrt(), th)
            });
            let ok = lambda.iter().all(|l| l.norm() > 0.0 && l.norm() < bound)
                && (lambda[0].norm() - lambda[1].norm()).abs() >= MIN_MODULUS_GAP;
            if ok {
                return lambda;
            }
        }
    }

    pub fn generate(&self, source: LambdaSource) -> Result<CounterexampleRecord> {
        let lambda = match source {
            LambdaSource::Explicit(l) => l,
            LambdaSource::Seeded(s) => self.sample_lambda(s),
        };
        self.check_hypotheses(&lambda)?;

        let certification = certify_nilpotent_family(lambda, self.radius);
        if certification.verdict != Verdict::Certified {
            return Err(TetraError::InternalInconsistency(format!(
                "admissible lambda {lambda:?} was not certified"
            )));
        }
        let triple = CommutingTriple::nilpotent_family(lambda);
        let fundamental = fundamental_operators(&triple)?;
        let (c1, c2) = nilpotent_fundamental_closed_form(lambda);
        let entry_err = (&fundamental.f1 - &c1)
            .max_abs()
            .max((&fundamental.f2 - &c2).max_abs());
        let commutator_norm = commutator(&fundamental).norm;
        let closed = nilpotent_commutator_norm(lambda);
        if entry_err > CLOSED_FORM_TOL || (commutator_norm - closed).abs() > CLOSED_FORM_TOL {
            return Err(TetraError::InternalInconsistency(format!(
                "fundamental operators differ from the closed form (entries {entry_err:e}, \
                 commutator {commutator_norm} vs {closed})"
            )));
        }
        let dilation = build_theorem_b(&triple, &fundamental, self.config.dilation_depth, 1)?;
        let theorem_b_commutation_interior =
            verify_isometry_conditions(&dilation, self.config.interior_depth)?.commutation_interior;
        Ok(CounterexampleRecord {
            lambda,
            r_used: self.radius,
            certification,
            fundamental,
            commutator_norm,
            theorem_b_commutation_interior,
        })
    }

    /// One seeded record per `derive(seed, i)`, `i < count`, in index order.
    pub fn generate_batch(&self, seed: u64, count: usize) -> Vec<Result<CounterexampleRecord>> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.generate(LambdaSource::Seeded(seed::derive(seed, i))))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub moduli_positive: bool,
    pub moduli_below_r: bool,
    pub moduli_distinct: bool,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.moduli_positive && self.moduli_below_r && self.moduli_distinct
    }
}

pub const DILATION_NOTE: &str = "The triple has a tetrablock unitary dilation, but no explicit \
dilation tuple is constructed here. The block Toeplitz tuple built from F1, F2 fails to \
commute, as reported by theorem_b_commutation_interior.";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub lambda: [C64; 3],
    pub r_used: f64,
    pub hypotheses: Hypotheses,
    pub certificate: CertificationReport,
    pub f1: ComplexMatrix,
    pub f2: ComplexMatrix,
    pub commutator: ComplexMatrix,
    pub commutator_norm: f64,
    pub closed_form_commutator_norm: f64,
    pub theorem_b_commutation_interior: f64,
    pub dilation_constructed: bool,
    pub note: String,
    pub summary: String,
}

/// Summarizes a record, re-checking its invariants.
pub fn certify_report(rec: &CounterexampleRecord) -> Result<CounterexampleReport> {
    let violation = |msg: String| Err(TetraError::InvariantViolation(msg));
    if rec.certification.verdict != Verdict::Certified {
        return violation("certification verdict is not certified".into());
    }
    if rec.commutator_norm.is_nan() || rec.commutator_norm <= 0.0 {
        return violation(format!(
            "commutator norm {} is not positive",
            rec.commutator_norm
        ));
    }
    let comm = commutator(&rec.fundamental);
    if (comm.norm - rec.commutator_norm).abs() > CLOSED_FORM_TOL {
        return violation(format!(
            "stored commutator norm {} disagrees with recomputed {}",
            rec.commutator_norm, comm.norm
        ));
    }
    let closed = nilpotent_commutator_norm(rec.lambda);
    if (closed - rec.commutator_norm).abs() > CLOSED_FORM_TOL {
        return violation(format!(
            "commutator norm {} disagrees with closed form {closed}",
            rec.commutator_norm
        ));
    }
    let residual = rec.theorem_b_commutation_interior;
    if residual.is_nan() || residual <= NONCOMMUTING_FLOOR {
        return violation(format!(
            "block Toeplitz tuple commutes to {}",
            rec.theorem_b_commutation_interior
        ));
    }
    let moduli = rec.lambda.map(|l| l.norm());
    let hypotheses = Hypotheses {
        moduli_positive: moduli.iter().all(|&m| m > 0.0),
        moduli_below_r: moduli.iter().all(|&m| m < rec.r_used),
        moduli_distinct: moduli[0] != moduli[1],
    };
    if !hypotheses.all() {
        return violation(format!("hypotheses fail for lambda {:?}", rec.lambda));
    }
    let summary = format!(
        "lambda = ({}, {}, {}) with r = {:.9}: certified tetrablock contraction; \
         ||[F1, F2]|| = {:.9e} (closed form {:.9e}); block Toeplitz commutation residual {:.3e}",
        fmt_c(rec.lambda[0]),
        fmt_c(rec.lambda[1]),
        fmt_c(rec.lambda[2]),
        rec.r_used,
        rec.commutator_norm,
        closed,
        rec.theorem_b_commutation_interior
    );
    Ok(CounterexampleReport {
        lambda: rec.lambda,
        r_used: rec.r_used,
        hypotheses,
        certificate: rec.certification.clone(),
        f1: rec.fundamental.f1.clone(),
        f2: rec.fundamental.f2.clone(),
        commutator: comm.matrix,
        commutator_norm: rec.commutator_norm,
        closed_form_commutator_norm: closed,
        theorem_b_commutation_interior: rec.theorem_b_commutation_interior,
        dilation_constructed: false,
        note: DILATION_NOTE.to_owned(),
        summary,
    })
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Max entrywise gap between the solver's `F1`, `F2` and the closed forms.
pub fn closed_form_gap(lambda: [C64; 3]) -> Result<f64> {
    let p = fundamental_operators(&CommutingTriple::nilpotent_family(lambda))?;
    let (c1, c2) = nilpotent_fundamental_closed_form(lambda);
    Ok((&p.f1 - &c1).max_abs().max((&p.f2 - &c2).max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    const R: f64 = 0.3333;

    fn pipeline() -> Pipeline {
        Pipeline::with_radius(PipelineConfig::default(), R).unwrap()
    }

    fn lam(a: f64, b: f64, c: f64) -> [C64; 3] {
        [c64(a, 0.0), c64(b, 0.0), c64(c, 0.0)]
    }

    #[test]
    fn reference_record() {
        let rec = pipeline()
            .generate(LambdaSource::Explicit(lam(0.2, 0.1, 0.15)))
            .unwrap();
        assert!(
            (rec.commutator_norm - 0.004_656_3).abs() < 1e-7,
            "{}",
            rec.commutator_norm
        );
        assert!(rec.theorem_b_commutation_interior > 1e-4);
        let report = certify_report(&rec).unwrap();
        assert!(report.hypotheses.all());
        assert!(!report.dilation_constructed);
    }

    #[test]
    fn hypotheses_are_named() {
        let p = pipeline();
        let err = p
            .generate(LambdaSource::Explicit(lam(0.1, 0.1, 0.15)))
            .unwrap_err();
        assert!(
            matches!(&err, TetraError::ConstraintViolation(m) if m.contains("|lambda1| != |lambda2|"))
        );
        let err = p
            .generate(LambdaSource::Explicit(lam(0.4, 0.1, 0.15)))
            .unwrap_err();
        assert!(matches!(&err, TetraError::ConstraintViolation(m) if m.contains("|lambda1| < r")));
        let err = p
            .generate(LambdaSource::Explicit(lam(0.2, 0.1, 0.0)))
            .unwrap_err();
        assert!(matches!(&err, TetraError::ConstraintViolation(m) if m.contains("0 < |lambda3|")));
    }

    #[test]
    fn tampered_record_rejected() {
        let mut rec = pipeline()
            .generate(LambdaSource::Explicit(lam(0.2, 0.1, 0.15)))
            .unwrap();
        rec.commutator_norm = 0.0;
        assert!(matches!(
            certify_report(&rec),
            Err(TetraError::InvariantViolation(_))
        ));
    }

    #[test]
    fn seeded_batch() {
        let p = pipeline();
        let recs = p.generate_batch(7, 50);
        assert_eq!(recs.len(), 50);
        for r in recs {
            let r = r.unwrap();
            assert!(r.commutator_norm > 0.0);
            assert!(r.lambda.iter().all(|l| l.norm() < p.admissible_bound()));
            certify_report(&r).unwrap();
        }
        let again = p
            .generate(LambdaSource::Seeded(seed::derive(7, 3)))
            .unwrap();
        assert_eq!(again, p.generate_batch(7, 4).pop().unwrap().unwrap());
    }

    #[test]
    fn closed_form_gap_is_tiny() {
        assert!(closed_form_gap(lam(0.2, 0.1, 0.15)).unwrap() <= 1e-12);
    }
}
