//! Geometry of the tetrablock.
//!
//! A point `(x1, x2, x3)` lies in E when some 2x2 matrix `A` with `||A|| < 1` has
//! `a11 = x1`, `a22 = x2`, `det A = x3`. Two independent tests are run on every query:
//!
//! - the scalar criterion `|x1 - conj(x2) x3| + |x2 - conj(x1) x3| < 1 - |x3|^2`;
//! - a witness search over `A(t) = [[x1, t], [p/t, x2]]`, `p = x1 x2 - x3`, `t > 0`.
//!
//! Conjugating by a diagonal unitary rotates the phase of `a12` freely, so the family
//! `A(t)` reaches the smallest norm among all matrices with the prescribed diagonal
//! and determinant. `||A(t)||` is unimodal in `log t`.

use rayon::prelude::*;
use serde::Serialize;

use crate::matrix::{operator_norm_2x2, random_unitary, ComplexMatrix};
use crate::optim::{golden_section, nelder_mead};
use crate::{seed, Result, TetraError, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TetraPoint {
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
}

impl TetraPoint {
    pub fn new(x1: C64, x2: C64, x3: C64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn real(x1: f64, x2: f64, x3: f64) -> Self {
        Self::new(C64::new(x1, 0.0), C64::new(x2, 0.0), C64::new(x3, 0.0))
    }

    /// `(a11, a22, det A)` of a 2x2 matrix.
    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        assert_eq!((a.rows(), a.cols()), (2, 2));
        Self::new(
            a[(0, 0)],
            a[(1, 1)],
            a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        )
    }

    pub fn coords(&self) -> [C64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|z| z.is_finite())
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.x2, self.x1, self.x3)
    }

    pub fn distance(&self, other: &TetraPoint) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipStatus {
    Interior,
    ClosureBoundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    /// `1 - min ||A||` over matrices realizing the point.
    pub margin: f64,
    /// A minimal-norm realizing matrix; absent for points outside the closure.
    pub witness: Option<ComplexMatrix>,
    /// `1 - |x3|^2 - |x1 - conj(x2) x3| - |x2 - conj(x1) x3|`.
    pub scalar_slack: f64,
}

/// Slack of the scalar criterion; positive exactly on E.
pub fn scalar_slack(p: &TetraPoint) -> f64 {
    let TetraPoint { x1, x2, x3 } = *p;
    1.0 - x3.norm_sqr() - (x1 - x2.conj() * x3).norm() - (x2 - x1.conj() * x3).norm()
}

fn scalar_in_open(p: &TetraPoint) -> bool {
    p.x3.norm() < 1.0 && scalar_slack(p) > 0.0
}

fn scalar_in_closure(p: &TetraPoint) -> bool {
    p.x1.norm() <= 1.0 && p.x2.norm() <= 1.0 && p.x3.norm() <= 1.0 && scalar_slack(p) >= 0.0
}

/// Smallest operator norm of a 2x2 matrix with diagonal `(x1, x2)` and determinant
/// `x3`, together with a matrix attaining it.
pub fn minimal_witness(p: &TetraPoint) -> (f64, ComplexMatrix) {
    let TetraPoint { x1, x2, x3 } = *p;
    let prod = x1 * x2 - x3;
    if prod.norm() == 0.0 {
        let w = ComplexMatrix::from_rows(&[[x1, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), x2]]);
        return (x1.norm().max(x2.norm()), w);
    }
    let norm_at = |s: f64| {
        let t = s.exp();
        operator_norm_2x2(x1, C64::new(t, 0.0), prod / t, x2)
    };
    let (s, norm) = golden_section(-45.0, 45.0, 1e-14, norm_at);
    let t = s.exp();
    let w = ComplexMatrix::from_rows(&[[x1, C64::new(t, 0.0)], [prod / t, x2]]);
    (norm, w)
}

/// Classifies `p` against E, its closure and the exterior.
///
/// Points with `|margin| <= tol` are reported as on the boundary. Outside that band the
/// scalar criterion must agree with the witness search; a disagreement is returned as
/// [`TetraError::InternalInconsistency`].
pub fn member(p: &TetraPoint, tol: f64) -> Result<MembershipVerdict> {
    if !p.is_finite() {
        return Err(TetraError::InvalidInput("non-finite point".into()));
    }
    let (min_norm, witness) = minimal_witness(p);
    let margin = 1.0 - min_norm;
    let status = if margin > tol {
        MembershipStatus::Interior
    } else if margin >= -tol {
        MembershipStatus::ClosureBoundary
    } else {
        MembershipStatus::Outside
    };
    let agrees = match status {
        MembershipStatus::Interior => scalar_in_open(p),
        MembershipStatus::Outside => !scalar_in_closure(p),
        MembershipStatus::ClosureBoundary => true,
    };
    if !agrees {
        return Err(TetraError::InternalInconsistency(format!(
            "membership oracles disagree at {p:?}: witness margin {margin:e}, scalar slack {:e}",
            scalar_slack(p)
        )));
    }
    Ok(MembershipVerdict {
        status,
        margin,
        witness: (status != MembershipStatus::Outside).then_some(witness),
        scalar_slack: scalar_slack(p),
    })
}

/// Whether `p` is in the closure of E with `||x3| - 1| <= tol`.
pub fn on_distinguished_boundary(p: &TetraPoint, tol: f64) -> Result<bool> {
    if (p.x3.norm() - 1.0).abs() > tol {
        return Ok(false);
    }
    Ok(member(p, tol)?.status != MembershipStatus::Outside)
}

/// `(u11, u22, det U)` for Haar-random 2x2 unitaries; sample `i` uses
/// `seed::derive(seed, i)`, so a shorter run is a prefix of a longer one.
pub fn sample_distinguished_boundary(n: usize, seed: u64) -> Vec<TetraPoint> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| TetraPoint::from_matrix(&random_unitary(2, seed::derive(seed, i))))
        .collect()
}

/// Phase grid size for the torus scan in [`inscribed_polydisk_radius`].
pub const TORUS_GRID: usize = 48;

fn torus_point(r: f64, phases: &[f64; 3]) -> TetraPoint {
    TetraPoint::new(
        C64::from_polar(r, phases[0]),
        C64::from_polar(r, phases[1]),
        C64::from_polar(r, phases[2]),
    )
}

/// Worst point of the torus `{|x1| = |x2| = |x3| = r}` for the scalar criterion.
#[derive(Clone, Debug, Serialize)]
pub struct PolydiskProbe {
    pub radius: f64,
    pub point: TetraPoint,
    pub phases: [f64; 3],
    /// `-scalar_slack` at the worst point; the closed polydisk of radius `r` lies in E
    /// iff this is negative.
    pub excess: f64,
}

/// Scans a `grid^3` phase grid on the torus of radius `r`, then refines the worst grid
/// point with Nelder-Mead.
///
/// The scalar slack is separately convex in `(x1, x2)` and in `x3`, so its minimum over
/// the closed polydisk is attained on the torus.
pub fn polydisk_worst_point(r: f64, grid: usize) -> PolydiskProbe {
    let step = std::f64::consts::TAU / grid as f64;
    let circle: Vec<C64> = (0..grid)
        .map(|k| C64::from_polar(r, k as f64 * step))
        .collect();
    let (mut best_idx, mut best) = ([0usize; 3], f64::NEG_INFINITY);
    for (a, &x1) in circle.iter().enumerate() {
        for (b, &x2) in circle.iter().enumerate() {
            for (c, &x3) in circle.iter().enumerate() {
                let e = -scalar_slack(&TetraPoint::new(x1, x2, x3));
                if e > best {
                    best = e;
                    best_idx = [a, b, c];
                }
            }
        }
    }
    let start = best_idx.map(|k| k as f64 * step);
    let (refined, neg) = nelder_mead(start, 0.5 * step, 400, 1e-16, |ph| {
        scalar_slack(&torus_point(r, ph))
    });
    let (phases, excess) = if -neg > best {
        (refined, -neg)
    } else {
        (start, best)
    };
    PolydiskProbe {
        radius: r,
        point: torus_point(r, &phases),
        phases,
        excess,
    }
}

/// Supremum of the radii `r` with `r * closed(D^3)` inside E, to within `tol`.
///
/// Bisection on `r` over `[0, 1]`; each step asks [`polydisk_worst_point`] whether the
/// torus of that radius clears the boundary. The lower end of the final bracket is
/// returned, so the result is itself a radius that was confirmed inside E.
pub fn inscribed_polydisk_radius(tol: f64) -> f64 {
    assert!(tol > 0.0 && tol < 1e-2, "tolerance must lie in (0, 1e-2)");
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if polydisk_worst_point(mid, TORUS_GRID).excess < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn origin_is_interior() {
        let v = member(&TetraPoint::real(0.0, 0.0, 0.0), 1e-9).unwrap();
        assert_eq!(v.status, MembershipStatus::Interior);
        assert!((v.margin - 1.0).abs() < 1e-12);
        assert!(v.witness.is_some());
    }

    #[test]
    fn unit_determinant_point_is_boundary_with_rotation_witness() {
        let v = member(&TetraPoint::real(0.0, 0.0, 1.0), 1e-9).unwrap();
        assert_eq!(v.status, MembershipStatus::ClosureBoundary);
        let w = v.witness.unwrap();
        let want = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        assert!((&w - &want).max_abs() < 1e-10);
    }

    #[test]
    fn large_diagonal_point_is_outside() {
        let p = TetraPoint::real(0.9, 0.9, 0.0);
        let v = member(&p, 1e-9).unwrap();
        assert_eq!(v.status, MembershipStatus::Outside);
        // Independent check: minimal norm from the eigenvalues of A(t)*A(t) at the
        // optimum t^2 = |p|, where ||A||_F^2 is smallest.
        let (n, _) = minimal_witness(&p);
        assert!(n >= 1.8 - 1e-12, "{n}");
        assert!(v.witness.is_none());
    }

    #[test]
    fn minimal_norm_has_closed_form() {
        // ||A(t)||^2 = (F + sqrt(F^2 - 4|x3|^2)) / 2 with F = |x1|^2 + |x2|^2 + t^2 + |p|^2/t^2,
        // minimized at t^2 = |p|.
        let mut rng = seed::rng(77);
        use rand::Rng;
        for _ in 0..200 {
            let mut z = || c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let p = TetraPoint::new(z(), z(), z());
            let prod = (p.x1 * p.x2 - p.x3).norm();
            let f = p.x1.norm_sqr() + p.x2.norm_sqr() + 2.0 * prod;
            let want = ((f + (f * f - 4.0 * p.x3.norm_sqr()).max(0.0).sqrt()) / 2.0).sqrt();
            let (got, _) = minimal_witness(&p);
            assert!((got - want).abs() < 1e-7 * want.max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn interior_witness_reproduces_point() {
        let p = TetraPoint::new(c64(0.2, 0.1), c64(-0.3, 0.05), c64(0.1, -0.2));
        let v = member(&p, 1e-9).unwrap();
        assert_eq!(v.status, MembershipStatus::Interior);
        let w = v.witness.unwrap();
        assert!(TetraPoint::from_matrix(&w).distance(&p) < 1e-10);
        assert!(crate::matrix::operator_norm(&w).unwrap() < 1.0);
    }

    #[test]
    fn non_finite_point_rejected() {
        let p = TetraPoint::new(c64(f64::NAN, 0.0), c64(0.0, 0.0), c64(0.0, 0.0));
        assert!(matches!(member(&p, 1e-9), Err(TetraError::InvalidInput(_))));
    }

    #[test]
    fn distinguished_boundary_examples() {
        assert!(on_distinguished_boundary(&TetraPoint::real(0.0, 0.0, 1.0), 1e-10).unwrap());
        assert!(!on_distinguished_boundary(&TetraPoint::real(0.0, 0.0, 0.0), 1e-10).unwrap());
        // |x3| = 1 but outside the closure
        assert!(!on_distinguished_boundary(&TetraPoint::real(0.5, 0.0, 1.0), 1e-10).unwrap());
        for s in 0..50 {
            let u = random_unitary(2, s);
            assert!(on_distinguished_boundary(&TetraPoint::from_matrix(&u), 1e-10).unwrap());
        }
    }

    #[test]
    fn boundary_samples() {
        let pts = sample_distinguished_boundary(100, 9);
        assert_eq!(pts.len(), 100);
        for p in &pts {
            assert!((p.x3.norm() - 1.0).abs() <= 1e-10);
            assert!(on_distinguished_boundary(p, 1e-10).unwrap());
        }
        assert_eq!(pts[..40], sample_distinguished_boundary(40, 9)[..]);
    }

    #[test]
    fn boundary_samples_reach_unit_modulus_in_first_coordinate() {
        let pts = sample_distinguished_boundary(10_000, 1);
        let sup = pts.iter().map(|p| p.x1.norm()).fold(0.0, f64::max);
        assert!(sup >= 0.99, "{sup}");
    }

    #[test]
    fn radius_rejects_one_half_with_outside_witness() {
        let probe = polydisk_worst_point(0.5, TORUS_GRID);
        assert!(probe.excess > 0.0);
        let p = TetraPoint::real(0.5, -0.5, 0.5);
        assert_eq!(member(&p, 1e-9).unwrap().status, MembershipStatus::Outside);
    }

    #[test]
    fn radius_is_one_third() {
        let r = inscribed_polydisk_radius(1e-6);
        assert!((r - 1.0 / 3.0).abs() <= 1e-6, "{r}");
        // Spot check inside: 10^5 = 47^3-ish grid points at r - tol.
        let probe = polydisk_worst_point(r - 1e-6, 47);
        assert!(probe.excess < 0.0);
    }
}
