//! Trivariate polynomial calculus.
//!
//! [`Poly3`] is a sparse map from exponent triples to complex coefficients. It is
//! evaluated at points of C^3 and on commuting matrix triples, differentiated
//! formally, and measured against the distinguished boundary and the tridisk.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::domain::{sample_distinguished_boundary, TetraPoint};
use crate::matrix::ComplexMatrix;
use crate::optim::nelder_mead;
use crate::structure::CommutingTriple;
use crate::{seed, Result, TetraError, C64};

pub type Exponent = [u32; 3];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly3 {
    terms: BTreeMap<Exponent, C64>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn monomial(c: C64, exp: Exponent) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    /// The coordinate function `z_{var+1}`, `var` in `0..3`.
    pub fn coordinate(var: usize) -> Self {
        let mut exp = [0; 3];
        exp[var] = 1;
        Self::monomial(ONE, exp)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated exponents
    /// are summed. Non-finite coefficients are rejected.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, C64)>) -> Result<Self> {
        let mut p = Self::zero();
        for (e, c) in terms {
            if !c.is_finite() {
                return Err(TetraError::InvalidInput(format!(
                    "non-finite coefficient for exponent {e:?}"
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Exponent, c: C64) {
        let slot = self.terms.entry(exp).or_insert(ZERO);
        *slot += c;
        if *slot == ZERO {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: Exponent) -> C64 {
        self.terms.get(&exp).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn max_exponents(&self) -> [u32; 3] {
        self.terms.keys().fold([0; 3], |m, e| {
            [m[0].max(e[0]), m[1].max(e[1]), m[2].max(e[2])]
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = Self::zero();
        for (&e, &c) in &self.terms {
            p.add_term(e, c * s);
        }
        p
    }

    pub fn add(&self, other: &Poly3) -> Self {
        let mut p = self.clone();
        for (&e, &c) in &other.terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn mul(&self, other: &Poly3) -> Self {
        let mut p = Self::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                p.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        p
    }

    /// Formal partial derivative in `z_{var+1}`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut p = Self::zero();
        for (&e, &c) in &self.terms {
            if e[var] > 0 {
                let mut d = e;
                d[var] -= 1;
                p.add_term(d, c * f64::from(e[var]));
            }
        }
        p
    }

    /// Sum of `|c| * exponent[var]` over terms: bounds `|d f / d theta_var|` on the torus.
    fn phase_lipschitz(&self, var: usize) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.norm() * f64::from(e[var]))
            .sum()
    }
}

impl Serialize for Poly3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            exp: Exponent,
            coef: [f64; 2],
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (&exp, c) in &self.terms {
            seq.serialize_element(&Term {
                exp,
                coef: [c.re, c.im],
            })?;
        }
        seq.end()
    }
}

fn powers(x: C64, max: u32) -> Vec<C64> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut acc = ONE;
    for _ in 0..=max {
        out.push(acc);
        acc *= x;
    }
    out
}

/// Flattened copy of a polynomial for repeated point evaluation.
struct Flat {
    terms: Vec<([usize; 3], C64)>,
    max: [u32; 3],
}

/// Power tables up to this exponent live on the stack.
const STACK_POWERS: usize = 16;

impl Flat {
    fn new(f: &Poly3) -> Self {
        Self {
            terms: f
                .terms
                .iter()
                .map(|(e, &c)| (e.map(|x| x as usize), c))
                .collect(),
            max: f.max_exponents(),
        }
    }

    fn eval(&self, p: &TetraPoint) -> C64 {
        if self.max.iter().all(|&m| (m as usize) < STACK_POWERS) {
            let mut pw = [[ONE; STACK_POWERS]; 3];
            for (v, x) in p.coords().into_iter().enumerate() {
                for k in 1..=self.max[v] as usize {
                    pw[v][k] = pw[v][k - 1] * x;
                }
            }
            self.terms
                .iter()
                .map(|(e, c)| c * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]])
                .sum()
        } else {
            let pw = [
                powers(p.x1, self.max[0]),
                powers(p.x2, self.max[1]),
                powers(p.x3, self.max[2]),
            ];
            self.terms
                .iter()
                .map(|(e, c)| c * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]])
                .sum()
        }
    }
}

/// Value of `f` at `p`.
pub fn eval_point(f: &Poly3, p: &TetraPoint) -> C64 {
    Flat::new(f).eval(p)
}

/// `f(T1, T2, T3)` for a commuting triple.
pub fn eval_triple(f: &Poly3, t: &CommutingTriple) -> ComplexMatrix {
    let n = t.dim();
    let m = f.max_exponents();
    let mats = t.matrices();
    let pw: Vec<Vec<ComplexMatrix>> = (0..3)
        .map(|v| {
            let mut list = vec![ComplexMatrix::identity(n)];
            for k in 0..m[v] as usize {
                let next = list[k].matmul(mats[v]);
                list.push(next);
            }
            list
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for (e, &c) in &f.terms {
        let term = pw[0][e[0] as usize]
            .matmul(&pw[1][e[1] as usize])
            .matmul(&pw[2][e[2] as usize]);
        out = &out + &term.scale(c);
    }
    out
}

/// `(df/dz1, df/dz2, df/dz3)` at `p`.
pub fn gradient(f: &Poly3, p: &TetraPoint) -> [C64; 3] {
    [0, 1, 2].map(|v| eval_point(&f.derivative(v), p))
}

/// All exponents of total degree `<= degree`, in lexicographic order.
pub fn exponents_up_to(degree: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for i in 0..=degree {
        for j in 0..=degree - i {
            for k in 0..=degree - i - j {
                out.push([i, j, k]);
            }
        }
    }
    out
}

/// Random polynomial of total degree `<= degree`: complex Gaussian coefficients
/// scaled by `1 / (1 + total degree)`.
pub fn random_poly(degree: u32, seed: u64) -> Poly3 {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = seed::rng(seed);
    let mut p = Poly3::zero();
    for e in exponents_up_to(degree) {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let w = 1.0 / f64::from(1 + e.iter().sum::<u32>());
        p.add_term(e, C64::new(re, im) * (w * std::f64::consts::FRAC_1_SQRT_2));
    }
    p
}

/// Distinguished-boundary point with parameters `(u, beta, phi)`:
/// `a = cos(u) e^{i beta}`, `x1 = e^{i phi} a`, `x2 = e^{i phi} conj(a)`, `x3 = e^{2 i phi}`.
fn boundary_point(params: &[f64; 3]) -> TetraPoint {
    let a = C64::from_polar(params[0].cos(), params[1]);
    let w = C64::from_polar(1.0, params[2]);
    TetraPoint::new(w * a, w * a.conj(), C64::from_polar(1.0, 2.0 * params[2]))
}

fn boundary_params(p: &TetraPoint) -> [f64; 3] {
    let phi = 0.5 * p.x3.arg();
    let a = p.x1 * C64::from_polar(1.0, -phi);
    [a.norm().min(1.0).acos(), a.arg(), phi]
}

/// A fixed sample of the distinguished boundary, reusable across polynomials.
#[derive(Clone, Debug)]
pub struct BoundarySamples {
    points: Vec<TetraPoint>,
}

impl BoundarySamples {
    pub fn new(n: usize, seed: u64) -> Self {
        assert!(n >= 1, "need at least one sample");
        Self {
            points: sample_distinguished_boundary(n, seed),
        }
    }

    pub fn points(&self) -> &[TetraPoint] {
        &self.points
    }

    /// Lower estimate of `sup |f|` over the distinguished boundary.
    ///
    /// Every sample that sets a new running maximum (in sample order) is refined by a
    /// local Nelder-Mead search over boundary parameters. The refined starts for a
    /// prefix of the sample set are a subset of those for the whole set, so the
    /// estimate never decreases as samples are appended. Every evaluated point lies on
    /// the boundary, so the estimate never exceeds the true supremum.
    pub fn sup_norm(&self, f: &Poly3) -> f64 {
        let flat = Flat::new(f);
        let mut best = f64::NEG_INFINITY;
        let mut records = Vec::new();
        for p in &self.points {
            let v = flat.eval(p).norm();
            if v > best {
                best = v;
                records.push(*p);
            }
        }
        records
            .iter()
            .map(|p| {
                let (_, neg) = nelder_mead(boundary_params(p), 0.05, 80, 1e-15, |q| {
                    -flat.eval(&boundary_point(q)).norm()
                });
                -neg
            })
            .fold(best, f64::max)
    }
}

/// Lower estimate of `sup |f|` over the distinguished boundary; see
/// [`BoundarySamples::sup_norm`].
pub fn sup_norm_be(f: &Poly3, nsamples: usize, seed: u64) -> f64 {
    BoundarySamples::new(nsamples, seed).sup_norm(f)
}

/// Disk automorphism `(alpha - w) / (1 - conj(alpha) w)`, which sends `alpha` to 0.
pub fn blaschke(alpha: C64, w: C64) -> Result<C64> {
    if alpha.norm().is_nan() || alpha.norm() >= 1.0 {
        return Err(TetraError::InvalidParameter(format!(
            "Blaschke parameter must lie in the open unit disk, got |alpha| = {}",
            alpha.norm()
        )));
    }
    let den = ONE - alpha.conj() * w;
    if den == ZERO {
        return Err(TetraError::InvalidParameter(
            "Blaschke factor evaluated at its pole".into(),
        ));
    }
    Ok((alpha - w) / den)
}

/// Max of `|g|` over a `grid^3` phase grid on the unit torus.
pub fn tridisk_sup_grid(g: &Poly3, grid: usize) -> f64 {
    let m = g.max_exponents();
    let step = std::f64::consts::TAU / grid as f64;
    let table = |max: u32| -> Vec<Vec<C64>> {
        (0..grid)
            .map(|k| powers(C64::from_polar(1.0, k as f64 * step), max))
            .collect()
    };
    let (p1, p2, p3) = (table(m[0]), table(m[1]), table(m[2]));
    let terms: Vec<(Exponent, C64)> = g.terms().map(|(e, c)| (*e, *c)).collect();
    (0..grid)
        .into_par_iter()
        .map(|a| {
            let mut best = 0.0_f64;
            for q2 in &p2 {
                for q3 in &p3 {
                    let v: C64 = terms
                        .iter()
                        .map(|(e, coef)| {
                            coef * p1[a][e[0] as usize] * q2[e[1] as usize] * q3[e[2] as usize]
                        })
                        .sum();
                    best = best.max(v.norm());
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

pub const TRIDISK_GRID: usize = 64;
pub const TRIDISK_SAFETY: f64 = 1e-3;

/// Bound on `sup |g|` over the tridisk: the 64^3 torus-grid maximum inflated by
/// `1 + 1e-3`.
pub fn tridisk_bound(g: &Poly3) -> f64 {
    tridisk_sup_grid(g, TRIDISK_GRID) * (1.0 + TRIDISK_SAFETY)
}

/// Rigorous upper bound on `sup |g|` over the tridisk: grid maximum plus half a
/// grid step times the phase-Lipschitz constants.
pub fn tridisk_upper_bound(g: &Poly3, grid: usize) -> f64 {
    let half = std::f64::consts::PI / grid as f64;
    tridisk_sup_grid(g, grid) + half * (0..3).map(|v| g.phase_lipschitz(v)).sum::<f64>()
}

/// Scales `g` so that its tridisk bound is 1.
pub fn normalize_to_tridisk(g: &Poly3) -> Poly3 {
    let b = tridisk_bound(g);
    if b == 0.0 {
        return g.clone();
    }
    g.scale(C64::new(1.0 / b, 0.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct KneseReport {
    /// Largest `LHS - RHS` over the sampled points.
    pub max_violation: f64,
    pub worst_point: TetraPoint,
    pub violated: bool,
    pub bound: f64,
    /// Whether the caller-supplied bound satisfies `bound <= 1`.
    pub bound_ok: bool,
    pub nsamples: usize,
}

/// Reporting threshold on `max_violation`.
pub const KNESE_VIOLATION_TOL: f64 = 1e-9;

fn tridisk_sample(seed: u64) -> TetraPoint {
    use rand::Rng;
    let mut rng = seed::rng(seed);
    let mut z = || {
        let r: f64 = rng.random::<f64>().sqrt();
        let th: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        C64::from_polar(r, th)
    };
    TetraPoint::new(z(), z(), z())
}

/// Checks `sum_j (1 - |z_j|^2) |dg/dz_j| <= 1 - |g|^2` at `nsamples` points of the open
/// tridisk. `bound` is the caller's certificate for `sup |g|` on the tridisk.
pub fn knese_check(g: &Poly3, bound: f64, nsamples: usize, seed: u64) -> KneseReport {
    let value = Flat::new(g);
    let partials = [0, 1, 2].map(|v| Flat::new(&g.derivative(v)));
    let (max_violation, worst_point) = (0..nsamples as u64)
        .into_par_iter()
        .map(|i| {
            let z = tridisk_sample(seed::derive(seed, i));
            let lhs: f64 = z
                .coords()
                .iter()
                .zip(&partials)
                .map(|(zj, d)| (1.0 - zj.norm_sqr()) * d.eval(&z).norm())
                .sum();
            let rhs = 1.0 - value.eval(&z).norm_sqr();
            (lhs - rhs, z)
        })
        .reduce(
            || (f64::NEG_INFINITY, TetraPoint::real(0.0, 0.0, 0.0)),
            |a, b| if b.0 > a.0 { b } else { a },
        );
    KneseReport {
        max_violation,
        worst_point,
        violated: max_violation > KNESE_VIOLATION_TOL,
        bound,
        bound_ok: bound <= 1.0,
        nsamples,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchwarzBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `r * sum_j |grad_j| <= 1 - |f0|^2`, the polydisk Schwarz estimate transported to a
/// function on E through the inscribed polydisk of radius `r`.
pub fn schwarz_bound(grad: [C64; 3], r: f64, f0: C64) -> SchwarzBound {
    let lhs = r * grad.iter().map(|g| g.norm()).sum::<f64>();
    let rhs = 1.0 - f0.norm_sqr();
    SchwarzBound {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    }
}
