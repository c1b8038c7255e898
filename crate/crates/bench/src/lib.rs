//! Shared inputs for the criterion benchmarks.

use tetra_core::calculus::random_poly;
use tetra_core::structure::fundamental_operators;
use tetra_core::{c64, CommutingTriple, FundamentalPair, Poly3, TetraPoint, C64};

pub fn reference_lambda() -> [C64; 3] {
    [c64(0.2, 0.0), c64(0.1, 0.0), c64(0.15, 0.0)]
}

pub fn reference_triple() -> CommutingTriple {
    CommutingTriple::nilpotent_family(reference_lambda())
}

pub fn reference_pair() -> FundamentalPair {
    fundamental_operators(&reference_triple()).expect("reference triple is admissible")
}

pub fn sample_points() -> Vec<TetraPoint> {
    (0..64)
        .map(|k| {
            let t = k as f64 / 64.0;
            TetraPoint::new(
                C64::from_polar(0.9 * t, 3.0 * t),
                C64::from_polar(0.5, -2.0 * t),
                C64::from_polar(0.7 * (1.0 - t), t),
            )
        })
        .collect()
}

pub fn degree4_poly() -> Poly3 {
    random_poly(4, 17)
}
