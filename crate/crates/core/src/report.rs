//! One-shot verification of a tiling: combinatorics, niceness, counting
//! identities, stress space and lift.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::henneberg::henneberg_decompose;
use crate::lift::{horn_count, is_hyperbolic_certificate, lift, Certificate};
use crate::sparsity::{classify_sparsity, SparsityClass};
use crate::stress::self_stress_basis;
use crate::tiling::{CountReport, NiceViolation, Tiling, TilingError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub graph_class: SparsityClass,
    /// Number of Henneberg steps from the base, when the skeleton decomposes.
    pub henneberg_length: Option<usize>,
    pub counts: CountReport,
    pub pointed: bool,
    pub nice: bool,
    pub nice_violation: Option<NiceViolation>,
    pub digon_count: usize,
    /// `f3 == v - 4 && f2 == e - 2v + 6`; only meaningful for nice tilings.
    pub derived_identities: Option<bool>,
    /// Largest deviation of a vertex's corner sum from a full turn.
    pub angle_sum_error: f64,
    pub stress_dimension: usize,
    /// Lift of the unique stress, when the stress space is a line.
    pub closure_residual: Option<f64>,
    pub certificate: Option<Certificate>,
    pub horn_count: Option<usize>,
}

impl VerificationReport {
    /// Counting residuals all vanish.
    pub fn residuals_zero(&self) -> bool {
        self.counts.residuals_zero()
    }

    pub fn passes(&self, require_nice: bool) -> bool {
        self.residuals_zero() && (!require_nice || self.nice)
    }
}

pub fn angle_sum_error(t: &Tiling) -> f64 {
    (0..t.vertex_count())
        .map(|v| {
            let sum: f64 = t.outgoing(v).iter().map(|&h| t.corner(h)).sum();
            (sum - TAU).abs()
        })
        .fold(0.0, f64::max)
}

pub fn verify(t: &Tiling) -> Result<VerificationReport, TilingError> {
    let g = t.skeleton();
    let graph_class = classify_sparsity(&g);
    let henneberg_length = henneberg_decompose(&g).ok().map(|s| s.steps.len());
    let counts = t.count_report()?;
    let nice = t.is_nice()?;
    let (v, e) = (counts.v as i64, counts.e as i64);
    let derived_identities = nice
        .nice
        .then(|| counts.f3 as i64 == v - 4 && counts.f2 as i64 == e - 2 * v + 6);

    let basis = self_stress_basis(t);
    let (mut closure_residual, mut certificate, mut horns) = (None, None, None);
    if let [s] = basis.as_slice() {
        if let Ok(vp) = lift(t, s) {
            closure_residual = Some(vp.closure_residual);
            certificate = is_hyperbolic_certificate(&vp).ok();
            horns = horn_count(&vp).ok();
        }
    }
    Ok(VerificationReport {
        graph_class,
        henneberg_length,
        pointed: t.is_pointed()?.pointed,
        nice: nice.nice,
        nice_violation: nice.violation,
        digon_count: t.digon_count()?,
        derived_identities,
        angle_sum_error: angle_sum_error(t),
        stress_dimension: basis.len(),
        closure_residual,
        certificate,
        horn_count: horns,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::seed_k4;
    use crate::tiling::fixtures;

    #[test]
    fn seed_report() {
        let r = verify(&seed_k4()).unwrap();
        assert!(r.nice && r.passes(true));
        assert_eq!(r.digon_count, 4);
        assert_eq!(r.derived_identities, Some(true));
        assert_eq!(r.stress_dimension, 1);
        assert_eq!(r.certificate, Some(Certificate::CertifiedHyperbolic));
        assert_eq!(r.horn_count, Some(4));
        assert_eq!(r.henneberg_length, Some(0));
        assert!(r.angle_sum_error < 1e-9);
    }

    #[test]
    fn octahedron_fails_niceness() {
        let r = verify(&fixtures::octahedron()).unwrap();
        assert!(!r.nice && !r.pointed);
        assert_eq!(r.derived_identities, None);
        assert!(!r.passes(true));
        assert_eq!(r.stress_dimension, 3);
        assert_eq!(r.certificate, None);
    }
}
