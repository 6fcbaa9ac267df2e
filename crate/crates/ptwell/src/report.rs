//! Named-identity verification report.

/// How a residual was measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// Largest entry magnitude.
    MaxAbs,
    /// Power-iteration estimate of the largest singular value.
    SpectralEstimate,
    /// Euclidean norm of a vector residual (largest over the probed set).
    Vector,
    /// Scalar |difference|.
    Scalar,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::MaxAbs => "max_abs",
            NormKind::SpectralEstimate => "spectral_estimate",
            NormKind::Vector => "vector",
            NormKind::Scalar => "scalar",
        }
    }
}

/// One verified operator identity.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub norm: NormKind,
    pub pass: bool,
}

impl IdentityCheck {
    pub fn new(name: &'static str, residual: f64, tolerance: f64, norm: NormKind) -> Self {
        IdentityCheck { name, residual, tolerance, norm, pass: residual.is_finite() && residual <= tolerance }
    }
}

/// The full report: every identity with its residual, tolerance and result.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<IdentityCheck>,
}

impl VerificationReport {
    pub fn push(&mut self, check: IdentityCheck) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        let ok = IdentityCheck::new("a", 1e-14, 1e-13, NormKind::MaxAbs);
        assert!(ok.pass);
        let bad = IdentityCheck::new("b", 1e-2, 1e-13, NormKind::MaxAbs);
        assert!(!bad.pass);
        let nan = IdentityCheck::new("c", f64::NAN, 1e-13, NormKind::MaxAbs);
        assert!(!nan.pass);

        let mut report = VerificationReport::default();
        report.push(ok);
        assert!(report.all_pass());
        report.push(bad);
        assert!(!report.all_pass());
        assert_eq!(report.get("b").unwrap().tolerance, 1e-13);
    }
}
