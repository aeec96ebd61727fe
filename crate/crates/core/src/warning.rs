use std::fmt;

/// Approximation thresholds crossed during a computation. None of these stop
/// a run; callers collect them for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `r_ss sin φ_ss` below 3: the two steady field states overlap noticeably.
    WeakOrthogonality { r_sin_phi: f64 },
    /// `g t / r` above 0.5: the short-time branch expansion is degrading.
    ShortTimeDegraded { t: f64, gt_over_r: f64 },
    /// The master-equation trace drifted past 1e−8 and was renormalized.
    TraceDrift { t: f64, drift: f64 },
    /// Population of the top Fock level is close to the cutoff tolerance.
    TruncationTail { t: f64, population: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::WeakOrthogonality { r_sin_phi } => {
                write!(f, "r_ss*sin(phi_ss) = {r_sin_phi:.4} < 3: steady field states not well separated")
            }
            Warning::ShortTimeDegraded { t, gt_over_r } => {
                write!(f, "g*t/r = {gt_over_r:.4} > 0.5 at t = {t:.4}: short-time approximation degrading")
            }
            Warning::TraceDrift { t, drift } => {
                write!(f, "trace drift {drift:.3e} at t = {t:.4}; renormalized")
            }
            Warning::TruncationTail { t, population } => {
                write!(f, "top Fock level population {population:.3e} at t = {t:.4}")
            }
        }
    }
}
