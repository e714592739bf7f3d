//! Central finite-difference checks of analytic gradients.

/// Finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Relative errors are taken against `max(|analytic|, |numeric|, DENOM_FLOOR)`,
/// so entries that are zero up to rounding are compared absolutely.
///
/// Rounding in a central difference at `FD_STEP` is about
/// `f64::EPSILON * |loss| / FD_STEP`, roughly 1e-10 for losses of order ten.
/// This floor keeps that noise near 1e-6 relative on tiny entries.
pub const DENOM_FLOOR: f64 = 1e-4;

/// Result of evaluating the checked map at one parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub loss: f64,
    /// Fingerprint of the piecewise-linear region the evaluation fell in
    /// (e.g. a hash of ReLU activation signs). Smooth maps return 0.
    pub regime: u64,
}

impl Probe {
    pub fn smooth(loss: f64) -> Self {
        Self { loss, regime: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst_index: Option<usize>,
    pub checked: usize,
    /// Coordinates skipped because a perturbation crossed a kink.
    pub skipped: usize,
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(DENOM_FLOOR)
}

/// Compares `analytic[i]` with a central difference of `f` at `params` for
/// every `i` in `indices`, returning the worst relative error.
///
/// A coordinate is skipped when either perturbed evaluation lands in a
/// different regime than the unperturbed one.
pub fn grad_check(
    params: &[f64],
    analytic: &[f64],
    indices: impl IntoIterator<Item = usize>,
    mut f: impl FnMut(&[f64]) -> Probe,
) -> GradCheckReport {
    assert_eq!(params.len(), analytic.len(), "one analytic entry per parameter");
    let base = f(params).regime;
    let mut work = params.to_vec();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_index: None,
        checked: 0,
        skipped: 0,
    };
    for i in indices {
        let orig = work[i];
        let (hi, lo) = (orig + FD_STEP, orig - FD_STEP);
        work[i] = hi;
        let plus = f(&work);
        work[i] = lo;
        let minus = f(&work);
        work[i] = orig;
        if plus.regime != base || minus.regime != base {
            report.skipped += 1;
            continue;
        }
        let numeric = (plus.loss - minus.loss) / (hi - lo);
        let err = relative_error(analytic[i], numeric);
        report.checked += 1;
        if report.worst_index.is_none() || err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst_index = Some(i);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_checked_exactly() {
        let p = [1.0, -2.0, 0.5];
        let analytic: Vec<f64> = p.iter().map(|x| 2.0 * x).collect();
        let r = grad_check(&p, &analytic, 0..3, |q| Probe::smooth(q.iter().map(|x| x * x).sum()));
        assert_eq!(r.checked, 3);
        assert!(r.max_rel_error < 1e-9);
    }

    #[test]
    fn wrong_gradient_is_flagged() {
        let p = [1.0, 2.0];
        let r = grad_check(&p, &[2.0, 5.0], 0..2, |q| Probe::smooth(q[0] * q[0] + q[1] * q[1]));
        assert_eq!(r.worst_index, Some(1));
        assert!(r.max_rel_error > 0.1);
    }

    #[test]
    fn regime_changes_are_skipped() {
        let p = [0.0];
        let r = grad_check(&p, &[0.0], 0..1, |q| Probe {
            loss: q[0].abs(),
            regime: (q[0] > 0.0) as u64,
        });
        assert_eq!((r.checked, r.skipped), (0, 1));
    }
}
