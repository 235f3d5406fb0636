//! Golden-section search for the maximum of a unimodal function on a
//! closed interval.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than
/// `rel_tol * (hi - lo)`. Returns the best interior probe; callers that care
/// about optima sitting exactly on an end point should evaluate those too.
pub fn maximize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> GoldenResult {
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        let fx = f(lo);
        return GoldenResult { x: lo, fx, evaluations: 1 };
    }
    let stop = rel_tol.max(f64::EPSILON) * (hi - lo);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while b - a > stop {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    if fc >= fd {
        GoldenResult { x: c, fx: fc, evaluations }
    } else {
        GoldenResult { x: d, fx: fd, evaluations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let r = maximize(|x| -(x - 1.3).powi(2), 0.0, 4.0, 1e-9);
        assert!((r.x - 1.3).abs() < 1e-7);
        assert!(r.evaluations < 60);
    }

    #[test]
    fn monotone_goes_to_edge() {
        let r = maximize(|x| x, 0.0, 2.0, 1e-6);
        assert!(2.0 - r.x < 1e-5);
        let r = maximize(|x| -x, 0.0, 2.0, 1e-6);
        assert!(r.x < 1e-5);
    }

    #[test]
    fn degenerate_interval() {
        let r = maximize(|x| x * x, 3.0, 3.0, 1e-6);
        assert_eq!(r.x, 3.0);
        assert_eq!(r.fx, 9.0);
    }
}
