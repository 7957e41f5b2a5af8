//! One-dimensional golden-section maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// One bracket of a golden-section run: `lo < x1 < x2 < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub x1: f64,
    pub x2: f64,
    pub f1: f64,
    pub f2: f64,
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
/// Returns the best probed point and its value.
pub fn golden_max<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    run(f, lo, hi, tol, None)
}

/// Like [`golden_max`] but also records every bracket.
pub fn golden_max_traced<F: FnMut(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64, Vec<Bracket>) {
    let mut trace = Vec::new();
    let (x, fx) = run(f, lo, hi, tol, Some(&mut trace));
    (x, fx, trace)
}

fn run<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut trace: Option<&mut Vec<Bracket>>,
) -> (f64, f64) {
    debug_assert!(lo <= hi && tol > 0.0);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f2 > f1 { (x2, f2) } else { (x1, f1) };
    while hi - lo > tol {
        if let Some(t) = trace.as_deref_mut() {
            t.push(Bracket {
                lo,
                hi,
                x1,
                x2,
                f1,
                f2,
            });
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if fm > best.1 {
        best = (mid, fm);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx <= 0.0);
    }

    #[test]
    fn monotone_objective_goes_to_the_edge() {
        let (x, _) = golden_max(|x| x, 0.0, 1.0, 1e-9);
        assert!(x > 1.0 - 1e-8);
    }

    #[test]
    fn brackets_shrink_and_nest() {
        let (x, _, trace) = golden_max_traced(|x| (3.0 * x).sin(), 0.0, 1.0, 1e-6);
        for w in trace.windows(2) {
            assert!(w[1].lo >= w[0].lo && w[1].hi <= w[0].hi);
        }
        assert!(trace.iter().all(|b| b.lo <= x && x <= b.hi));
    }
}
