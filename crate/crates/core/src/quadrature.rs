//! Adaptive panel quadrature for smooth-by-pieces integrands.
//!
//! Each panel is integrated with the 15-point Kronrod rule. A panel is
//! accepted once the rule applied to the whole panel and the sum of the rule
//! over its two halves agree within the panel's share of the tolerance;
//! otherwise both halves are refined the same way. Known kinks and jumps
//! should be passed as breakpoints so no panel straddles them.

/// Kronrod abscissae on [-1, 1], non-negative half, descending.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    /// Sum over accepted panels of the whole-vs-halves disagreement,
    /// maximised over components.
    pub error: f64,
    pub evaluations: usize,
}

/// Quadrature stopped before meeting its tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unconverged<const N: usize> {
    pub partial: Estimate<N>,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Target absolute error of the whole integral.
    pub tol: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
    /// Every breakpoint interval is first cut into this many equal panels.
    pub initial_panels: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-10,
            max_evals: 1 << 22,
            initial_panels: 4,
        }
    }
}

fn kronrod<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> [f64; N] {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = [0.0; N];
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if k == XGK.len() - 1 {
            let v = f(centre);
            for i in 0..N {
                acc[i] += w * v[i];
            }
        } else {
            let lo = f(centre - half * x);
            let hi = f(centre + half * x);
            for i in 0..N {
                acc[i] += w * (lo[i] + hi[i]);
            }
        }
    }
    acc.map(|v| v * half)
}

const EVALS_PER_PANEL: usize = 15;

/// Integrates `f` over `[a, b]`, splitting at `breakpoints` (values outside
/// the open interval are ignored).
pub fn integrate<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: Options,
) -> Result<Estimate<N>, Unconverged<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    assert!(b > a, "empty integration interval");
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let total = b - a;
    let panels = opts.initial_panels.max(1);
    let mut stack: Vec<(f64, f64, [f64; N])> = Vec::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let width = (w[1] - w[0]) / panels as f64;
        for k in 0..panels {
            let lo = w[0] + width * k as f64;
            let hi = if k + 1 == panels { w[1] } else { lo + width };
            stack.push((lo, hi, kronrod(&mut f, lo, hi)));
            evaluations += EVALS_PER_PANEL;
        }
    }

    let mut value = [0.0; N];
    let mut error = 0.0;
    let mut converged = true;
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = kronrod(&mut f, lo, mid);
        let right = kronrod(&mut f, mid, hi);
        evaluations += 2 * EVALS_PER_PANEL;
        let refined: [f64; N] = std::array::from_fn(|i| left[i] + right[i]);
        let diff = (0..N)
            .map(|i| (refined[i] - whole[i]).abs())
            .fold(0.0, f64::max);
        let local_tol = opts.tol * (hi - lo) / total;
        let exhausted = evaluations >= opts.max_evals;
        let too_narrow = (hi - lo) <= total * 1e-15;
        if diff <= local_tol || exhausted || too_narrow {
            if exhausted && diff > local_tol {
                converged = false;
            }
            for i in 0..N {
                value[i] += refined[i];
            }
            error += diff;
        } else {
            stack.push((mid, hi, right));
            stack.push((lo, mid, left));
        }
    }

    let estimate = Estimate {
        value,
        error,
        evaluations,
    };
    if converged && error <= opts.tol {
        Ok(estimate)
    } else {
        Err(Unconverged { partial: estimate })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        let est = integrate(|x| [x.powi(6) - 3.0 * x], 0.0, 2.0, &[], Options::default()).unwrap();
        assert!((est.value[0] - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_periodic_integrand() {
        // (1/2pi) int_0^{2pi} exp(cos t) cos(3t) dt = I_3(1)
        let i3 = 0.022_168_424_924_331_9;
        let est = integrate(
            |t| [(t.cos()).exp() * (3.0 * t).cos() / (2.0 * PI)],
            0.0,
            2.0 * PI,
            &[],
            Options::default(),
        )
        .unwrap();
        assert!((est.value[0] - i3).abs() < 1e-12, "{}", est.value[0]);
    }

    #[test]
    fn jump_handled_by_breakpoint() {
        let step = |x: f64| [if x < 0.3 { 1.0 } else { -1.0 }];
        let est = integrate(step, 0.0, 1.0, &[0.3], Options::default()).unwrap();
        assert!((est.value[0] - (0.3 - 0.7)).abs() < 1e-14);
    }

    #[test]
    fn jump_without_breakpoint_still_converges() {
        let step = |x: f64| [if x < 0.3 { 1.0 } else { -1.0 }];
        let est = integrate(step, 0.0, 1.0, &[], Options::default()).unwrap();
        assert!((est.value[0] + 0.4).abs() < 1e-9);
    }

    #[test]
    fn evaluation_cap_reports_unconverged() {
        let step = |x: f64| [if x < 0.3 { 1.0 } else { -1.0 }];
        let opts = Options {
            max_evals: 200,
            ..Options::default()
        };
        let err = integrate(step, 0.0, 1.0, &[], opts).unwrap_err();
        assert!(err.partial.error > opts.tol);
    }
}
