//! Biorthogonal 9-7 filter pair.
//!
//! Taps are derived in closed form from the degree-3 factor of the
//! 4-vanishing-moment halfband polynomial rather than copied as decimals,
//! so the zeros at Nyquist (and hence exact constant reproduction) hold to
//! machine precision.

/// Lifting factorization of the same 9-7 pair (predict, update, predict,
/// update, then lowpass gain `LIFT_K`).
pub const LIFT_ALPHA: f64 = -1.586_134_342_059_924;
pub const LIFT_BETA: f64 = -0.052_980_118_572_961;
pub const LIFT_GAMMA: f64 = 0.882_911_075_530_934;
pub const LIFT_DELTA: f64 = 0.443_506_852_043_971;
pub const LIFT_K: f64 = 1.230_174_104_914_001;

/// Odd-length, zero-phase symmetric analysis/synthesis lowpass pair.
/// `analysis` sums to 1 and `synthesis` to 2, so a lowpass-downsample
/// followed by upsample-interpolate reproduces constants exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterPair {
    pub analysis: Vec<f64>,
    pub synthesis: Vec<f64>,
}

impl FilterPair {
    pub fn biorthogonal_97() -> Self {
        // 20y^3 + 10y^2 + 4y + 1 = 20 (y - yr)(y^2 + p y + q), y = sin^2(w/2)
        let yr = real_cubic_root();
        let p = 0.5 + yr;
        let q = -1.0 / (20.0 * yr);

        // (1 - y)^2 in ascending powers of y
        let one_minus_y_sq = [1.0, -2.0, 1.0];
        let analysis_y = poly_mul(&one_minus_y_sq, &[1.0, p / q, 1.0 / q]);
        let synthesis_y = poly_mul(&one_minus_y_sq, &[1.0, -1.0 / yr]);

        let analysis = y_poly_to_taps(&analysis_y);
        let synthesis = y_poly_to_taps(&synthesis_y).into_iter().map(|t| 2.0 * t).collect();
        Self { analysis, synthesis }
    }

    pub fn analysis_radius(&self) -> usize {
        self.analysis.len() / 2
    }

    pub fn synthesis_radius(&self) -> usize {
        self.synthesis.len() / 2
    }
}

fn real_cubic_root() -> f64 {
    let f = |y: f64| ((20.0 * y + 10.0) * y + 4.0) * y + 1.0;
    let df = |y: f64| (60.0 * y + 20.0) * y + 4.0;
    let mut y = -0.34;
    for _ in 0..50 {
        let step = f(y) / df(y);
        y -= step;
        if step.abs() < 1e-17 {
            break;
        }
    }
    y
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Expands a polynomial in `y = (2 - z - z^-1) / 4` into centered taps.
fn y_poly_to_taps(coeffs: &[f64]) -> Vec<f64> {
    let degree = coeffs.len() - 1;
    let len = 2 * degree + 1;
    let mut out = vec![0.0; len];
    let mut power = vec![1.0];
    for (k, &c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = poly_mul(&power, &[-0.25, 0.5, -0.25]);
        }
        let offset = degree - k;
        for (i, &v) in power.iter().enumerate() {
            out[offset + i] += c * v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Published CDF 9/7 values (DC gain 1 for analysis, 2 for synthesis).
    const ANALYSIS_REF: [f64; 5] = [
        0.602_949_018_236_357_9,
        0.266_864_118_442_872_3,
        -0.078_223_266_528_987_85,
        -0.016_864_118_442_874_95,
        0.026_748_757_410_809_76,
    ];
    const SYNTHESIS_REF: [f64; 4] =
        [1.115_087_052_456_994, 0.591_271_763_114_247, -0.057_543_526_228_499_57, -0.091_271_763_114_249_48];

    #[test]
    fn taps_match_published_values() {
        let f = FilterPair::biorthogonal_97();
        assert_eq!(f.analysis.len(), 9);
        assert_eq!(f.synthesis.len(), 7);
        for (k, r) in ANALYSIS_REF.iter().enumerate() {
            assert!((f.analysis[4 + k] - r).abs() < 1e-12, "h[{k}]");
            assert!((f.analysis[4 - k] - r).abs() < 1e-12, "h[-{k}]");
        }
        for (k, r) in SYNTHESIS_REF.iter().enumerate() {
            assert!((f.synthesis[3 + k] - r).abs() < 1e-12, "g[{k}]");
            assert!((f.synthesis[3 - k] - r).abs() < 1e-12, "g[-{k}]");
        }
    }

    #[test]
    fn dc_gains_and_nyquist_zeros() {
        let f = FilterPair::biorthogonal_97();
        let sum = |t: &[f64]| t.iter().sum::<f64>();
        let alt = |t: &[f64]| t.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -*v }).sum::<f64>();
        assert!((sum(&f.analysis) - 1.0).abs() < 1e-15);
        assert!((sum(&f.synthesis) - 2.0).abs() < 1e-15);
        assert!(alt(&f.analysis).abs() < 1e-15);
        assert!(alt(&f.synthesis).abs() < 1e-15);
    }

    #[test]
    fn biorthogonality() {
        // sum_m h[m] g[m - 2j] = delta_j
        let f = FilterPair::biorthogonal_97();
        let (rh, rg) = (f.analysis_radius() as isize, f.synthesis_radius() as isize);
        for j in -4isize..=4 {
            let mut acc = 0.0;
            for m in -rh..=rh {
                let gi = m - 2 * j;
                if gi.abs() <= rg {
                    acc += f.analysis[(m + rh) as usize] * f.synthesis[(gi + rg) as usize];
                }
            }
            let expect = if j == 0 { 1.0 } else { 0.0 };
            assert!((acc - expect).abs() < 1e-10, "j={j}: {acc}");
        }
    }

    #[test]
    fn lifting_constants_reproduce_lowpass() {
        // Run the 1-D lifting scheme on unit impulses and read back the
        // lowpass response at one output sample.
        let n = 64;
        let target = 32;
        let h = FilterPair::biorthogonal_97().analysis;
        for m in 0..n {
            let mut x = vec![0.0; n];
            x[m] = 1.0;
            let step = |x: &mut Vec<f64>, parity: usize, c: f64| {
                for i in (parity..n).step_by(2) {
                    let l = if i >= 1 { x[i - 1] } else { x[i + 1] };
                    let r = if i + 1 < n { x[i + 1] } else { x[i - 1] };
                    x[i] += c * (l + r);
                }
            };
            step(&mut x, 1, LIFT_ALPHA);
            step(&mut x, 0, LIFT_BETA);
            step(&mut x, 1, LIFT_GAMMA);
            step(&mut x, 0, LIFT_DELTA);
            let got = x[target] / LIFT_K;
            let k = m as isize - target as isize;
            let expect = if k.abs() <= 4 { h[(k + 4) as usize] } else { 0.0 };
            assert!((got - expect).abs() < 1e-9, "tap {k}: {got} vs {expect}");
        }
    }
}
