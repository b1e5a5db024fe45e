//! Helpers shared by the integration suites: Gauss-Legendre quadrature,
//! an independent dense solver, random valid covariance states, and the
//! demonstration parameter set used throughout.
#![allow(dead_code)]
// The dense solver reads best with explicit index loops.
#![allow(clippy::needless_range_loop)]

use covpair::{CovarianceState, LindbladCouplings, OscillatorParams, SimonParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, found by Newton iteration
/// on the Legendre recurrence. Independent of any library quadrature.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let legendre = |x: f64| -> (f64, f64) {
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let k = k as f64;
            let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        let dp = if n == 1 {
            1.0
        } else {
            n as f64 * (x * p1 - p0) / (x * x - 1.0)
        };
        (p1, dp)
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// The same rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Plain partial-pivot solve, kept separate from the library's solver so the
/// oracle tests do not depend on the code they check.
pub fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> [f64; N] {
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col] != 0.0, "singular oracle system");
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Random full-rank covariance state: `Sigma = G Gᵀ + 0.15 I` rescaled so the
/// largest diagonal entry is 1. Moderate scales keep finite differences of
/// the Gaussian kernels inside their accuracy budget.
pub fn random_valid_state(rng: &mut ChaCha8Rng) -> CovarianceState {
    let mut g = [[0.0; 4]; 4];
    for row in &mut g {
        for v in row {
            *v = rng.gen_range(-0.7..0.7);
        }
    }
    let mut sigma = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            sigma[i][j] = (0..4).map(|k| g[i][k] * g[j][k]).sum::<f64>();
        }
    }
    for (i, row) in sigma.iter_mut().enumerate() {
        row[i] += 0.15;
    }
    let max_diag = (0..4).map(|i| sigma[i][i]).fold(f64::MIN, f64::max);
    for row in &mut sigma {
        for v in row {
            *v /= max_diag;
        }
    }
    // Sigma is ordered (R1, R2, p1, p2) with layout [[C, Bᵀ], [B, A]].
    CovarianceState {
        tau: 0.0,
        c11: sigma[0][0],
        c12: sigma[0][1],
        c22: sigma[1][1],
        b11: sigma[2][0],
        b12: sigma[2][1],
        b21: sigma[3][0],
        b22: sigma[3][1],
        a11: sigma[2][2],
        a12: sigma[2][3],
        a22: sigma[3][3],
    }
}

/// Random covariance state with condition number below ~2: a damped random
/// part on top of a dominant identity. Quadrature oracles use these so the
/// integrand stays well resolved by axis-aligned Gauss-Legendre grids.
pub fn random_round_state(rng: &mut ChaCha8Rng) -> CovarianceState {
    let rough = random_valid_state(rng);
    let v = rough.to_vec();
    let mut blended: Vec<f64> = v.iter().map(|x| 0.3 * x).collect();
    // Indices 0, 2, 3, 5 are the diagonal entries A11, C11, A22, C22.
    for i in [0, 2, 3, 5] {
        blended[i] += 0.7;
    }
    let mut arr = [0.0; 10];
    arr.copy_from_slice(&blended);
    CovarianceState::from_vec(0.0, arr)
}

/// Oscillator pair used by the canned figures: unit lower frequency,
/// frequency ratio 3, unit time scale.
pub fn demo_oscillator() -> OscillatorParams {
    OscillatorParams {
        omega_a: 1.0,
        omega_b: 3.0,
        lambda: 1.0,
    }
}

/// Matching couplings: damping rate 0.25 on each oscillator, diagonal drives
/// (1, 2, 1, 4), unit real cross drives.
pub fn demo_couplings() -> LindbladCouplings {
    LindbladCouplings {
        h11: 1.0,
        h22: 2.0,
        h33: 1.0,
        h44: 4.0,
        h13: [1.0, 0.125],
        h24: [1.0, 0.375],
        ..Default::default()
    }
}

pub fn case_a() -> SimonParams {
    SimonParams {
        a1: 0.5,
        b1: 0.5,
        a2: 0.5,
        b2: 0.5,
        a12: 0.0,
        b12: 0.0,
    }
}

pub fn case_b() -> SimonParams {
    SimonParams {
        a12: 0.5,
        b12: -0.5,
        ..case_a()
    }
}
