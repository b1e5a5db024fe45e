//! Small dense linear algebra over fixed-size arrays.
//!
//! Everything in this crate works on systems of dimension ten or less, so the
//! routines here are written directly over `[[f64; N]; N]` with const generics
//! rather than pulling in a matrix library.

// Fixed-size elimination code reads best with explicit index loops.
#![allow(clippy::needless_range_loop)]

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the matrix is singular to working precision, judged by
/// a pivot smaller than `1e-13` times the largest entry of the original
/// matrix (or an absolute floor of `1e-300` for the all-zero matrix).
pub fn solve<const N: usize>(a: [[f64; N]; N], b: [f64; N]) -> Option<[f64; N]> {
    let mut m = a;
    let mut rhs = b;

    let scale = m.iter().flatten().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    let tol = (1e-13 * scale).max(1e-300);

    for col in 0..N {
        let mut pivot_row = col;
        let mut pivot_val = m[col][col].abs();
        for row in col + 1..N {
            let v = m[row][col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val < tol {
            return None;
        }
        if pivot_row != col {
            m.swap(col, pivot_row);
            rhs.swap(col, pivot_row);
        }
        for row in col + 1..N {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..N {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }

    let mut x = [0.0; N];
    for col in (0..N).rev() {
        let mut acc = rhs[col];
        for k in col + 1..N {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

pub fn det2(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Inverse of a 2x2 matrix; `None` when the determinant is exactly zero.
pub fn inv2(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let d = det2(m);
    if d == 0.0 {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

pub fn mul2(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn transpose2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn trace2(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] + m[1][1]
}

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// Returns the lower-triangular factor `L` with `L Lᵀ = a`, or `None` when a
/// pivot is not strictly positive (the matrix is not positive definite).
pub fn cholesky<const N: usize>(a: [[f64; N]; N]) -> Option<[[f64; N]; N]> {
    let mut l = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..=i {
            let mut acc = a[i][j];
            for k in 0..j {
                acc -= l[i][k] * l[j][k];
            }
            if i == j {
                if acc <= 0.0 {
                    return None;
                }
                l[i][j] = acc.sqrt();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solves `L y = b` for a lower-triangular `L` (as produced by [`cholesky`]).
pub fn forward_sub<const N: usize>(l: &[[f64; N]; N], b: [f64; N]) -> [f64; N] {
    let mut y = [0.0; N];
    for i in 0..N {
        let mut acc = b[i];
        for k in 0..i {
            acc -= l[i][k] * y[k];
        }
        y[i] = acc / l[i][i];
    }
    y
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation method.
///
/// Returned sorted ascending. Convergence for these small well-scaled
/// matrices takes a handful of sweeps; the sweep cap only guards against
/// pathological input.
pub fn sym_eigenvalues<const N: usize>(a: [[f64; N]; N]) -> [f64; N] {
    let mut m = a;
    for _ in 0..64 {
        let mut off = 0.0_f64;
        for i in 0..N {
            for j in i + 1..N {
                off += m[i][j] * m[i][j];
            }
        }
        let scale = m.iter().flatten().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
        if off.sqrt() <= 1e-15 * scale.max(1e-300) {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                if m[p][q] == 0.0 {
                    continue;
                }
                // Classic Jacobi rotation zeroing m[p][q].
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..N {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig = [0.0; N];
    for i in 0..N {
        eig[i] = m[i][i];
    }
    eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eig
}
