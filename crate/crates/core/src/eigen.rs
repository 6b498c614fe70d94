//! Eigenvalues of dense complex matrices: Parlett–Reinsch balancing,
//! Householder reduction to upper Hessenberg form, then implicitly
//! single-shifted QR with Wilkinson shifts and relative deflation.

use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::error::DynError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// QR sweeps allowed per deflation before giving up, times `n`.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 40;

/// Every this many stalled sweeps, an ad-hoc shift breaks symmetry cycles.
const EXCEPTIONAL_STRIDE: usize = 10;

pub(crate) fn eigenvalues(a: &CMatrix, deflation_tol: f64) -> Result<Vec<Complex64>, DynError> {
    let n = a.dim();
    let mut h: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)]).collect())
        .collect();
    balance(&mut h);
    hessenberg(&mut h);
    qr_hessenberg(&mut h, deflation_tol)
}

/// Diagonal similarity scaling with exact powers of two (Parlett–Reinsch).
/// Leaves eigenvalues untouched while taming wildly scaled rows/columns.
fn balance(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    let radix = 2.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| h[i][j].norm()).sum();
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| h[j][i].norm()).sum();
            if r == 0.0 || c == 0.0 || !r.is_finite() || !c.is_finite() {
                continue;
            }
            let s0 = c + r;
            let mut f = 1.0f64;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < 0.95 * s0 {
                converged = false;
                for j in 0..n {
                    h[i][j] /= f;
                }
                for row in h.iter_mut() {
                    row[i] *= f;
                }
            }
        }
        if converged {
            return;
        }
    }
}

/// Householder reduction to upper Hessenberg form (complex reflectors).
fn hessenberg(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let m = n - k - 1; // length of the column tail below the diagonal
        let norm_x = (k + 1..n).map(|i| h[i][k].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let alpha = h[k + 1][k];
        let phase = if alpha.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            alpha / alpha.norm()
        };
        // v = x + phase * ||x|| * e1, reflector P = I - beta v v*.
        for i in 0..m {
            v[i] = h[k + 1 + i][k];
        }
        v[0] += phase * norm_x;
        let vnorm_sqr = v[..m].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sqr;
        // Left: H <- P H on rows k+1.., columns k..n.
        for j in k..n {
            let mut s = ZERO;
            for i in 0..m {
                s += v[i].conj() * h[k + 1 + i][j];
            }
            s *= beta;
            for i in 0..m {
                let upd = s * v[i];
                h[k + 1 + i][j] -= upd;
            }
        }
        // Right: H <- H P on columns k+1.., all rows.
        for row in h.iter_mut() {
            let mut s = ZERO;
            for (i, vi) in v[..m].iter().enumerate() {
                s += row[k + 1 + i] * vi;
            }
            s *= beta;
            for (i, vi) in v[..m].iter().enumerate() {
                let upd = s * vi.conj();
                row[k + 1 + i] -= upd;
            }
        }
        // The tail of column k is now exactly -phase*||x|| e1.
        h[k + 1][k] = -phase * norm_x;
        for i in k + 2..n {
            h[i][k] = ZERO;
        }
    }
}

/// Complex Givens rotation: returns `(c, s)` with `c` real such that
/// `[[c, s], [-conj(s), c]] * [f, g]^T = [r, 0]^T`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fg = (f.norm_sqr() + g.norm_sqr()).sqrt();
    if fg == 0.0 {
        return (1.0, ZERO);
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let c = f.norm() / fg;
    let s = (f / f.norm()) * (g.conj() / fg);
    (c, s)
}

/// Eigenvalues of the 2x2 block `[[a, b], [c, d]]` by the quadratic formula.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mid = (a + d) * 0.5;
    let rad = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    (mid + rad, mid - rad)
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 closest to the corner.
fn wilkinson_shift(h: &[Vec<Complex64>], hi: usize) -> Complex64 {
    let (l1, l2) = eig2(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
    let d = h[hi][hi];
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One implicit single-shift sweep on the active block `lo..=hi`:
/// introduce the bulge from the first column of `H - shift*I`, then chase it
/// off the bottom with Givens similarities.
fn sweep(h: &mut [Vec<Complex64>], lo: usize, hi: usize, shift: Complex64) {
    let n = h.len();
    let mut x = h[lo][lo] - shift;
    let mut y = h[lo + 1][lo];
    for k in lo..hi {
        let (c, s) = givens(x, y);
        let col_start = k.saturating_sub(1).max(lo);
        for j in col_start..n {
            let t1 = h[k][j];
            let t2 = h[k + 1][j];
            h[k][j] = c * t1 + s * t2;
            h[k + 1][j] = -s.conj() * t1 + c * t2;
        }
        let row_end = (k + 2).min(hi);
        for i in 0..=row_end {
            let t1 = h[i][k];
            let t2 = h[i][k + 1];
            h[i][k] = c * t1 + s.conj() * t2;
            h[i][k + 1] = -s * t1 + c * t2;
        }
        if k + 1 < hi {
            x = h[k + 1][k];
            y = h[k + 2][k];
        }
    }
}

fn qr_hessenberg(h: &mut [Vec<Complex64>], tol: f64) -> Result<Vec<Complex64>, DynError> {
    let n = h.len();
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let hnorm: f64 = h
        .iter()
        .flat_map(|row| row.iter())
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    loop {
        // Zero out negligible subdiagonals, then find the active block end.
        let mut lo = hi;
        while lo > 0 {
            let off = h[lo][lo - 1].norm();
            let local = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            let floor = if local > 0.0 { tol * local } else { tol * hnorm };
            if off <= floor {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            // 1x1 block deflated.
            eigs.push(h[hi][hi]);
            stalled = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if lo + 1 == hi {
            // 2x2 block: closed form.
            let (l1, l2) = eig2(h[lo][lo], h[lo][hi], h[hi][lo], h[hi][hi]);
            eigs.push(l1);
            eigs.push(l2);
            stalled = 0;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            continue;
        }
        if stalled >= budget {
            return Err(DynError::NoConvergence { partial: eigs });
        }
        stalled += 1;
        let shift = if stalled.is_multiple_of(EXCEPTIONAL_STRIDE) {
            // Ad-hoc shift to break limit cycles.
            let kick = h[hi][hi - 1].norm() + h[hi - 1][hi - 2].norm();
            h[hi][hi] + Complex64::new(1.25 * kick, 0.4 * kick)
        } else {
            wilkinson_shift(h, hi)
        };
        sweep(h, lo, hi, shift);
    }
    debug_assert_eq!(eigs.len(), n);
    Ok(eigs)
}
