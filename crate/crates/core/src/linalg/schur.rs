//! Eigenvalues of a general complex matrix: Householder reduction to upper
//! Hessenberg form followed by single-shift complex QR sweeps with Wilkinson
//! shifts and deflation.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2 v v*) H
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * s * 2.0;
            }
        }
        // H <- H (I - 2 v v*)
        for i in 0..n {
            let s: C64 = v.iter().enumerate().map(|(j, vj)| h[(i, k + 1 + j)] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= s * vj.conj() * 2.0;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let (l1, l2) = (mean + disc, mean - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All `n` eigenvalues with multiplicity. The iteration cap is `100 n` QR sweeps.
pub fn general_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut eigs = vec![ZERO; n];
    let cap = 100 * n;
    let mut sweeps = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > cap {
            return Err(Error::NoConvergence { what: "Hessenberg QR eigenvalue iteration", iterations: cap });
        }

        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(0.75, 0.25) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        // QR via Givens rotations G_k acting on rows k, k+1.
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (g1, g2) = if r == 0.0 { (C64::new(1.0, 0.0), ZERO) } else { (x / r, y / r) };
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = g1.conj() * a + g2.conj() * b;
                h[(k + 1, j)] = -g2 * a + g1 * b;
            }
            rotations.push((g1, g2));
        }
        // RQ: multiply on the right by G_k^*.
        for (offset, &(g1, g2)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * g1 + b * g2;
                h[(i, k + 1)] = -a * g2.conj() + b * g1.conj();
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_by_re_im(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal() {
        let e = sorted_by_re_im(general_eigenvalues(&ComplexMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap());
        for (z, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - C64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_generator() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let e = sorted_by_re_im(general_eigenvalues(&m).unwrap());
        assert!((e[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn envelope_matrix() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, -0.3], &[0.3, 0.0]]).unwrap();
        let e = sorted_by_re_im(general_eigenvalues(&m).unwrap());
        assert!((e[0] - C64::new(0.1, 0.0)).norm() < 1e-14);
        assert!((e[1] - C64::new(0.9, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = ComplexMatrix::from_real_rows(&[&[6.0, -11.0, 6.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap();
        let e = sorted_by_re_im(general_eigenvalues(&m).unwrap());
        for (z, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - C64::new(want, 0.0)).norm() < 1e-10, "{z}");
        }
    }

    #[test]
    fn jordan_block_and_permutation() {
        let j = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]).unwrap();
        for z in general_eigenvalues(&j).unwrap() {
            assert!((z - C64::new(2.0, 0.0)).norm() < 1e-7);
        }
        // cyclic shift: eigenvalues are the cube roots of unity
        let p = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap();
        for z in general_eigenvalues(&p).unwrap() {
            assert!(((z * z * z) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
