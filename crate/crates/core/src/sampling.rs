//! Seeded random generators for semi-dissipative test systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{inner, normalize, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut SeededRng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(n, n, data).expect("finite samples")
}

/// Haar-like unitary from Gram-Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        if crate::linalg::vec_norm(&v) > 1e-6 {
            cols.push(normalize(&v));
        }
    }
    ComplexMatrix::from_columns(n, &cols)
}

pub fn random_anti_hermitian(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).anti_hermitian_part()
}

/// `R^* D R` with `D >= 0` diagonal of the given rank, entries in `[0.5, 2]`.
pub fn random_psd(rng: &mut SeededRng, n: usize, rank: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..n).map(|i| if i < rank { rng.gen_range(0.5..=2.0) } else { 0.0 }).collect();
    let r = random_unitary(rng, n);
    &(&r.adjoint() * &ComplexMatrix::from_diag(&diag)) * &r
}

/// Smallest rank drawn for `B_H`; keeps the generic index at most 3.
pub fn min_rank(n: usize) -> usize {
    n.div_ceil(4)
}

/// `B = R^* D R + S` with `n` in `1..=n_max` and generic (finite) index.
pub fn random_hypocoercive(rng: &mut SeededRng, n_max: usize) -> ComplexMatrix {
    let n = rng.gen_range(1..=n_max);
    let rank = rng.gen_range(min_rank(n)..=n);
    let c = random_psd(rng, n, rank);
    &c + &random_anti_hermitian(rng, n)
}

/// Like [`random_hypocoercive`], but about one draw in five is
/// non-hypocoercive: either purely anti-Hermitian or a unitarily hidden
/// direct sum with a conservative block.
pub fn random_semi_dissipative(rng: &mut SeededRng, n_max: usize) -> ComplexMatrix {
    let kind = rng.gen_range(0..10);
    let n = rng.gen_range(1..=n_max);
    match kind {
        0 => random_anti_hermitian(rng, n),
        1 if n >= 2 => {
            let split = rng.gen_range(1..n);
            let k = n - split;
            let rank = rng.gen_range(min_rank(split)..=split);
            let top = &random_psd(rng, split, rank) + &random_anti_hermitian(rng, split);
            let bottom = random_anti_hermitian(rng, k);
            let mut block = ComplexMatrix::zeros(n, n);
            for i in 0..split {
                for j in 0..split {
                    block[(i, j)] = top[(i, j)];
                }
            }
            for i in 0..k {
                for j in 0..k {
                    block[(split + i, split + j)] = bottom[(i, j)];
                }
            }
            let u = random_unitary(rng, n);
            &(&u.adjoint() * &block) * &u
        }
        _ => {
            let rank = rng.gen_range(min_rank(n)..=n);
            &random_psd(rng, n, rank) + &random_anti_hermitian(rng, n)
        }
    }
}

/// `[[1, 0.5], [-0.5, 1e-6]]`: index 0, but `sqrt(B_H)` has a singular value
/// ratio near 1e-3, so a loose rank tolerance misreads it.
pub fn near_degenerate() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[-0.5, 1e-6]]).expect("static matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(3);
        let u = random_unitary(&mut r, 5);
        assert!(spectral_norm(&(&(&u.adjoint() * &u) - &ComplexMatrix::identity(5))) < 1e-13);
    }

    #[test]
    fn seeded_draws_repeat() {
        assert_eq!(random_semi_dissipative(&mut rng(7), 6), random_semi_dissipative(&mut rng(7), 6));
    }

    #[test]
    fn draws_are_semi_dissipative() {
        let mut r = rng(11);
        for _ in 0..50 {
            let b = random_semi_dissipative(&mut r, 8);
            let s = crate::linalg::SemiDissipativeSystem::new(b).unwrap();
            assert!(s.is_semi_dissipative(1e-12));
        }
    }
}
