#![allow(dead_code)]

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thetalift::arith::{word_matrix, Letter, Mat2, UpperHalfPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random element of `Γ₀(4)` as a word of length at most `max_len` in
/// `T^{±1}`, `U^{±1}`.
pub fn random_gamma04(rng: &mut ChaCha8Rng, max_len: usize) -> Mat2 {
    let letters = [Letter::T, Letter::TInv, Letter::U, Letter::UInv];
    let len = rng.random_range(1..=max_len);
    let word: Vec<Letter> = (0..len).map(|_| letters[rng.random_range(0..4)]).collect();
    word_matrix(&word)
}

/// A random element of `SL₂(ℤ)` as a word in `S` and `T^{±1}`.
pub fn random_sl2z(rng: &mut ChaCha8Rng, max_len: usize) -> Mat2 {
    let letters = [Letter::T, Letter::TInv, Letter::S];
    let len = rng.random_range(1..=max_len);
    let word: Vec<Letter> = (0..len).map(|_| letters[rng.random_range(0..3)]).collect();
    word_matrix(&word)
}

pub fn random_point(rng: &mut ChaCha8Rng, y_lo: f64, y_hi: f64) -> UpperHalfPoint {
    UpperHalfPoint::new(rng.random_range(-0.5..0.5), rng.random_range(y_lo..y_hi)).unwrap()
}

/// Synthetic half-integral series with uniform coefficients in `[-1, 1]` on
/// every admissible index `0 < |n| ≤ max_index`, vanishing beyond.
pub fn random_half_series(
    rng: &mut ChaCha8Rng,
    max_index: i64,
) -> thetalift::automorphic::CoefficientSeries {
    use thetalift::automorphic::{CoefficientSeries, TailModel};
    let coeffs: Vec<(i64, f64)> = (-max_index..=max_index)
        .filter(|n| *n != 0 && n.rem_euclid(4) <= 1)
        .map(|n| (n, rng.random_range(-1.0..1.0)))
        .collect();
    CoefficientSeries::half_integral(thetalift::special::SpectralParam::default_maass(), coeffs)
        .unwrap()
        .with_tail_model(TailModel::Vanishing)
}
