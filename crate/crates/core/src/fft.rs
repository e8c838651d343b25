//! Discrete Fourier transforms.
//!
//! Radix-2 iterative Cooley-Tukey for power-of-two lengths; a direct
//! `O(n²)` sum otherwise. Transforms are unnormalized:
//! `X_k = Σ_j x_j exp(∓2πi jk/n)` with `-` for [`Direction::Forward`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

pub fn dft_in_place(data: &mut [Complex64], dir: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, dir);
    } else {
        let out = naive(data, dir);
        data.copy_from_slice(&out);
    }
}

pub fn dft(data: &[Complex64], dir: Direction) -> Vec<Complex64> {
    let mut out = data.to_vec();
    dft_in_place(&mut out, dir);
    out
}

fn naive(data: &[Complex64], dir: Direction) -> Vec<Complex64> {
    let n = data.len();
    let s = dir.sign();
    (0..n)
        .map(|k| {
            data.iter()
                .enumerate()
                .map(|(j, &x)| {
                    let ang = s * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    x * Complex64::new(ang.cos(), ang.sin())
                })
                .sum()
        })
        .collect()
}

fn radix2(data: &mut [Complex64], dir: Direction) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let s = dir.sign();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // Twiddles computed directly per index to avoid drift from recurrences.
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| {
                let ang = s * 2.0 * PI * k as f64 / len as f64;
                Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = data[start + k];
                let b = data[start + k + half] * twiddles[k];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Band-limited interpolation onto the half-step grid.
///
/// Returns `2n - 1` samples `u` with `u[2j] = v[j]` and odd entries at the
/// midpoints, treating `v` as one period of a periodic sequence.
pub fn upsample_half_step(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    if n < 2 {
        return v.to_vec();
    }
    let spectrum = dft(v, Direction::Forward);
    let mut padded = alloc::vec![Complex64::zero(); 2 * n];
    let half = n / 2;
    if n % 2 == 0 {
        for k in 0..half {
            padded[k] = spectrum[k];
        }
        for k in half + 1..n {
            padded[n + k] = spectrum[k];
        }
        padded[half] = spectrum[half] * 0.5;
        padded[n + half] = spectrum[half] * 0.5;
    } else {
        for k in 0..=half {
            padded[k] = spectrum[k];
        }
        for k in half + 1..n {
            padded[n + k] = spectrum[k];
        }
    }
    dft_in_place(&mut padded, Direction::Inverse);
    let scale = 1.0 / n as f64;
    padded.truncate(2 * n - 1);
    for z in padded.iter_mut() {
        *z *= scale;
    }
    padded
}
