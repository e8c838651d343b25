//! Two free particles with position-correlated initial state.
//!
//! The perfectly correlated `δ(x − y)` is replaced by a Gaussian of width
//! `s` in the relative coordinate times a broad envelope in the centre of
//! mass:
//!
//! ```text
//! ψ(x, y) ∝ exp(−(x−y)²/4s²) · exp(−(x+y)²/16E²)
//! ```
//!
//! so that `|ψ|²` has `⟨(x−y)²⟩ = s²` and `⟨(x+y)²⟩ = 4E²`. The momentum
//! correlation is `(s² − 4E²)/(s² + 4E²)`, tending to `−1` as `s/E → 0`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::invalid;
use crate::grid::{to_momentum, to_position, Grid1D, Kernel, PhysParams, Regime, WaveFunction};
use crate::kernels::{free_kernel_euclidean, free_kernel_minkowski};
use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Cells at each edge watched by the escape guard, as a fraction of `n`.
pub const EDGE_BAND: f64 = 1.0 / 32.0;

/// Largest share of `Σ|ψ|²` allowed inside the edge band after evolution.
pub const EDGE_TOL: f64 = 1e-6;

/// Norm tolerance for states handed to [`momentum_anticorrelation`].
pub const PAIR_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationWidth(f64);

impl CorrelationWidth {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid("s", "correlation width must be positive and finite"));
        }
        Ok(Self(s))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Amplitudes `ψ(x_a, y_b)` stored at `(a, b)`; both particles share `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWaveFunction {
    grid: Grid1D,
    amplitudes: CMatrix,
    params: PhysParams,
}

impl PairWaveFunction {
    pub fn new(grid: Grid1D, amplitudes: CMatrix, params: PhysParams) -> Result<Self> {
        let n = grid.len();
        if amplitudes.rows() != n || amplitudes.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: amplitudes.rows(),
            });
        }
        if !amplitudes.is_finite() {
            return Err(Error::NonFinite("pair amplitudes"));
        }
        Ok(Self {
            grid,
            amplitudes,
            params,
        })
    }

    pub fn from_fn(grid: Grid1D, params: PhysParams, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, CMatrix::from_fn(n, n, |a, b| f(grid.x(a), grid.x(b))), params)
    }

    /// `ψ₁(x) ψ₂(y)`.
    pub fn product(first: &WaveFunction, second: &WaveFunction) -> Result<Self> {
        if first.grid() != second.grid() {
            return Err(Error::GridMismatch);
        }
        let (a, b) = (first.amplitudes(), second.amplitudes());
        let n = a.len();
        Self::new(*first.grid(), CMatrix::from_fn(n, n, |i, j| a[i] * b[j]), first.params())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> PhysParams {
        self.params
    }

    pub fn amplitudes(&self) -> &CMatrix {
        &self.amplitudes
    }

    /// `Σ|ψ|² dx dy`.
    pub fn norm_squared(&self) -> f64 {
        let dx = self.grid.dx();
        self.amplitudes.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::NotNormalized(n2));
        }
        let s = Complex64::new(1.0 / n2.sqrt(), 0.0);
        self.amplitudes = self.amplitudes.scale(s);
        Ok(())
    }

    /// `∫∫ |ψ|² g(x, y)`.
    pub fn position_average(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.grid.len();
        let dx = self.grid.dx();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += self.amplitudes[(a, b)].norm_sqr() * g(self.grid.x(a), self.grid.x(b));
            }
        }
        acc * dx * dx
    }
}

/// Which tensor slot an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    First,
    Second,
}

pub fn epr_initial_pair(grid: Grid1D, params: PhysParams, s: CorrelationWidth, envelope_width: f64) -> Result<PairWaveFunction> {
    let s = s.get();
    if !(envelope_width.is_finite() && envelope_width > s) {
        return Err(invalid("envelope_width", "must exceed the correlation width"));
    }
    let e = envelope_width;
    let mut pair = PairWaveFunction::from_fn(grid, params, |x, y| {
        let u = x - y;
        let v = x + y;
        Complex64::new((-u * u / (4.0 * s * s) - v * v / (16.0 * e * e)).exp(), 0.0)
    })?;
    pair.normalize()?;
    Ok(pair)
}

/// `ψ'(x, y) = Σ K(x, x') ψ(x', y) dx` (first) or the same along `y`.
pub fn apply_kernel_axis(kernel: &Kernel, psi: &PairWaveFunction, particle: Particle) -> Result<PairWaveFunction> {
    if *kernel.grid() != psi.grid {
        return Err(Error::GridMismatch);
    }
    let dx = Complex64::new(psi.grid.dx(), 0.0);
    let k = kernel.entries();
    let out = match particle {
        Particle::First => k.matmul(&psi.amplitudes)?,
        Particle::Second => psi.amplitudes.matmul(&k.transpose())?,
    };
    PairWaveFunction::new(psi.grid, out.scale(dx), psi.params)
}

/// Free propagation of both particles for time `t`, one closed-form kernel
/// per tensor slot. The Euclidean result keeps the raw heat-kernel weight
/// (it is not renormalized).
pub fn evolve_pair(psi: &PairWaveFunction, t: f64, regime: Regime) -> Result<PairWaveFunction> {
    let k = match regime {
        Regime::Minkowski => free_kernel_minkowski(psi.grid, t, psi.params)?,
        Regime::Euclidean => free_kernel_euclidean(psi.grid, t, psi.params)?,
    };
    let out = apply_kernel_axis(&k, &apply_kernel_axis(&k, psi, Particle::First)?, Particle::Second)?;
    check_edges(&out)?;
    Ok(out)
}

fn check_edges(psi: &PairWaveFunction) -> Result<()> {
    let n = psi.grid.len();
    let band = ((n as f64 * EDGE_BAND).ceil() as usize).max(1);
    let mut edge = 0.0;
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            let w = psi.amplitudes[(a, b)].norm_sqr();
            total += w;
            if a < band || b < band || a >= n - band || b >= n - band {
                edge += w;
            }
        }
    }
    if total > 0.0 && edge > EDGE_TOL * total {
        return Err(Error::GridEscape(edge / total));
    }
    Ok(())
}

fn transform_axis(psi: &CMatrix, grid: &Grid1D, hbar: f64, particle: Particle, to_p: bool) -> CMatrix {
    let n = grid.len();
    let apply = |v: &[Complex64]| {
        if to_p {
            to_momentum(grid, hbar, v)
        } else {
            to_position(grid, hbar, v)
        }
    };
    let mut out = CMatrix::zeros(n, n);
    match particle {
        Particle::Second => {
            for a in 0..n {
                out.row_mut(a).copy_from_slice(&apply(psi.row(a)));
            }
        }
        Particle::First => {
            for b in 0..n {
                let col = apply(&psi.column(b));
                for (a, z) in col.into_iter().enumerate() {
                    out[(a, b)] = z;
                }
            }
        }
    }
    out
}

/// Joint momentum probabilities per cell, `|φ(p_a, p_b)|² dp²`, on the dual
/// momentum grid; `values[a*n + b]` belongs to `(p_x, p_y) = (p_a, p_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub p_axis: Grid1D,
    pub values: Vec<f64>,
}

impl JointDistribution {
    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.p_axis.len() + b]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Conditional distribution of the second particle given the first sits
    /// in cell `a`, normalized to unit sum.
    pub fn conditional_second(&self, a: usize) -> Result<Vec<f64>> {
        let n = self.p_axis.len();
        let row = &self.values[a * n..(a + 1) * n];
        let s: f64 = row.iter().sum();
        if !(s > 0.0) {
            return Err(Error::VanishingIntegral);
        }
        Ok(row.iter().map(|v| v / s).collect())
    }
}

pub fn momentum_amplitudes(psi: &PairWaveFunction) -> CMatrix {
    let h = psi.params.hbar;
    let tmp = transform_axis(&psi.amplitudes, &psi.grid, h, Particle::First, true);
    transform_axis(&tmp, &psi.grid, h, Particle::Second, true)
}

pub fn momentum_distribution(psi: &PairWaveFunction) -> JointDistribution {
    let p_axis = psi.grid.momentum_grid(psi.params.hbar);
    let dp = p_axis.dx();
    let values = momentum_amplitudes(psi)
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr() * dp * dp)
        .collect();
    JointDistribution { p_axis, values }
}

/// Pearson correlation of `(p_x, p_y)` under the joint momentum distribution.
/// The state must be normalized to within [`PAIR_NORM_TOL`], which leaves
/// room for the small norm drift of a discretized real-time kernel.
pub fn momentum_anticorrelation(psi: &PairWaveFunction) -> Result<f64> {
    let n2 = psi.norm_squared();
    if (n2 - 1.0).abs() > PAIR_NORM_TOL {
        return Err(Error::NotNormalized(n2));
    }
    pearson(&momentum_distribution(psi))
}

pub fn pearson(dist: &JointDistribution) -> Result<f64> {
    let n = dist.p_axis.len();
    let total = dist.total();
    if !(total > 0.0) {
        return Err(Error::VanishingIntegral);
    }
    let (mut mx, mut my) = (0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let w = dist.value(a, b);
            mx += w * dist.p_axis.x(a);
            my += w * dist.p_axis.x(b);
        }
    }
    mx /= total;
    my /= total;
    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
    for a in 0..n {
        let dx = dist.p_axis.x(a) - mx;
        for b in 0..n {
            let w = dist.value(a, b);
            let dy = dist.p_axis.x(b) - my;
            vx += w * dx * dx;
            vy += w * dy * dy;
            cxy += w * dx * dy;
        }
    }
    let scale = vx.max(vy);
    if !(scale > 0.0) || vx <= 1e-14 * scale || vy <= 1e-14 * scale {
        return Err(Error::ZeroVariance);
    }
    Ok(cxy / (vx * vy).sqrt())
}

/// Post-selects `particle` on momenta in `[p_lo, p_hi]` and renormalizes.
pub fn condition_momentum_window(psi: &PairWaveFunction, particle: Particle, p_lo: f64, p_hi: f64) -> Result<PairWaveFunction> {
    if !(p_lo <= p_hi) {
        return Err(invalid("window", "p_lo must not exceed p_hi"));
    }
    let h = psi.params.hbar;
    let p_axis = psi.grid.momentum_grid(h);
    let mut phi = transform_axis(&psi.amplitudes, &psi.grid, h, particle, true);
    let n = psi.grid.len();
    for a in 0..n {
        for b in 0..n {
            let k = match particle {
                Particle::First => a,
                Particle::Second => b,
            };
            let p = p_axis.x(k);
            if p < p_lo || p > p_hi {
                phi[(a, b)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let back = transform_axis(&phi, &psi.grid, h, particle, false);
    let mut out = PairWaveFunction::new(psi.grid, back, psi.params)?;
    if out.norm_squared() <= 0.0 {
        return Err(Error::VanishingIntegral);
    }
    out.normalize()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Grid1D, PhysParams) {
        (Grid1D::symmetric(10.0, 128).unwrap(), PhysParams::default())
    }

    #[test]
    fn widths_validated() {
        let (g, p) = setup();
        assert!(CorrelationWidth::new(0.0).is_err());
        let s = CorrelationWidth::new(2.0).unwrap();
        assert!(epr_initial_pair(g, p, s, 1.0).is_err());
    }

    #[test]
    fn initial_pair_moments_and_symmetry() {
        let (g, p) = setup();
        let (s, e) = (0.5, 1.0);
        let pair = epr_initial_pair(g, p, CorrelationWidth::new(s).unwrap(), e).unwrap();
        assert!((pair.norm_squared() - 1.0).abs() < 1e-12);
        assert_eq!(pair.amplitudes().transpose(), *pair.amplitudes());
        let rel = pair.position_average(|x, y| (x - y).powi(2));
        assert!((rel - s * s).abs() < 1e-10, "{rel}");
        let com = pair.position_average(|x, y| (x + y).powi(2));
        assert!((com - 4.0 * e * e).abs() < 1e-8, "{com}");
    }

    #[test]
    fn correlation_closed_form() {
        let (g, p) = setup();
        let (s, e) = (0.6, 1.2);
        let pair = epr_initial_pair(g, p, CorrelationWidth::new(s).unwrap(), e).unwrap();
        let c = momentum_anticorrelation(&pair).unwrap();
        let expect = (s * s - 4.0 * e * e) / (s * s + 4.0 * e * e);
        assert!((c - expect).abs() < 1e-10, "{c} {expect}");
    }

    #[test]
    fn product_state_is_uncorrelated() {
        let (g, p) = setup();
        let a = WaveFunction::gaussian(g, p, 1.0, 1.1, 0.4).unwrap();
        let b = WaveFunction::cat(g, p, 2.0, 0.8, true).unwrap();
        let pair = PairWaveFunction::product(&a, &b).unwrap();
        assert!(momentum_anticorrelation(&pair).unwrap().abs() < 1e-8);
    }

    #[test]
    fn axis_kernels_commute() {
        let (g, p) = setup();
        let pair = epr_initial_pair(g, p, CorrelationWidth::new(0.5).unwrap(), 1.5).unwrap();
        let k = free_kernel_euclidean(g, 0.3, p).unwrap();
        let xy = apply_kernel_axis(&k, &apply_kernel_axis(&k, &pair, Particle::First).unwrap(), Particle::Second).unwrap();
        let yx = apply_kernel_axis(&k, &apply_kernel_axis(&k, &pair, Particle::Second).unwrap(), Particle::First).unwrap();
        assert!(xy.amplitudes().max_abs_diff(yx.amplitudes()) < 1e-12);
    }

    #[test]
    fn escape_detected() {
        let (g, p) = setup();
        let pair = epr_initial_pair(g, p, CorrelationWidth::new(0.5).unwrap(), 1.5).unwrap();
        assert!(matches!(evolve_pair(&pair, 20.0, Regime::Euclidean), Err(Error::GridEscape(_))));
    }

    #[test]
    fn conditioning_keeps_window_only() {
        let (g, p) = setup();
        let pair = epr_initial_pair(g, p, CorrelationWidth::new(0.3).unwrap(), 1.5).unwrap();
        let c = condition_momentum_window(&pair, Particle::First, 0.5, 1.5).unwrap();
        assert!((c.norm_squared() - 1.0).abs() < 1e-12);
        let d = momentum_distribution(&c);
        for a in 0..g.len() {
            let px = d.p_axis.x(a);
            if !(0.5..=1.5).contains(&px) {
                for b in 0..g.len() {
                    assert!(d.value(a, b) < 1e-25);
                }
            }
        }
        assert!(condition_momentum_window(&pair, Particle::First, 1.0, 0.0).is_err());
    }
}
