//! Wigner quasi-probability on a phase-space grid.
//!
//! `W(x,p) = (2πħ)⁻¹ ∫ dy ψ*(x + y/2) e^{ipy/ħ} ψ(x − y/2)`, normalized so
//! that `∫∫ W dx dp = 1` for a unit-norm state.
//!
//! The state is interpolated to the half-step grid (band-limited), which
//! lets `y` advance in steps of `dx` and keeps the full dual momentum range
//! `[−πħ/dx, πħ/dx)` free of aliasing. The `y` sum is then a zero-padded
//! DFT of length `2n`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::fft::{self, Direction};
use crate::grid::{Grid1D, PhysParams, WaveFunction};
use crate::linalg::CMatrix;
use crate::error::invalid;
use crate::{Error, Result};

/// Largest imaginary residue tolerated before the transform is rejected.
pub const MAX_IMAG_RESIDUE: f64 = 1e-10;

/// Tolerance on `Σ|ψ|²dx − 1` accepted by [`wigner_transform`].
pub const NORM_TOL: f64 = 1e-8;

/// Real phase-space density sampled on `x_axis × p_axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    x_axis: Grid1D,
    p_axis: Grid1D,
    values: Vec<f64>,
    params: PhysParams,
    imag_residue: f64,
}

impl WignerGrid {
    /// Wraps precomputed values laid out row-major by `x` (`values[j*np + k]`).
    pub fn from_values(x_axis: Grid1D, p_axis: Grid1D, values: Vec<f64>, params: PhysParams) -> Result<Self> {
        let expected = x_axis.len() * p_axis.len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Wigner values"));
        }
        Ok(Self {
            x_axis,
            p_axis,
            values,
            params,
            imag_residue: 0.0,
        })
    }

    pub fn x_axis(&self) -> &Grid1D {
        &self.x_axis
    }

    pub fn p_axis(&self) -> &Grid1D {
        &self.p_axis
    }

    pub fn params(&self) -> PhysParams {
        self.params
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest `|Im W|` seen before the imaginary part was discarded.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.p_axis.len() + k]
    }

    pub fn cell_area(&self) -> f64 {
        self.x_axis.dx() * self.p_axis.dx()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    pub fn abs_integral(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.cell_area()
    }

    /// `∫ W dp` at each `x`.
    pub fn marginal_x(&self) -> Vec<f64> {
        let np = self.p_axis.len();
        let dp = self.p_axis.dx();
        self.values.chunks(np).map(|row| row.iter().sum::<f64>() * dp).collect()
    }

    /// `∫ W dx` at each `p`.
    pub fn marginal_p(&self) -> Vec<f64> {
        let np = self.p_axis.len();
        let dx = self.x_axis.dx();
        let mut out = alloc::vec![0.0; np];
        for row in self.values.chunks(np) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v * dx;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// Sum of `|W_a − W_b| dx dp`.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.x_axis != other.x_axis || self.p_axis != other.p_axis {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.cell_area())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.x_axis != other.x_axis || self.p_axis != other.p_axis {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Shared transform: `corr(c, s)` returns the product of amplitudes at
/// half-step indices `c ± s`, where `c = 2j` labels grid point `x_j`.
///
/// The momentum axis is the dual grid refined `oversample` times. Finer `p`
/// samples come from a longer zero-padded DFT; since the `y` support is
/// finite this is exact interpolation, not an approximation.
fn wigner_core(
    grid: Grid1D,
    params: PhysParams,
    oversample: usize,
    corr: impl Fn(usize, usize, bool) -> Complex64,
) -> Result<WignerGrid> {
    if oversample == 0 {
        return Err(invalid("oversample", "must be at least 1"));
    }
    let n = grid.len();
    let dual = grid.momentum_grid(params.hbar);
    let np = n * oversample;
    let p_axis = Grid1D::new(dual.x_min(), dual.x_min() + (np - 1) as f64 * dual.dx() / oversample as f64, np)?;
    let len = 2 * np;
    let last = 2 * n - 2;
    let pref = grid.dx() / (2.0 * PI * params.hbar);
    let offset = 2 * (n / 2) * oversample;
    let mut values = Vec::with_capacity(n * np);
    let mut buf = alloc::vec![Complex64::zero(); len];
    let mut residue = 0.0f64;
    for j in 0..n {
        let c = 2 * j;
        let reach = c.min(last - c);
        buf.iter_mut().for_each(|z| *z = Complex64::zero());
        buf[0] = corr(c, 0, true);
        for s in 1..=reach {
            buf[s] = corr(c, s, true);
            buf[len - s] = corr(c, s, false);
        }
        fft::dft_in_place(&mut buf, Direction::Inverse);
        for k in 0..np {
            let q = (2 * k + len - offset) % len;
            let w = buf[q] * pref;
            residue = residue.max(w.im.abs());
            values.push(w.re);
        }
    }
    if residue > MAX_IMAG_RESIDUE {
        return Err(Error::NonRealWigner(residue));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Wigner values"));
    }
    Ok(WignerGrid {
        x_axis: grid,
        p_axis,
        values,
        params,
        imag_residue: residue,
    })
}

/// Wigner function of a normalized pure state on the grid and its dual
/// momentum grid.
pub fn wigner_transform(psi: &WaveFunction) -> Result<WignerGrid> {
    wigner_transform_oversampled(psi, 1)
}

/// As [`wigner_transform`], with `oversample` momentum samples per dual-grid
/// spacing. Useful when interference fringes along `p` are only a few
/// `dp` wide and sums of `|W|` need resolving.
pub fn wigner_transform_oversampled(psi: &WaveFunction, oversample: usize) -> Result<WignerGrid> {
    let n2 = psi.norm_squared();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n2));
    }
    let u = fft::upsample_half_step(psi.amplitudes());
    // y = +s dx: ψ*(x + y/2) ψ(x − y/2); y = −s dx swaps the two points.
    wigner_core(*psi.grid(), psi.params(), oversample, |c, s, positive| {
        if positive {
            u[c + s].conj() * u[c - s]
        } else {
            u[c - s].conj() * u[c + s]
        }
    })
}

/// Wigner function of a density operator given by its position-space
/// kernel `ρ(x_a, x_b)` on `grid`:
/// `W(x,p) = (2πħ)⁻¹ ∫ dy e^{ipy/ħ} ρ(x − y/2, x + y/2)`.
pub fn wigner_from_kernel(grid: Grid1D, params: PhysParams, rho: &CMatrix) -> Result<WignerGrid> {
    wigner_from_kernel_oversampled(grid, params, rho, 1)
}

pub fn wigner_from_kernel_oversampled(
    grid: Grid1D,
    params: PhysParams,
    rho: &CMatrix,
    oversample: usize,
) -> Result<WignerGrid> {
    let n = grid.len();
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rho.rows(),
        });
    }
    let m = 2 * n - 1;
    // Interpolate rows, then columns.
    let mut rows_up = CMatrix::zeros(n, m);
    for a in 0..n {
        let up = fft::upsample_half_step(rho.row(a));
        rows_up.row_mut(a).copy_from_slice(&up);
    }
    let mut full = CMatrix::zeros(m, m);
    for b in 0..m {
        let col: Vec<Complex64> = (0..n).map(|a| rows_up[(a, b)]).collect();
        let up = fft::upsample_half_step(&col);
        for (a, z) in up.into_iter().enumerate() {
            full[(a, b)] = z;
        }
    }
    wigner_core(grid, params, oversample, |c, s, positive| {
        if positive {
            full[(c - s, c + s)]
        } else {
            full[(c + s, c - s)]
        }
    })
}

/// `∫∫ W(x,p) O(x,p) dx dp`.
pub fn expectation_phase_space(w: &WignerGrid, observable: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let np = w.p_axis.len();
    let mut acc = 0.0;
    for (j, row) in w.values.chunks(np).enumerate() {
        let x = w.x_axis.x(j);
        for (k, v) in row.iter().enumerate() {
            let o = observable(x, w.p_axis.x(k));
            if !o.is_finite() {
                return Err(Error::NonFinite("phase-space observable"));
            }
            acc += v * o;
        }
    }
    Ok(acc * w.cell_area())
}

/// Negativity ratio `f = ∫|W| / ∫W`; equals 1 exactly when `W ≥ 0`.
pub fn negativity_ratio(w: &WignerGrid) -> Result<f64> {
    let total: f64 = w.values.iter().sum();
    let abs: f64 = w.values.iter().map(|v| v.abs()).sum();
    if total == 0.0 || total.abs() <= 1e-14 * abs || !total.is_finite() {
        return Err(Error::VanishingIntegral);
    }
    Ok(abs / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::momentum_representation;

    fn setup() -> (Grid1D, PhysParams) {
        (Grid1D::symmetric(10.0, 128).unwrap(), PhysParams::default())
    }

    #[test]
    fn rejects_unnormalized() {
        let (g, p) = setup();
        let psi = WaveFunction::gaussian(g, p, 0.0, 1.0, 0.0).unwrap().scaled(Complex64::new(2.0, 0.0));
        assert!(matches!(wigner_transform(&psi), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn gaussian_matches_closed_form() {
        let (g, p) = setup();
        let s = 1.3;
        let psi = WaveFunction::gaussian(g, p, 0.0, s, 0.0).unwrap();
        let w = wigner_transform(&psi).unwrap();
        for j in 0..g.len() {
            for k in 0..g.len() {
                let (x, pk) = (g.x(j), w.p_axis().x(k));
                let exact = (-x * x / (s * s) - s * s * pk * pk).exp() / PI;
                assert!((w.value(j, k) - exact).abs() < 1e-12);
            }
        }
        assert!(w.imag_residue() < 1e-14);
        assert!((w.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginals() {
        let (g, p) = setup();
        let psi = WaveFunction::cat(g, p, 2.0, 0.9, false).unwrap();
        let w = wigner_transform(&psi).unwrap();
        for (m, z) in w.marginal_x().iter().zip(psi.amplitudes()) {
            assert!((m - z.norm_sqr()).abs() < 1e-10);
        }
        let phi = momentum_representation(&psi);
        for (m, z) in w.marginal_p().iter().zip(phi.amplitudes()) {
            assert!((m - z.norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn density_kernel_route_agrees_with_pure_route() {
        let (g, p) = setup();
        let psi = WaveFunction::cat(g, p, 2.5, 1.0, true).unwrap();
        let a = psi.amplitudes();
        let rho = CMatrix::from_fn(g.len(), g.len(), |i, j| a[i] * a[j].conj());
        let w1 = wigner_transform(&psi).unwrap();
        let w2 = wigner_from_kernel(g, p, &rho).unwrap();
        assert!(w1.max_abs_diff(&w2).unwrap() < 1e-13);
    }

    #[test]
    fn ratio_is_scale_free_and_one_for_gaussians() {
        let (g, p) = setup();
        let w = wigner_transform(&WaveFunction::gaussian(g, p, 0.3, 0.8, 0.4).unwrap()).unwrap();
        assert!((negativity_ratio(&w).unwrap() - 1.0).abs() < 1e-8);
        let cat = wigner_transform(&WaveFunction::cat(g, p, 3.0, 1.0, false).unwrap()).unwrap();
        let f = negativity_ratio(&cat).unwrap();
        assert!(f > 1.0);
        assert!((negativity_ratio(&cat.scaled(3.7)).unwrap() - f).abs() < 1e-13);
        let zero = WignerGrid::from_values(g, *w.p_axis(), alloc::vec![0.0; g.len() * g.len()], p).unwrap();
        assert_eq!(negativity_ratio(&zero), Err(Error::VanishingIntegral));
    }

    #[test]
    fn oversampling_refines_momentum_only() {
        let (g, p) = setup();
        let s = 0.7;
        let psi = WaveFunction::gaussian(g, p, 0.5, s, -1.0).unwrap();
        let coarse = wigner_transform(&psi).unwrap();
        let fine = wigner_transform_oversampled(&psi, 4).unwrap();
        assert_eq!(fine.p_axis().len(), 4 * g.len());
        assert!((fine.p_axis().dx() * 4.0 - coarse.p_axis().dx()).abs() < 1e-12);
        for j in 0..g.len() {
            for k in 0..g.len() {
                assert!((coarse.value(j, k) - fine.value(j, 4 * k)).abs() < 1e-13);
            }
            for k in 0..fine.p_axis().len() {
                let (x, q) = (g.x(j) - 0.5, fine.p_axis().x(k) + 1.0);
                let exact = (-x * x / (s * s) - s * s * q * q).exp() / PI;
                assert!((fine.value(j, k) - exact).abs() < 1e-12);
            }
        }
        assert!((fine.integral() - 1.0).abs() < 1e-12);
        assert!(wigner_transform_oversampled(&psi, 0).is_err());
    }

    #[test]
    fn harmonic_energy_of_ground_state() {
        let (g, _) = setup();
        let p = PhysParams::new(0.9, 1.4).unwrap();
        let omega = 1.7;
        let s = (p.hbar / (p.mass * omega)).sqrt();
        let psi = WaveFunction::gaussian(g, p, 0.0, s, 0.0).unwrap();
        let w = wigner_transform(&psi).unwrap();
        let e = expectation_phase_space(&w, |x, k| k * k / (2.0 * p.mass) + 0.5 * p.mass * omega * omega * x * x).unwrap();
        assert!((e - 0.5 * p.hbar * omega).abs() < 1e-10);
    }
}
