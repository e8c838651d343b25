//! Density-operator dynamics in real and imaginary time, the free Wigner
//! shear, and negativity trajectories.
//!
//! A [`DensityMatrix`] stores the operator in the orthonormal grid basis
//! `|j⟩ = √dx δ(x − x_j)`, so `R_jl = ρ(x_j, x_l)·dx` and `tr ρ = Σ R_jj`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::invalid;
use crate::grid::{Grid1D, PhysParams, Regime, WaveFunction};
use crate::kernels::Potential;
use crate::linalg::{CMatrix, HermitianEigen};
use crate::phase_space::{negativity_ratio, wigner_from_kernel_oversampled, WignerGrid};
use crate::{Error, Result};

/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Most negative eigenvalue accepted by [`DensityMatrix::check_positive`].
pub const POSITIVITY_TOL: f64 = -1e-8;

/// Hermiticity tolerance for Hamiltonians, relative to the largest entry.
pub const HAMILTONIAN_TOL: f64 = 1e-12;

/// Smallest trace an imaginary-time step may leave before renormalizing.
pub const TRACE_FLOOR: f64 = 1e-300;

/// Fraction of `∫|W|` the shear may push past the grid edge.
pub const ESCAPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: Grid1D,
    entries: CMatrix,
    params: PhysParams,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace. Positivity is checked on demand
    /// by [`Self::check_positive`], since it needs a full diagonalization.
    pub fn new(grid: Grid1D, entries: CMatrix, params: PhysParams) -> Result<Self> {
        check_dims(&grid, &entries)?;
        if !entries.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let defect = entries.hermitian_defect();
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = entries.trace();
        if (tr - 1.0).norm() > DENSITY_TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        Ok(Self { grid, entries, params })
    }

    /// Divides by the trace first.
    pub fn normalized(grid: Grid1D, entries: CMatrix, params: PhysParams) -> Result<Self> {
        check_dims(&grid, &entries)?;
        let tr = entries.trace().re;
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::TraceCollapse(tr));
        }
        Self::new(grid, entries.scale(Complex64::new(1.0 / tr, 0.0)), params)
    }

    /// `|ψ⟩⟨ψ|`, normalized to unit trace.
    pub fn from_pure(psi: &WaveFunction) -> Result<Self> {
        let v = grid_vector(psi);
        let n = v.len();
        let entries = CMatrix::from_fn(n, n, |a, b| v[a] * v[b].conj());
        Self::normalized(*psi.grid(), entries, psi.params())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> PhysParams {
        self.params
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.entries.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(HermitianEigen::new(&self.entries)?.values)
    }

    pub fn check_positive(&self) -> Result<()> {
        let min = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < POSITIVITY_TOL {
            return Err(invalid("density matrix", alloc::format!("eigenvalue {min:e} below tolerance")));
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized `ψ`.
    pub fn fidelity(&self, psi: &WaveFunction) -> Result<f64> {
        if *psi.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let v = grid_vector(psi);
        let rv = self.entries.mul_vec(&v)?;
        Ok(v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re)
    }

    /// Position-space kernel values `ρ(x_a, x_b) = R_ab / dx`.
    pub fn kernel_values(&self) -> CMatrix {
        self.entries.scale(Complex64::new(1.0 / self.grid.dx(), 0.0))
    }

    pub fn wigner(&self) -> Result<WignerGrid> {
        self.wigner_oversampled(1)
    }

    pub fn wigner_oversampled(&self, oversample: usize) -> Result<WignerGrid> {
        wigner_from_kernel_oversampled(self.grid, self.params, &self.kernel_values(), oversample)
    }
}

fn check_dims(grid: &Grid1D, m: &CMatrix) -> Result<()> {
    let n = grid.len();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if m.rows() != n { m.rows() } else { m.cols() },
        });
    }
    Ok(())
}

/// Coefficients in the orthonormal grid basis, `ψ_j √dx`.
fn grid_vector(psi: &WaveFunction) -> Vec<Complex64> {
    let s = psi.grid().dx().sqrt();
    psi.amplitudes().iter().map(|z| z * s).collect()
}

/// Grid Hamiltonian with its eigendecomposition computed once at
/// construction.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: Grid1D,
    entries: CMatrix,
    params: PhysParams,
    eigen: HermitianEigen,
}

impl Hamiltonian {
    /// `p²/2m + V(x)` with the kinetic term applied exactly on the dual
    /// momentum grid: `T_jl = n⁻¹ Σ_k p_k²/2m · e^{i p_k (x_j − x_l)/ħ}`.
    pub fn new(grid: Grid1D, potential: &dyn Potential, params: PhysParams) -> Result<Self> {
        let n = grid.len();
        let pgrid = grid.momentum_grid(params.hbar);
        let dx = grid.dx();
        // Toeplitz in j − l; the ±p terms pair up and the unpaired Nyquist
        // term is real on the grid, so the sum is real.
        let toeplitz: Vec<f64> = (0..n)
            .map(|d| {
                (0..n)
                    .map(|k| {
                        let p = pgrid.x(k);
                        p * p / (2.0 * params.mass) * (p * d as f64 * dx / params.hbar).cos()
                    })
                    .sum::<f64>()
                    / n as f64
            })
            .collect();
        let mut entries = CMatrix::from_fn(n, n, |j, l| Complex64::new(toeplitz[j.abs_diff(l)], 0.0));
        for j in 0..n {
            let v = potential.value(grid.x(j));
            if !v.is_finite() {
                return Err(Error::NonFinite("potential"));
            }
            entries[(j, j)] += v;
        }
        Self::from_matrix(grid, entries, params)
    }

    pub fn from_matrix(grid: Grid1D, entries: CMatrix, params: PhysParams) -> Result<Self> {
        check_dims(&grid, &entries)?;
        if !entries.is_finite() {
            return Err(Error::NonFinite("Hamiltonian"));
        }
        let defect = entries.hermitian_defect();
        if defect > HAMILTONIAN_TOL * entries.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let eigen = HermitianEigen::new(&entries)?;
        Ok(Self {
            grid,
            entries,
            params,
            eigen,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> PhysParams {
        self.params
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    pub fn energies(&self) -> &[f64] {
        &self.eigen.values
    }

    /// `E₁ − E₀`.
    pub fn spectral_gap(&self) -> f64 {
        match self.eigen.values.as_slice() {
            [e0, e1, ..] => e1 - e0,
            _ => 0.0,
        }
    }

    /// Eigenstate `k` (ascending energy) as a normalized wavefunction.
    pub fn eigenstate(&self, k: usize) -> Result<WaveFunction> {
        let n = self.grid.len();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, lo: 0, hi: n - 1 });
        }
        let s = 1.0 / self.grid.dx().sqrt();
        let amps = (0..n).map(|j| self.eigen.vectors[(j, k)] * s).collect();
        WaveFunction::new(self.grid, amps, self.params)
    }
}

fn check_compatible(rho: &DensityMatrix, h: &Hamiltonian) -> Result<()> {
    if rho.grid != h.grid || rho.params != h.params {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `Ṽ_ab → g(λ_a, λ_b) Ṽ_ab` in the eigenbasis of `H`, then back.
fn spectral_sandwich(rho: &DensityMatrix, h: &Hamiltonian, g: impl Fn(f64, f64) -> Complex64) -> Result<CMatrix> {
    let mut m = h.eigen.to_eigenbasis(&rho.entries)?;
    let vals = &h.eigen.values;
    let n = vals.len();
    for a in 0..n {
        for b in 0..n {
            m[(a, b)] *= g(vals[a], vals[b]);
        }
    }
    h.eigen.from_eigenbasis(&m)
}

/// `e^{−iHt/ħ} ρ e^{iHt/ħ}`.
pub fn evolve_density_minkowski(rho: &DensityMatrix, h: &Hamiltonian, t: f64) -> Result<DensityMatrix> {
    check_compatible(rho, h)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let hbar = h.params.hbar;
    let entries = spectral_sandwich(rho, h, |ea, eb| Complex64::from_polar(1.0, -(ea - eb) * t / hbar))?;
    Ok(DensityMatrix {
        grid: rho.grid,
        entries,
        params: rho.params,
    })
}

/// Sign pattern of the imaginary-time sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EuclideanConvention {
    /// `e^{−Hτ/ħ} ρ e^{+Hτ/ħ}`: a similarity transform; trace-preserving and
    /// the identity on anything commuting with `H`. Components are amplified
    /// by up to `e^{(E_max − E_min)τ/ħ}`, so on a grid with a large kinetic
    /// range only short times stay free of amplified roundoff.
    Similarity,
    /// `e^{−Hτ/ħ} ρ e^{−Hτ/ħ} / tr(·)`: damps excited components and
    /// projects onto the ground state as `τ → ∞`.
    Symmetric,
}

/// Evolved state together with the trace before renormalization.
#[derive(Debug, Clone)]
pub struct EuclideanStep {
    pub state: DensityMatrix,
    pub trace_raw: f64,
}

pub fn evolve_density_euclidean(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    tau: f64,
    convention: EuclideanConvention,
) -> Result<DensityMatrix> {
    Ok(evolve_density_euclidean_raw(rho, h, tau, convention)?.state)
}

/// As [`evolve_density_euclidean`], also reporting the raw trace.
///
/// For the symmetric form the exponent is shifted by the ground energy so
/// the working trace only decays through the excited populations; the trace
/// floor applies to that shifted quantity.
pub fn evolve_density_euclidean_raw(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    tau: f64,
    convention: EuclideanConvention,
) -> Result<EuclideanStep> {
    check_compatible(rho, h)?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(invalid("tau", "must be non-negative and finite"));
    }
    let hbar = h.params.hbar;
    match convention {
        EuclideanConvention::Similarity => {
            let entries = spectral_sandwich(rho, h, |ea, eb| Complex64::new((-(ea - eb) * tau / hbar).exp(), 0.0))?;
            if !entries.is_finite() {
                return Err(Error::Overflow);
            }
            let trace_raw = entries.trace().re;
            Ok(EuclideanStep {
                state: DensityMatrix {
                    grid: rho.grid,
                    entries,
                    params: rho.params,
                },
                trace_raw,
            })
        }
        EuclideanConvention::Symmetric => {
            let e0 = h.eigen.values.first().copied().unwrap_or(0.0);
            let entries = spectral_sandwich(rho, h, |ea, eb| {
                Complex64::new((-(ea + eb - 2.0 * e0) * tau / hbar).exp(), 0.0)
            })?;
            let shifted = entries.trace().re;
            if !(shifted >= TRACE_FLOOR) || !shifted.is_finite() {
                return Err(Error::TraceCollapse(shifted));
            }
            let trace_raw = shifted * (-2.0 * e0 * tau / hbar).exp();
            Ok(EuclideanStep {
                state: DensityMatrix {
                    grid: rho.grid,
                    entries: entries.scale(Complex64::new(1.0 / shifted, 0.0)),
                    params: rho.params,
                },
                trace_raw,
            })
        }
    }
}

/// Free-particle flow `W(x, p; t) = W(x − pt/m, p; 0)`, linearly
/// interpolated along `x`. Samples whose source lies off the grid are zero.
///
/// Rejected with [`Error::GridEscape`] when more than [`ESCAPE_TOL`] of
/// `∫|W|` would be carried past the edges.
pub fn free_wigner_shear(w: &WignerGrid, t: f64, params: PhysParams) -> Result<WignerGrid> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let xg = *w.x_axis();
    let pg = *w.p_axis();
    let (nx, np) = (xg.len(), pg.len());
    let dx = xg.dx();
    let total = w.abs_integral() / w.cell_area();
    let mut lost = 0.0;
    let mut out = alloc::vec![0.0; nx * np];
    for k in 0..np {
        let shift = pg.x(k) * t / params.mass / dx;
        for j in 0..nx {
            let dest = j as f64 + shift;
            if dest < 0.0 || dest > (nx - 1) as f64 {
                lost += w.value(j, k).abs();
            }
        }
        for j in 0..nx {
            let src = j as f64 - shift;
            let lo = src.floor();
            let frac = src - lo;
            let sample = |i: f64| -> f64 {
                if i < 0.0 || i > (nx - 1) as f64 {
                    0.0
                } else {
                    w.value(i as usize, k)
                }
            };
            out[j * np + k] = if frac == 0.0 {
                sample(lo)
            } else {
                (1.0 - frac) * sample(lo) + frac * sample(lo + 1.0)
            };
        }
    }
    if total > 0.0 && lost > ESCAPE_TOL * total {
        return Err(Error::GridEscape(lost / total));
    }
    WignerGrid::from_values(xg, pg, out, params)
}

/// Smallest positive time at which every row of the shear moves by a whole
/// number of cells: `m n dx² / 2πħ`.
pub fn commensurate_shear_time(grid: &Grid1D, params: PhysParams) -> f64 {
    params.mass * grid.len() as f64 * grid.dx() * grid.dx() / (2.0 * PI * params.hbar)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub tau: f64,
    pub f: f64,
    pub purity: f64,
    pub trace_raw: f64,
}

/// Momentum oversampling used by [`negativity_trajectory`].
pub const TRAJECTORY_P_OVERSAMPLE: usize = 4;

/// Evolves `rho0` to each sample time and records the Wigner negativity
/// ratio. Each sample is evolved from `rho0` directly, not stepwise.
pub fn negativity_trajectory(
    rho0: &DensityMatrix,
    h: &Hamiltonian,
    tau_samples: &[f64],
    regime: Regime,
    convention: EuclideanConvention,
) -> Result<Vec<TrajectoryPoint>> {
    negativity_trajectory_with(rho0, h, tau_samples, regime, convention, TRAJECTORY_P_OVERSAMPLE)
}

pub fn negativity_trajectory_with(
    rho0: &DensityMatrix,
    h: &Hamiltonian,
    tau_samples: &[f64],
    regime: Regime,
    convention: EuclideanConvention,
    p_oversample: usize,
) -> Result<Vec<TrajectoryPoint>> {
    if tau_samples.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(invalid("tau_samples", "must be sorted ascending"));
    }
    tau_samples
        .iter()
        .map(|&tau| {
            let (state, trace_raw) = match regime {
                Regime::Minkowski => (evolve_density_minkowski(rho0, h, tau)?, 1.0),
                Regime::Euclidean => {
                    let step = evolve_density_euclidean_raw(rho0, h, tau, convention)?;
                    (step.state, step.trace_raw)
                }
            };
            let f = negativity_ratio(&state.wigner_oversampled(p_oversample)?)?;
            Ok(TrajectoryPoint {
                tau,
                f,
                purity: state.purity(),
                trace_raw,
            })
        })
        .collect()
}

/// Mixture `Σ w_k |ψ_k⟩⟨ψ_k|`, normalized.
pub fn mixture(states: &[(f64, WaveFunction)]) -> Result<DensityMatrix> {
    let first = states.first().ok_or_else(|| invalid("states", "empty mixture"))?;
    let grid = *first.1.grid();
    let n = grid.len();
    let mut acc = CMatrix::zeros(n, n);
    for (w, psi) in states {
        if *psi.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if !(*w >= 0.0) {
            return Err(invalid("weight", "must be non-negative"));
        }
        let v = grid_vector(psi);
        for a in 0..n {
            for b in 0..n {
                acc[(a, b)] += v[a] * v[b].conj() * *w;
            }
        }
    }
    DensityMatrix::normalized(grid, acc, first.1.params())
}
