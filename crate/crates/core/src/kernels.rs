//! Transition kernels: closed forms for the free particle in both time
//! regimes, time-sliced products of short-time kernels, and the discretized
//! commutator average.
//!
//! A short-time factor over `ε = T/N` is
//!
//! ```text
//! Minkowski:  √(m/2πiħε) · exp( i/ħ · [m(Δx)²/2ε − ε V(x̄)] )
//! Euclidean:  √(m/2πħε)  · exp(−1/ħ · [m(Δx)²/2ε + ε V(x̄)] )
//! ```
//!
//! with `x̄` the midpoint of the two endpoints. `√i` is taken on the
//! principal branch, `1/√i = e^{-iπ/4}`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::invalid;
use crate::grid::{Grid1D, Kernel, PhysParams, Regime, WaveFunction};
use crate::linalg::{CMatrix, HermitianEigen};
use crate::{Error, Result};

/// Potential energy `V(x)`.
pub trait Potential {
    fn value(&self, x: f64) -> f64;

    fn label(&self) -> &str;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FreeParticle;

impl Potential for FreeParticle {
    fn value(&self, _x: f64) -> f64 {
        0.0
    }

    fn label(&self) -> &str {
        "free"
    }
}

/// `½ m ω² (x − x_c)²`.
#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub mass: f64,
    pub omega: f64,
    pub center: f64,
}

impl Harmonic {
    pub fn new(mass: f64, omega: f64) -> Self {
        Self {
            mass,
            omega,
            center: 0.0,
        }
    }
}

impl Potential for Harmonic {
    fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        0.5 * self.mass * self.omega * self.omega * d * d
    }

    fn label(&self) -> &str {
        "harmonic"
    }
}

/// Arbitrary closure potential.
pub struct FnPotential<F> {
    label: String,
    f: F,
}

impl<F: Fn(f64) -> f64> FnPotential<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { label: label.into(), f }
    }
}

impl<F: Fn(f64) -> f64> Potential for FnPotential<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn label(&self) -> &str {
        &self.label
    }
}

fn sample_potential(grid: &Grid1D, v: &dyn Potential) -> Result<()> {
    // Midpoints are sampled too; check both sets.
    let dx = grid.dx();
    for j in 0..grid.len() {
        let x = grid.x(j);
        if !v.value(x).is_finite() || !v.value(x + 0.5 * dx).is_finite() {
            return Err(Error::NonFinite("potential"));
        }
    }
    Ok(())
}

/// Number of time slices and total (real or imaginary) time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicingPlan {
    n_slices: usize,
    total_time: f64,
    regime: Regime,
}

impl SlicingPlan {
    pub fn new(n_slices: usize, total_time: f64, regime: Regime) -> Result<Self> {
        if n_slices == 0 {
            return Err(invalid("n_slices", "must be at least 1"));
        }
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(invalid("total_time", "must be positive and finite"));
        }
        Ok(Self {
            n_slices,
            total_time,
            regime,
        })
    }

    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn epsilon(&self) -> f64 {
        self.total_time / self.n_slices as f64
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("time", "must be positive and finite"));
    }
    Ok(())
}

fn short_time_factor(regime: Regime, params: PhysParams, eps: f64, dx: f64, v_mid: f64) -> Complex64 {
    let PhysParams { hbar, mass } = params;
    let modulus = (mass / (2.0 * PI * hbar * eps)).sqrt();
    match regime {
        Regime::Minkowski => {
            let action = mass * dx * dx / (2.0 * eps) - eps * v_mid;
            Complex64::from_polar(modulus, action / hbar - FRAC_PI_4)
        }
        Regime::Euclidean => {
            let action = mass * dx * dx / (2.0 * eps) + eps * v_mid;
            Complex64::new(modulus * (-action / hbar).exp(), 0.0)
        }
    }
}

fn kernel_from_factor(grid: Grid1D, t: f64, regime: Regime, f: impl Fn(f64, f64) -> Complex64) -> Result<Kernel> {
    let n = grid.len();
    let entries = CMatrix::from_fn(n, n, |a, b| f(grid.x(a), grid.x(b)));
    Kernel::new(grid, entries, t, regime)
}

/// Free-particle real-time kernel `√(m/2πiħT) exp(i m (x_f−x_i)²/2ħT)`.
pub fn free_kernel_minkowski(grid: Grid1D, t: f64, params: PhysParams) -> Result<Kernel> {
    check_time(t)?;
    kernel_from_factor(grid, t, Regime::Minkowski, |xf, xi| {
        short_time_factor(Regime::Minkowski, params, t, xf - xi, 0.0)
    })
}

/// Free-particle imaginary-time (heat) kernel `√(m/2πħT) exp(−m (x_f−x_i)²/2ħT)`.
pub fn free_kernel_euclidean(grid: Grid1D, t: f64, params: PhysParams) -> Result<Kernel> {
    check_time(t)?;
    kernel_from_factor(grid, t, Regime::Euclidean, |xf, xi| {
        short_time_factor(Regime::Euclidean, params, t, xf - xi, 0.0)
    })
}

/// Single short-time factor of a slicing plan.
pub fn slice_kernel(grid: Grid1D, potential: &dyn Potential, plan: &SlicingPlan, params: PhysParams) -> Result<Kernel> {
    sample_potential(&grid, potential)?;
    let eps = plan.epsilon();
    kernel_from_factor(grid, eps, plan.regime, |xf, xi| {
        short_time_factor(plan.regime, params, eps, xf - xi, potential.value(0.5 * (xf + xi)))
    })
}

/// `∫ K_later(x_f, y) K_earlier(y, x_i) dy`.
pub fn compose(later: &Kernel, earlier: &Kernel) -> Result<Kernel> {
    if later.grid() != earlier.grid() {
        return Err(Error::GridMismatch);
    }
    if later.regime() != earlier.regime() {
        return Err(invalid("regime", "cannot compose kernels of different regimes"));
    }
    let entries = compose_entries(later.entries(), earlier.entries(), later.grid().dx())?;
    Kernel::new(
        *later.grid(),
        entries,
        later.time_extent() + earlier.time_extent(),
        later.regime(),
    )
}

fn compose_entries(a: &CMatrix, b: &CMatrix, dx: f64) -> Result<CMatrix> {
    let mut m = a.matmul(b)?;
    for z in m.as_mut_slice() {
        *z *= dx;
    }
    Ok(m)
}

/// Product of `N` short-time factors, formed by repeated squaring.
pub fn sliced_kernel(grid: Grid1D, potential: &dyn Potential, plan: &SlicingPlan, params: PhysParams) -> Result<Kernel> {
    let slice = slice_kernel(grid, potential, plan, params)?;
    let dx = grid.dx();
    let entries = slice
        .entries()
        .power_with(plan.n_slices, |a, b| compose_entries(a, b, dx))?;
    Kernel::new(grid, entries, plan.total_time, plan.regime)
}

/// Applies the `N` short-time factors to `psi` one after another without
/// forming the full product; `O(N n²)` instead of `O(n³ log N)`.
pub fn sliced_apply(
    potential: &dyn Potential,
    plan: &SlicingPlan,
    psi: &WaveFunction,
) -> Result<WaveFunction> {
    let slice = slice_kernel(*psi.grid(), potential, plan, psi.params())?;
    let mut out = psi.clone();
    for _ in 0..plan.n_slices {
        out = crate::grid::apply_kernel(&slice, &out)?;
    }
    Ok(out)
}

/// Lowest `count` energies read off the imaginary-time transfer matrix:
/// `E_k = −ħ ln λ_k / ε` with `λ_k` the largest eigenvalues of `K_ε dx`.
pub fn transfer_energies(
    grid: Grid1D,
    potential: &dyn Potential,
    plan: &SlicingPlan,
    params: PhysParams,
    count: usize,
) -> Result<Vec<f64>> {
    if plan.regime != Regime::Euclidean {
        return Err(invalid("regime", "transfer-matrix energies need imaginary time"));
    }
    let slice = slice_kernel(grid, potential, plan, params)?;
    let t = slice.entries().scale(Complex64::new(grid.dx(), 0.0));
    let eig = HermitianEigen::new(&t)?;
    let eps = plan.epsilon();
    Ok(eig
        .values
        .iter()
        .rev()
        .take(count)
        .map(|&l| -params.hbar * l.ln() / eps)
        .collect())
}

/// Gaussian boundary wavepacket `exp(−(x−c)²/2σ² + i p x/ħ)` (unnormalized;
/// normalization cancels in path-integral averages).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
}

impl GaussianPacket {
    pub fn new(center: f64, width: f64, momentum: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid("width", "must be positive and finite"));
        }
        if !(center.is_finite() && momentum.is_finite()) {
            return Err(Error::NonFinite("packet parameters"));
        }
        Ok(Self {
            center,
            width,
            momentum,
        })
    }
}

/// Path-integral average of
/// `x_j·m(x_j − x_{j−1})/ε − m(x_{j+1} − x_j)/ε·x_j`
/// for a free particle sliced into `N` steps, with `ψ_i(x_0)` and
/// `conj ψ_f(x_N)` at the ends.
///
/// All `N+1` coordinates enter a Gaussian weight `exp(−½ xᵀAx + bᵀx)`, so the
/// average follows from the moments `⟨x_a x_b⟩ = (A⁻¹)_ab + μ_a μ_b` with
/// `μ = A⁻¹ b` (analytically continued for the oscillatory case).
pub fn commutator_expectation(
    plan: &SlicingPlan,
    params: PhysParams,
    initial: &GaussianPacket,
    final_state: &GaussianPacket,
    j: usize,
) -> Result<Complex64> {
    let n = plan.n_slices;
    if n < 2 || j < 1 || j > n - 1 {
        return Err(Error::IndexOutOfRange {
            index: j,
            lo: 1,
            hi: n.saturating_sub(1),
        });
    }
    let PhysParams { hbar, mass } = params;
    let eps = plan.epsilon();
    let coupling = match plan.regime {
        Regime::Minkowski => Complex64::new(0.0, -mass / (hbar * eps)),
        Regime::Euclidean => Complex64::new(mass / (hbar * eps), 0.0),
    };
    let dim = n + 1;
    let mut a = CMatrix::zeros(dim, dim);
    for k in 0..n {
        a[(k, k)] += coupling;
        a[(k + 1, k + 1)] += coupling;
        a[(k, k + 1)] -= coupling;
        a[(k + 1, k)] -= coupling;
    }
    let mut b = alloc::vec![Complex64::new(0.0, 0.0); dim];
    let si = initial.width * initial.width;
    a[(0, 0)] += 1.0 / si;
    b[0] += Complex64::new(initial.center / si, initial.momentum / hbar);
    let sf = final_state.width * final_state.width;
    a[(n, n)] += 1.0 / sf;
    b[n] += Complex64::new(final_state.center / sf, -final_state.momentum / hbar);

    let cov = a.inverse()?;
    let mu = cov.mul_vec(&b)?;
    let second = |p: usize, q: usize| cov[(p, q)] + mu[p] * mu[q];
    let value = (second(j, j) * 2.0 - second(j, j - 1) - second(j, j + 1)) * (mass / eps);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite("commutator average"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{apply_kernel, inner_product};

    fn p() -> PhysParams {
        PhysParams::default()
    }

    #[test]
    fn minkowski_modulus_and_diagonal_phase() {
        let g = Grid1D::symmetric(4.0, 32).unwrap();
        let params = PhysParams::new(0.8, 1.7).unwrap();
        let t = 0.9;
        let k = free_kernel_minkowski(g, t, params).unwrap();
        let expect = (params.mass / (2.0 * PI * params.hbar * t)).sqrt();
        for a in 0..32 {
            for b in 0..32 {
                assert!((k.entry(a, b).norm() - expect).abs() < 1e-12);
            }
            // exponential factor on the diagonal is 1; what remains is 1/√i.
            let phase = k.entry(a, a) / expect;
            assert!((phase - Complex64::from_polar(1.0, -FRAC_PI_4)).norm() < 1e-14);
        }
    }

    #[test]
    fn euclidean_entries_positive_and_rows_normalized() {
        let g = Grid1D::symmetric(8.0, 256).unwrap();
        let t = 0.5;
        let k = free_kernel_euclidean(g, t, p()).unwrap();
        assert!(k.entries().as_slice().iter().all(|z| z.re > 0.0 && z.im == 0.0));
        // 6 standard deviations: a 5σ cut already loses ~6e-7 of the Gaussian.
        let margin = 6.0 * t.sqrt();
        for a in 0..256 {
            let x = g.x(a);
            if x.abs() > 8.0 - margin {
                continue;
            }
            let row: f64 = (0..256).map(|b| k.entry(a, b).re).sum::<f64>() * g.dx();
            assert!((row - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn non_positive_time_rejected() {
        let g = Grid1D::symmetric(1.0, 8).unwrap();
        assert!(free_kernel_minkowski(g, 0.0, p()).is_err());
        assert!(free_kernel_euclidean(g, -1.0, p()).is_err());
        assert!(SlicingPlan::new(0, 1.0, Regime::Euclidean).is_err());
        assert!(SlicingPlan::new(4, 0.0, Regime::Euclidean).is_err());
    }

    #[test]
    fn single_slice_is_closed_form() {
        let g = Grid1D::symmetric(5.0, 64).unwrap();
        for regime in [Regime::Euclidean, Regime::Minkowski] {
            let plan = SlicingPlan::new(1, 0.7, regime).unwrap();
            let sliced = sliced_kernel(g, &FreeParticle, &plan, p()).unwrap();
            let exact = match regime {
                Regime::Euclidean => free_kernel_euclidean(g, 0.7, p()),
                Regime::Minkowski => free_kernel_minkowski(g, 0.7, p()),
            }
            .unwrap();
            assert_eq!(sliced.entries(), exact.entries());
        }
    }

    #[test]
    fn euclidean_sliced_kernel_positive_with_potential() {
        let g = Grid1D::symmetric(6.0, 64).unwrap();
        let v = FnPotential::new("quartic", |x: f64| x.powi(4) - 3.0 * x * x);
        let plan = SlicingPlan::new(8, 1.0, Regime::Euclidean).unwrap();
        let k = sliced_kernel(g, &v, &plan, p()).unwrap();
        assert!(k.entries().as_slice().iter().all(|z| z.re >= 0.0 && z.im == 0.0));
    }

    #[test]
    fn composition_is_associative() {
        let g = Grid1D::symmetric(6.0, 96).unwrap();
        let k1 = free_kernel_minkowski(g, 0.3, p()).unwrap();
        let k2 = free_kernel_minkowski(g, 0.5, p()).unwrap();
        let k3 = free_kernel_minkowski(g, 0.7, p()).unwrap();
        let left = compose(&k1, &compose(&k2, &k3).unwrap()).unwrap();
        let right = compose(&compose(&k1, &k2).unwrap(), &k3).unwrap();
        let scale = left.entries().max_abs();
        assert!(left.entries().max_abs_diff(right.entries()) / scale < 1e-10);
        assert!((left.time_extent() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn mixed_regimes_do_not_compose() {
        let g = Grid1D::symmetric(2.0, 16).unwrap();
        let a = free_kernel_minkowski(g, 0.3, p()).unwrap();
        let b = free_kernel_euclidean(g, 0.3, p()).unwrap();
        assert!(compose(&a, &b).is_err());
    }

    #[test]
    fn kernel_application_is_linear() {
        let g = Grid1D::symmetric(8.0, 128).unwrap();
        let k = free_kernel_minkowski(g, 1.0, p()).unwrap();
        let a = WaveFunction::gaussian(g, p(), -1.0, 0.8, 0.5).unwrap();
        let b = WaveFunction::gaussian(g, p(), 1.5, 1.1, -0.2).unwrap();
        let (al, be) = (Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.4));
        let lhs = apply_kernel(&k, &a.scaled(al).add(&b.scaled(be)).unwrap()).unwrap();
        let rhs = apply_kernel(&k, &a)
            .unwrap()
            .scaled(al)
            .add(&apply_kernel(&k, &b).unwrap().scaled(be))
            .unwrap();
        for (x, y) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn commutator_index_checked() {
        let plan = SlicingPlan::new(4, 1.0, Regime::Minkowski).unwrap();
        let pk = GaussianPacket::new(0.0, 1.0, 0.0).unwrap();
        assert!(commutator_expectation(&plan, p(), &pk, &pk, 0).is_err());
        assert!(commutator_expectation(&plan, p(), &pk, &pk, 4).is_err());
        let one = SlicingPlan::new(1, 1.0, Regime::Minkowski).unwrap();
        assert!(commutator_expectation(&one, p(), &pk, &pk, 1).is_err());
    }

    #[test]
    fn commutator_is_i_hbar_and_hbar() {
        let params = PhysParams::new(0.6, 2.0).unwrap();
        let pi = GaussianPacket::new(-0.5, 1.2, 0.4).unwrap();
        let pf = GaussianPacket::new(0.8, 0.7, -0.3).unwrap();
        for n in [2, 3, 4, 16] {
            for j in 1..n {
                let m = SlicingPlan::new(n, 1.3, Regime::Minkowski).unwrap();
                let v = commutator_expectation(&m, params, &pi, &pf, j).unwrap();
                assert!((v - Complex64::new(0.0, 0.6)).norm() < 1e-10, "{v}");
                let e = SlicingPlan::new(n, 1.3, Regime::Euclidean).unwrap();
                let v = commutator_expectation(&e, params, &pi, &pf, j).unwrap();
                assert!((v - Complex64::new(0.6, 0.0)).norm() < 1e-10, "{v}");
            }
        }
    }

    #[test]
    fn short_minkowski_kernel_keeps_norm() {
        let g = Grid1D::symmetric(10.0, 512).unwrap();
        let psi = WaveFunction::gaussian(g, p(), 0.0, 1.0, 0.0).unwrap();
        let k = free_kernel_minkowski(g, 1.0, p()).unwrap();
        let out = apply_kernel(&k, &psi).unwrap();
        assert!((inner_product(&out, &out).unwrap().re - 1.0).abs() < 1e-6);
    }
}
