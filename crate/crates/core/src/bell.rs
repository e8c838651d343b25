//! Two-qubit correlations and the CHSH combination.
//!
//! Basis order is `↑↑, ↑↓, ↓↑, ↓↓`, i.e. index `2·q₁ + q₂` with `↑ = 0`.
//! Everything about a state that CHSH can see is in its correlation tensor
//! `T_ij = ⟨σ_i ⊗ σ_j⟩`, with `E(a, b) = aᵀ T b`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::invalid;
use crate::spin_geom::{SpinorState, UnitVector};
use crate::{Error, Result};

/// Norm tolerance for [`TwoQubitState`].
pub const STATE_TOL: f64 = 1e-12;

/// Restarts used when the caller has no preference.
pub const DEFAULT_RESTARTS: usize = 16;

const MAX_SWEEPS: usize = 10_000;

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `σ_x, σ_y, σ_z`.
pub fn pauli() -> [Mat2; 3] {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    [
        [[z, o], [o, z]],
        [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        [[o, z], [z, -o]],
    ]
}

/// `a⃗·σ⃗`.
pub fn spin_along(a: &UnitVector) -> Mat2 {
    let p = pauli();
    let n = a.components();
    let mut m = [[c(0.0, 0.0); 2]; 2];
    for (k, s) in p.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += s[i][j] * n[k];
            }
        }
    }
    m
}

/// `A ⊗ B` in the `2·q₁ + q₂` ordering.
pub fn kron(a: &Mat2, b: &Mat2) -> [[Complex64; 4]; 4] {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i2 in 0..2 {
                for j2 in 0..2 {
                    m[2 * i1 + i2][2 * j1 + j2] = a[i1][j1] * b[i2][j2];
                }
            }
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if !n.is_finite() || (n - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amps })
    }

    /// Scales a non-zero vector to unit norm.
    pub fn normalized(amps: [Complex64; 4]) -> Result<Self> {
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotNormalized(n * n));
        }
        Ok(Self {
            amps: amps.map(|z| z / n),
        })
    }

    pub fn basis(index: usize) -> Result<Self> {
        if index > 3 {
            return Err(Error::IndexOutOfRange { index, lo: 0, hi: 3 });
        }
        let mut amps = [c(0.0, 0.0); 4];
        amps[index] = c(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn product(first: &SpinorState, second: &SpinorState) -> Self {
        let (f, s) = ([first.a(), first.b()], [second.a(), second.b()]);
        Self {
            amps: [f[0] * s[0], f[0] * s[1], f[1] * s[0], f[1] * s[1]],
        }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply(&self, m: &[[Complex64; 4]; 4]) -> [Complex64; 4] {
        let mut out = [c(0.0, 0.0); 4];
        for (i, row) in m.iter().enumerate() {
            out[i] = row.iter().zip(&self.amps).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// `(U₁ ⊗ U₂)|ψ⟩`; both matrices must be unitary.
    pub fn apply_local(&self, u1: &Mat2, u2: &Mat2) -> Result<Self> {
        Self::new(self.apply(&kron(u1, u2)))
    }

    /// Exchanges the two qubits.
    pub fn swapped(&self) -> Self {
        let a = self.amps;
        Self {
            amps: [a[0], a[2], a[1], a[3]],
        }
    }

    pub fn to_density(&self) -> TwoQubitDensity {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.amps[i] * self.amps[j].conj();
            }
        }
        TwoQubitDensity { m }
    }
}

/// Two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity {
    m: [[Complex64; 4]; 4],
}

impl TwoQubitDensity {
    /// Checks Hermiticity and unit trace.
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self> {
        let mut defect = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                defect = defect.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr: Complex64 = (0..4).map(|i| m[i][i]).sum();
        if (tr - 1.0).norm() > STATE_TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed() -> Self {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(0.25, 0.0);
        }
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    /// `tr(ρ O)`.
    pub fn expectation(&self, o: &[[Complex64; 4]; 4]) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += self.m[i][j] * o[j][i];
            }
        }
        acc
    }
}

/// Anything with a two-qubit correlation tensor.
pub trait Correlated {
    fn correlation_tensor(&self) -> [[f64; 3]; 3];
}

impl Correlated for TwoQubitState {
    fn correlation_tensor(&self) -> [[f64; 3]; 3] {
        let p = pauli();
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let v = self.apply(&kron(&p[i], &p[j]));
                t[i][j] = self.amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<Complex64>().re;
            }
        }
        t
    }
}

impl Correlated for TwoQubitDensity {
    fn correlation_tensor(&self) -> [[f64; 3]; 3] {
        let p = pauli();
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = self.expectation(&kron(&p[i], &p[j])).re;
            }
        }
        t
    }
}

/// `(|↑↓⟩ − |↓↑⟩)/√2`.
pub fn singlet() -> TwoQubitState {
    TwoQubitState {
        amps: [c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)],
    }
}

/// Analyzer direction of one detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting(pub UnitVector);

impl MeasurementSetting {
    pub fn direction(&self) -> &UnitVector {
        &self.0
    }

    /// In the x–z plane at angle `angle` from `+z`.
    pub fn in_xz_plane(angle: f64) -> Self {
        Self(UnitVector::from_angles(angle, 0.0))
    }
}

fn bilinear(t: &[[f64; 3]; 3], a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += a[i] * t[i][j] * b[j];
        }
    }
    acc
}

/// `E(a, b) = ⟨(σ⃗·a) ⊗ (σ⃗·b)⟩`.
pub fn correlation(state: &impl Correlated, a: &MeasurementSetting, b: &MeasurementSetting) -> f64 {
    bilinear(&state.correlation_tensor(), &a.0.components(), &b.0.components())
}

/// `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
pub fn chsh_value(
    state: &impl Correlated,
    a: &MeasurementSetting,
    a2: &MeasurementSetting,
    b: &MeasurementSetting,
    b2: &MeasurementSetting,
) -> f64 {
    chsh_from_tensor(&state.correlation_tensor(), &[a.0, a2.0, b.0, b2.0])
}

fn chsh_from_tensor(t: &[[f64; 3]; 3], s: &[UnitVector; 4]) -> f64 {
    let [a, a2, b, b2] = s.map(|v| v.components());
    bilinear(t, &a, &b) - bilinear(t, &a, &b2) + bilinear(t, &a2, &b) + bilinear(t, &a2, &b2)
}

/// Best settings found and the CHSH value they give (non-negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshOptimum {
    /// `a, a′, b, b′`.
    pub settings: [MeasurementSetting; 4],
    pub value: f64,
}

fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
    UnitVector::from_angles(z.clamp(-1.0, 1.0).acos(), phi)
}

fn mat_vec(t: &[[f64; 3]; 3], v: &[f64; 3], transpose: bool) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i] += if transpose { t[j][i] } else { t[i][j] } * v[j];
        }
    }
    out
}

/// Unit vector along `v`, or `fallback` when `v` vanishes.
fn direction_or(v: [f64; 3], fallback: UnitVector) -> UnitVector {
    UnitVector::normalized(v[0], v[1], v[2])
        .ok()
        .filter(|_| v.iter().map(|x| x * x).sum::<f64>() > 1e-28)
        .unwrap_or(fallback)
}

/// Maximizes `S` by alternating exact block updates: with `b, b′` fixed the
/// best `a ∝ T(b − b′)` and `a′ ∝ T(b + b′)`; with `a, a′` fixed,
/// `b ∝ Tᵀ(a + a′)` and `b′ ∝ Tᵀ(a′ − a)`. Each restart begins from settings
/// drawn from a ChaCha stream seeded by `seed`, so results are reproducible.
pub fn chsh_maximize(state: &impl Correlated, restarts: usize, seed: u64) -> Result<ChshOptimum> {
    if restarts == 0 {
        return Err(invalid("restarts", "at least one restart is required"));
    }
    let t = state.correlation_tensor();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ChshOptimum> = None;
    for _ in 0..restarts {
        let mut s = [
            random_unit(&mut rng),
            random_unit(&mut rng),
            random_unit(&mut rng),
            random_unit(&mut rng),
        ];
        let mut value = chsh_from_tensor(&t, &s);
        for _ in 0..MAX_SWEEPS {
            let (b, b2) = (s[2].components(), s[3].components());
            let diff = [b[0] - b2[0], b[1] - b2[1], b[2] - b2[2]];
            let sum = [b[0] + b2[0], b[1] + b2[1], b[2] + b2[2]];
            s[0] = direction_or(mat_vec(&t, &diff, false), s[0]);
            s[1] = direction_or(mat_vec(&t, &sum, false), s[1]);
            let (a, a2) = (s[0].components(), s[1].components());
            let plus = [a[0] + a2[0], a[1] + a2[1], a[2] + a2[2]];
            let minus = [a2[0] - a[0], a2[1] - a[1], a2[2] - a[2]];
            s[2] = direction_or(mat_vec(&t, &plus, true), s[2]);
            s[3] = direction_or(mat_vec(&t, &minus, true), s[3]);
            let next = chsh_from_tensor(&t, &s);
            let done = next - value <= 1e-15 * next.abs().max(1.0);
            value = next;
            if done {
                break;
            }
        }
        if best.is_none_or(|b| value > b.value) {
            best = Some(ChshOptimum {
                settings: s.map(MeasurementSetting),
                value,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Largest `S` attainable for a correlation tensor, `2√(s₁² + s₂²)` with
/// `s₁ ≥ s₂` its two largest singular values.
pub fn chsh_bound_from_tensor(t: &[[f64; 3]; 3]) -> f64 {
    // Singular values squared are the eigenvalues of TᵀT.
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let mut ev = symmetric3_eigenvalues(&m);
    ev.sort_by(|a, b| b.total_cmp(a));
    2.0 * (ev[0].max(0.0) + ev[1].max(0.0)).sqrt()
}

/// Eigenvalues of a real symmetric 3×3 matrix (trigonometric closed form).
fn symmetric3_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if p1 == 0.0 {
        return [m[0][0], m[1][1], m[2][2]];
    }
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| (m[i][j] - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * core::f64::consts::PI / 3.0).cos();
    [e1, 3.0 * q - e1 - e3, e3]
}

/// Controlled-NOT with the first qubit as control: the target flips when
/// the control is `↑`, so `↑↓ ↔ ↑↑` and the `↓` block is untouched.
pub fn cnot(state: &TwoQubitState) -> TwoQubitState {
    let a = state.amps;
    TwoQubitState {
        amps: [a[1], a[0], a[2], a[3]],
    }
}

/// One sample of a CHSH decay or control run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoint {
    pub tau: f64,
    pub chsh_max: f64,
    pub fidelity_to_initial: f64,
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("time samples"));
    }
    Ok(())
}

/// Applies `e^{−Hτ/ħ}` for diagonal `H`, renormalizes, and maximizes CHSH at
/// each `τ`. Energies are measured from the lowest level carrying weight, so
/// the surviving component never underflows; a state supported on a single
/// degenerate level stays put.
pub fn euclidean_chsh_decay(
    state0: &TwoQubitState,
    energies: &[f64; 4],
    hbar: f64,
    tau_samples: &[f64],
    restarts: usize,
    seed: u64,
) -> Result<Vec<DecayPoint>> {
    check_samples(tau_samples)?;
    if !(hbar > 0.0) {
        return Err(invalid("hbar", "must be positive"));
    }
    let amps = state0.amps;
    let e0 = (0..4)
        .filter(|&k| amps[k].norm_sqr() > 0.0)
        .map(|k| energies[k])
        .fold(f64::INFINITY, f64::min);
    tau_samples
        .iter()
        .map(|&tau| {
            if tau < 0.0 {
                return Err(invalid("tau", "must be non-negative"));
            }
            let mut next = [c(0.0, 0.0); 4];
            for k in 0..4 {
                // Entrywise non-negative kernel; empty levels stay empty.
                if amps[k].norm_sqr() > 0.0 {
                    next[k] = amps[k] * (-(energies[k] - e0) * tau / hbar).exp();
                }
            }
            sample(state0, TwoQubitState::normalized(next)?, tau, restarts, seed)
        })
        .collect()
}

/// Real-time counterpart: `e^{−iHt/ħ}` only rephases the basis components.
pub fn minkowski_chsh_control(
    state0: &TwoQubitState,
    energies: &[f64; 4],
    hbar: f64,
    times: &[f64],
    restarts: usize,
    seed: u64,
) -> Result<Vec<DecayPoint>> {
    check_samples(times)?;
    if !(hbar > 0.0) {
        return Err(invalid("hbar", "must be positive"));
    }
    times
        .iter()
        .map(|&t| {
            let mut next = state0.amps;
            for k in 0..4 {
                next[k] *= Complex64::from_polar(1.0, -energies[k] * t / hbar);
            }
            sample(state0, TwoQubitState::normalized(next)?, t, restarts, seed)
        })
        .collect()
}

fn sample(state0: &TwoQubitState, state: TwoQubitState, tau: f64, restarts: usize, seed: u64) -> Result<DecayPoint> {
    Ok(DecayPoint {
        tau,
        chsh_max: chsh_maximize(&state, restarts, seed)?.value,
        fidelity_to_initial: state0.inner(&state).norm_sqr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{PI, SQRT_2};

    #[test]
    fn singlet_basics() {
        let s = singlet();
        let n: f64 = s.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-15);
        let sw = s.swapped();
        for (a, b) in sw.amplitudes().iter().zip(s.amplitudes()) {
            assert_eq!(*a, -*b);
        }
        let t = s.correlation_tensor();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { -1.0 } else { 0.0 };
                assert!((t[i][j] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn correlation_examples() {
        let s = singlet();
        let z = MeasurementSetting(UnitVector::Z);
        let x = MeasurementSetting(UnitVector::X);
        assert!((correlation(&s, &z, &z) + 1.0).abs() < 1e-15);
        assert!(correlation(&s, &z, &x).abs() < 1e-15);
        let upup = TwoQubitState::basis(0).unwrap();
        assert!((correlation(&upup, &z, &z) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coplanar_settings_reach_tsirelson() {
        let s = singlet();
        let set = |deg: f64| MeasurementSetting::in_xz_plane(deg * PI / 180.0);
        let v = chsh_value(&s, &set(0.0), &set(90.0), &set(45.0), &set(135.0));
        assert!((v.abs() - 2.0 * SQRT_2).abs() < 1e-12, "{v}");
        let a = set(10.0);
        let b = set(70.0);
        let deg = chsh_value(&s, &a, &a, &b, &b);
        assert!((deg - 2.0 * correlation(&s, &a, &b)).abs() < 1e-15);
        assert!(deg.abs() <= 2.0);
    }

    #[test]
    fn maximize_examples() {
        let s = chsh_maximize(&singlet(), DEFAULT_RESTARTS, 1).unwrap();
        assert!((s.value - 2.0 * SQRT_2).abs() < 1e-9, "{}", s.value);
        let p = chsh_maximize(&TwoQubitState::basis(0).unwrap(), DEFAULT_RESTARTS, 1).unwrap();
        assert!(p.value <= 2.0 + 1e-6);
        let m = chsh_maximize(&TwoQubitDensity::maximally_mixed(), 4, 1).unwrap();
        assert!(m.value.abs() <= 1e-12);
        assert!(chsh_maximize(&singlet(), 0, 1).is_err());
    }

    #[test]
    fn cnot_demo_and_involution() {
        let h = FRAC_1_SQRT_2;
        let input = TwoQubitState::new([c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        let out = cnot(&input);
        assert_eq!(out.amplitudes(), &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        assert_eq!(cnot(&out), input);
        let v = chsh_maximize(&out, DEFAULT_RESTARTS, 3).unwrap().value;
        assert!((v - 2.0 * SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn bound_from_tensor_matches_known_cases() {
        assert!((chsh_bound_from_tensor(&singlet().correlation_tensor()) - 2.0 * SQRT_2).abs() < 1e-12);
        let up = TwoQubitState::basis(1).unwrap();
        assert!((chsh_bound_from_tensor(&up.correlation_tensor()) - 2.0).abs() < 1e-12);
        let e = symmetric3_eigenvalues(&[[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]]);
        let mut e = e.to_vec();
        e.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip([1.0, 3.0, 5.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn decay_closed_form() {
        let taus = [0.0, 0.5, 1.0, 3.0];
        let traj = euclidean_chsh_decay(&singlet(), &[0.0, 1.0, 2.0, 3.0], 1.0, &taus, DEFAULT_RESTARTS, 9).unwrap();
        for p in &traj {
            let alpha = (-p.tau).exp().atan();
            let expect = 2.0 * (1.0 + (2.0 * alpha).sin().powi(2)).sqrt();
            assert!((p.chsh_max - expect).abs() < 1e-9, "{} {} {}", p.tau, p.chsh_max, expect);
            assert!((p.fidelity_to_initial - (alpha.cos() + alpha.sin()).powi(2) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_support_is_constant() {
        let traj = euclidean_chsh_decay(&singlet(), &[0.0, 4.0, 4.0, 0.0], 1.0, &[0.0, 50.0, 1e4], 4, 2).unwrap();
        for p in &traj {
            assert!((p.chsh_max - 2.0 * SQRT_2).abs() < 1e-9);
            assert!((p.fidelity_to_initial - 1.0).abs() < 1e-12);
        }
    }
}
