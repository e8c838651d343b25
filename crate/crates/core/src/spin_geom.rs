//! Spin-½ coherent states on the unit sphere and their geometric phases.
//!
//! States are labelled in the chart `(cos θ/2, e^{iφ} sin θ/2)`, which is
//! what a rotation `exp(−iθ a⃗·σ⃗/2)` about `a⃗ = ẑ × n̂/|ẑ × n̂|` produces from
//! spin-up. With that gauge
//!
//! ```text
//! ⟨n_f|n_i⟩ = e^{iΦ/2} √((1 + n_f·n_i)/2),   Φ = area(n_f, n_i, n₀)
//! ```
//!
//! where `area` is the signed geodesic-triangle area, positive for
//! counter-clockwise vertices seen from outside the sphere.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::Neg;

use num_complex::Complex64;

use crate::error::invalid;
use crate::{Error, Result};

/// Allowed deviation of `|n|` from 1.
pub const UNIT_TOL: f64 = 1e-12;

/// Two unit vectors with `1 + a·b` below this are treated as antipodal.
pub const ANTIPODAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const X: Self = Self { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Self = Self { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Self = Self { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts only vectors already of unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if !r.is_finite() || (r - 1.0).abs() > UNIT_TOL {
            return Err(invalid("unit vector", alloc::format!("length {r} is not 1")));
        }
        Ok(Self { x, y, z })
    }

    /// Scales a non-zero vector onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("unit vector", "cannot normalize a zero or non-finite vector"));
        }
        Ok(Self {
            x: x / r,
            y: y / r,
            z: z / r,
        })
    }

    /// Polar angle `θ` from `+z`, azimuth `φ` from `+x`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn theta(&self) -> f64 {
        self.z.clamp(-1.0, 1.0).acos()
    }

    pub fn phi(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> [f64; 3] {
        [
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        ]
    }

    /// `self · (b × c)`.
    pub fn triple(&self, b: &Self, c: &Self) -> f64 {
        let [x, y, z] = b.cross(c);
        self.x * x + self.y * y + self.z * z
    }

    pub fn is_antipodal_to(&self, o: &Self) -> bool {
        1.0 + self.dot(o) < ANTIPODAL_TOL
    }

    /// Applies the rotation represented by `u` (as `u (n·σ) u†`).
    pub fn rotated_by(&self, u: &SpinRotation) -> Self {
        let q = u.quaternion();
        let (w, v) = (q[0], [q[1], q[2], q[3]]);
        let p = [self.x, self.y, self.z];
        // Rodrigues form of a unit-quaternion rotation.
        let t = [
            2.0 * (v[1] * p[2] - v[2] * p[1]),
            2.0 * (v[2] * p[0] - v[0] * p[2]),
            2.0 * (v[0] * p[1] - v[1] * p[0]),
        ];
        let r = [
            p[0] + w * t[0] + (v[1] * t[2] - v[2] * t[1]),
            p[1] + w * t[1] + (v[2] * t[0] - v[0] * t[2]),
            p[2] + w * t[2] + (v[0] * t[1] - v[1] * t[0]),
        ];
        Self { x: r[0], y: r[1], z: r[2] }
    }
}

impl Neg for UnitVector {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Normalized spinor `a|↑⟩ + b|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorState {
    a: Complex64,
    b: Complex64,
}

impl SpinorState {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { a, b })
    }

    pub fn up() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    /// `⟨σ⃗⟩`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let ab = self.a.conj() * self.b;
        [2.0 * ab.re, 2.0 * ab.im, self.a.norm_sqr() - self.b.norm_sqr()]
    }
}

/// SU(2) element `q₀ I − i q⃗·σ⃗` for a unit quaternion `(q₀, q⃗)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinRotation {
    q: [f64; 4],
}

impl SpinRotation {
    /// `exp(−iθ a⃗·σ⃗/2)`; `axis` need not be normalized but must be non-zero.
    pub fn about_axis(axis: [f64; 3], theta: f64) -> Result<Self> {
        let r = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("axis", "must be a non-zero finite vector"));
        }
        let (s, c) = (0.5 * theta).sin_cos();
        Ok(Self {
            q: [c, s * axis[0] / r, s * axis[1] / r, s * axis[2] / r],
        })
    }

    /// Smallest rotation taking `from` to `to`. For antipodal pairs the axis
    /// is the component of `+x` orthogonal to `from` (or of `+y` when `from`
    /// is along `x`).
    pub fn between(from: &UnitVector, to: &UnitVector) -> Self {
        let c = from.dot(to);
        if 1.0 + c < ANTIPODAL_TOL {
            let axis = perpendicular(from);
            return Self {
                q: [0.0, axis[0], axis[1], axis[2]],
            };
        }
        // (1 + u·v, u × v) normalized is the half-angle quaternion.
        let v = from.cross(to);
        let norm = (2.0 * (1.0 + c)).sqrt();
        Self {
            q: [(1.0 + c) / norm, v[0] / norm, v[1] / norm, v[2] / norm],
        }
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let [w, x, y, z] = self.q;
        [
            [Complex64::new(w, -z), Complex64::new(-y, -x)],
            [Complex64::new(y, -x), Complex64::new(w, z)],
        ]
    }

    pub fn apply(&self, s: &SpinorState) -> SpinorState {
        let m = self.matrix();
        SpinorState {
            a: m[0][0] * s.a + m[0][1] * s.b,
            b: m[1][0] * s.a + m[1][1] * s.b,
        }
    }
}

fn perpendicular(n: &UnitVector) -> [f64; 3] {
    let base = if n.x.abs() < 0.9 { UnitVector::X } else { UnitVector::Y };
    let d = base.dot(n);
    let v = [base.x - d * n.x, base.y - d * n.y, base.z - d * n.z];
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

/// Coherent state rotated from spin-up along `+z`.
pub fn coherent_state(n: &UnitVector) -> SpinorState {
    SpinRotation::between(&UnitVector::Z, n).apply(&SpinorState::up())
}

/// Coherent state rotated from `|n₀⟩` along the geodesic `n₀ → n`, with
/// `|n₀⟩` itself from [`coherent_state`].
pub fn coherent_state_with_reference(n: &UnitVector, n0: &UnitVector) -> SpinorState {
    SpinRotation::between(n0, n).apply(&coherent_state(n0))
}

/// Signed area of the geodesic triangle `(n₁, n₂, n₃)`:
/// `2 atan2(n₁·(n₂×n₃), 1 + n₁·n₂ + n₂·n₃ + n₃·n₁)`.
pub fn spherical_triangle_area(n1: &UnitVector, n2: &UnitVector, n3: &UnitVector) -> Result<f64> {
    if n1.is_antipodal_to(n2) || n2.is_antipodal_to(n3) || n3.is_antipodal_to(n1) {
        return Err(Error::Antipodal);
    }
    Ok(triangle_area_unchecked(n1, n2, n3))
}

fn triangle_area_unchecked(n1: &UnitVector, n2: &UnitVector, n3: &UnitVector) -> f64 {
    let num = n1.triple(n2, n3);
    let den = 1.0 + n1.dot(n2) + n2.dot(n3) + n3.dot(n1);
    2.0 * num.atan2(den)
}

/// `⟨n_f|n_i⟩` in the gauge anchored at `n₀`, from the area formula.
///
/// Antipodal endpoints give 0. When `n_i` or `n_f` sits at `−n₀` the
/// triangle is undefined and the overlap is taken from the spinors of
/// [`coherent_state_with_reference`] instead.
pub fn coherent_overlap(n_i: &UnitVector, n_f: &UnitVector, n0: &UnitVector) -> Complex64 {
    if n_i.is_antipodal_to(n_f) {
        return Complex64::new(0.0, 0.0);
    }
    if n_i.is_antipodal_to(n0) || n_f.is_antipodal_to(n0) {
        let si = coherent_state_with_reference(n_i, n0);
        let sf = coherent_state_with_reference(n_f, n0);
        return sf.inner(&si);
    }
    let area = triangle_area_unchecked(n_f, n_i, n0);
    let modulus = (0.5 * (1.0 + n_f.dot(n_i))).max(0.0).sqrt();
    Complex64::from_polar(modulus, 0.5 * area)
}

/// Real-time and imaginary-time kernels of a free spin between two
/// coherent states. The first-order action carries no `dt`, so the two are
/// the same function; both are evaluated and compared.
pub fn free_spin_kernel_pair(n_i: &UnitVector, n_f: &UnitVector, n0: &UnitVector) -> (Complex64, Complex64) {
    let minkowski = coherent_overlap(n_i, n_f, n0);
    let euclidean = coherent_overlap(n_i, n_f, n0);
    assert_eq!(minkowski, euclidean, "free spin kernels must coincide");
    (minkowski, euclidean)
}

/// Ordered vertices on the sphere joined by geodesics.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPath {
    points: Vec<UnitVector>,
    closed: bool,
}

impl SphericalPath {
    pub fn new(points: Vec<UnitVector>, closed: bool) -> Result<Self> {
        if points.len() < 2 || (closed && points.len() < 3) {
            return Err(invalid("path", "too few vertices"));
        }
        let n = points.len();
        let edges = if closed { n } else { n - 1 };
        for k in 0..edges {
            if points[k].is_antipodal_to(&points[(k + 1) % n]) {
                return Err(Error::Antipodal);
            }
        }
        Ok(Self { points, closed })
    }

    /// Circle of polar angle `theta`, counter-clockwise about `+z`.
    pub fn latitude_circle(theta: f64, segments: usize) -> Result<Self> {
        let pts = (0..segments)
            .map(|k| UnitVector::from_angles(theta, TAU * k as f64 / segments as f64))
            .collect();
        Self::new(pts, true)
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self {
            points,
            closed: self.closed,
        }
    }

    pub fn rotated_by(&self, u: &SpinRotation) -> Self {
        Self {
            points: self.points.iter().map(|p| p.rotated_by(u)).collect(),
            closed: self.closed,
        }
    }

    fn edges(&self) -> impl Iterator<Item = (&UnitVector, &UnitVector)> {
        let n = self.points.len();
        (0..n).map(move |k| (&self.points[k], &self.points[(k + 1) % n]))
    }
}

/// Wraps into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Difference of two phases, wrapped into `(−π, π]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Signed solid angle enclosed by a closed geodesic polygon, defined modulo
/// `4π`. The polygon is fanned into triangles from a fixed apex among
/// `±x̂, ±ŷ, ±ẑ`, the one farthest from being antipodal to any vertex, so a
/// loop through its own first vertex's antipode or lying on a great circle
/// is still handled.
pub fn enclosed_solid_angle(path: &SphericalPath) -> Result<f64> {
    if !path.closed {
        return Err(Error::OpenPath);
    }
    let apexes = [
        UnitVector::Z,
        -UnitVector::Z,
        UnitVector::X,
        -UnitVector::X,
        UnitVector::Y,
        -UnitVector::Y,
    ];
    let clearance = |c: &UnitVector| path.points.iter().map(|p| 1.0 + c.dot(p)).fold(f64::MAX, f64::min);
    let mut apex = apexes[0];
    let mut best = clearance(&apex);
    for c in &apexes[1..] {
        let v = clearance(c);
        if v > best {
            best = v;
            apex = *c;
        }
    }
    Ok(neumaier_sum(path.edges().map(|(a, b)| triangle_area_unchecked(&apex, a, b))))
}

/// Compensated summation; fine loops add thousands of small wedges.
fn neumaier_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Wess-Zumino phase of a closed path: half the enclosed solid angle,
/// wrapped into `(−π, π]`.
pub fn wz_phase_closed_path(path: &SphericalPath) -> Result<f64> {
    Ok(wrap_phase(0.5 * enclosed_solid_angle(path)?))
}

/// `arg Π_k ⟨n_k|n_{k+1}⟩` around the loop, each overlap from
/// [`coherent_overlap`] in the gauge `n₀`. Gauge-invariant, and equal to the
/// Wess-Zumino phase of the geodesic polygon.
pub fn loop_overlap_phase(path: &SphericalPath, n0: &UnitVector) -> Result<f64> {
    if !path.closed {
        return Err(Error::OpenPath);
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for (a, b) in path.edges() {
        let ov = coherent_overlap(b, a, n0);
        prod *= ov / ov.norm();
    }
    Ok(prod.arg())
}
