//! Brute-force check of the sliced commutator average for small `N`.
//!
//! The oracle integrates the coordinates out one at a time, carrying a
//! function of the form `P(x)·exp(−αx² + βx)` along the chain. Each step is a
//! closed-form Gaussian moment integral, so no matrix inverse is involved.
//! Constant prefactors are dropped: they are shared by numerator and
//! denominator.

use wickbell_core::grid::{PhysParams, Regime};
use wickbell_core::kernels::GaussianPacket;
use wickbell_core::Complex64;

type C = Complex64;

#[derive(Clone)]
struct Carried {
    poly: Vec<C>,
    alpha: C,
    beta: C,
}

/// Bivariate polynomial in `(x, y)`, `coef[n][m]` multiplies `xⁿ yᵐ`.
type Bivariate = Vec<Vec<C>>;

fn double_factorial_odd(k: usize) -> f64 {
    // (2k−1)!!
    (1..=k).map(|i| (2 * i - 1) as f64).product()
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn poly_mul(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[C], n: usize) -> Vec<C> {
    (0..n).fold(vec![C::new(1.0, 0.0)], |acc, _| poly_mul(&acc, a))
}

/// `E[xⁿ]` for `x ~ N(μ, s)` with `μ = μ₀ + μ₁ y`, as a polynomial in `y`.
fn moment(n: usize, mu: [C; 2], s: C) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); n + 1];
    for k in 0..=n / 2 {
        let w = binom(n, 2 * k) * double_factorial_odd(k);
        let term = poly_pow(&mu, n - 2 * k);
        for (i, t) in term.iter().enumerate() {
            out[i] += t * s.powu(k as u32) * w;
        }
    }
    out
}

/// `∫dx f(x) Q(x, y) exp(−c(y − x)²)` as a function of `y`.
fn step(f: &Carried, q: &Bivariate, c: C) -> Carried {
    let a = f.alpha + c;
    // Exponent in x: −a x² + (β + 2c y) x.
    let mu = [f.beta / (a * 2.0), c / a];
    let s = C::new(0.5, 0.0) / a;
    let mut poly = vec![C::new(0.0, 0.0); 1];
    for (i, p) in f.poly.iter().enumerate() {
        for (n, row) in q.iter().enumerate() {
            for (m, qv) in row.iter().enumerate() {
                if *qv == C::new(0.0, 0.0) {
                    continue;
                }
                let mom = moment(i + n, mu, s);
                if poly.len() < mom.len() + m {
                    poly.resize(mom.len() + m, C::new(0.0, 0.0));
                }
                for (k, v) in mom.iter().enumerate() {
                    poly[k + m] += p * qv * v;
                }
            }
        }
    }
    Carried {
        poly,
        alpha: c - c * c / a,
        beta: f.beta * c / a,
    }
}

fn close(f: &Carried, alpha_f: C, beta_f: C) -> C {
    let a = f.alpha + alpha_f;
    let mu = [(f.beta + beta_f) / (a * 2.0), C::new(0.0, 0.0)];
    let s = C::new(0.5, 0.0) / a;
    f.poly
        .iter()
        .enumerate()
        .map(|(n, p)| p * moment(n, mu, s)[0])
        .sum()
}

fn one() -> Bivariate {
    vec![vec![C::new(1.0, 0.0)]]
}

/// Sequential oracle for the same average `commutator_expectation` returns.
pub fn oracle(n: usize, t: f64, regime: Regime, params: PhysParams, pi: &GaussianPacket, pf: &GaussianPacket, j: usize) -> C {
    let eps = t / n as f64;
    let PhysParams { hbar, mass } = params;
    let c = match regime {
        Regime::Minkowski => C::new(0.0, -mass / (2.0 * hbar * eps)),
        Regime::Euclidean => C::new(mass / (2.0 * hbar * eps), 0.0),
    };
    let start = Carried {
        poly: vec![C::new(1.0, 0.0)],
        alpha: C::new(0.5 / (pi.width * pi.width), 0.0),
        beta: C::new(pi.center / (pi.width * pi.width), pi.momentum / hbar),
    };
    let alpha_f = C::new(0.5 / (pf.width * pf.width), 0.0);
    let beta_f = C::new(pf.center / (pf.width * pf.width), -pf.momentum / hbar);
    let z = C::new(0.0, 0.0);
    let u = C::new(1.0, 0.0);
    // Step k integrates x_k against the link (x_k, x_{k+1}).
    // x_j(x_j − x_{j−1}) lives on link j−1 as y² − x y.
    let first: Bivariate = vec![vec![z, z, u], vec![z, -u]];
    // x_j(x_{j+1} − x_j) lives on link j as x y − x².
    let second: Bivariate = vec![vec![z], vec![z, u], vec![-u]];
    let chain = |insert: Option<(usize, &Bivariate)>| {
        let mut f = start.clone();
        for k in 0..n {
            let q = match insert {
                Some((at, q)) if at == k => q.clone(),
                _ => one(),
            };
            f = step(&f, &q, c);
        }
        close(&f, alpha_f, beta_f)
    };
    let denom = chain(None);
    let num = chain(Some((j - 1, &first))) - chain(Some((j, &second)));
    num / denom * (mass / eps)
}
