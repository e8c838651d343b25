//! One function per experiment. Each reads and validates all of its
//! parameters first, then computes, and returns a [`Report`].

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2, TAU};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wickbell_core::bell::{self, MeasurementSetting, TwoQubitState};
use wickbell_core::epr::{self, CorrelationWidth};
use wickbell_core::evolution::{self, DensityMatrix, EuclideanConvention, Hamiltonian};
use wickbell_core::grid::{momentum_representation, Grid1D, PhysParams, Regime, WaveFunction, MIN_POINTS};
use wickbell_core::kernels::{self, FreeParticle, GaussianPacket, Harmonic, SlicingPlan};
use wickbell_core::phase_space::{negativity_ratio, wigner_transform, WignerGrid};
use wickbell_core::spin_geom::{self, SphericalPath, UnitVector};
use wickbell_core::Complex64;

use crate::catalog::Experiment;
use crate::config::{Config, ConfigError};
use crate::error::RunError;
use crate::output::{fmt_f64, Report, Summary, Table};

pub fn run(config: &Config) -> Result<Report, RunError> {
    match config.experiment() {
        Experiment::Wigner => wigner(config),
        Experiment::KernelCheck => kernel_check(config),
        Experiment::Commutator => commutator(config),
        Experiment::Epr => epr_pair(config),
        Experiment::NegativityDecay => negativity_decay(config),
        Experiment::SpinPhase => spin_phase(config),
        Experiment::Chsh => chsh(config),
        Experiment::ChshDecay => chsh_decay(config),
    }
}

fn phys(c: &Config) -> Result<PhysParams, ConfigError> {
    let (hbar, mass) = (c.positive("hbar")?, c.positive("mass")?);
    Ok(PhysParams { hbar, mass })
}

fn grid(c: &Config, points: &str, half_width: &str) -> Result<Grid1D, ConfigError> {
    let n = c.usize_at_least(points, MIN_POINTS)?;
    let l = c.positive(half_width)?;
    Grid1D::symmetric(l, n).map_err(|e| c.reject(points, e.to_string()))
}

fn linspace(max: f64, samples: usize) -> Vec<f64> {
    (0..samples).map(|k| max * k as f64 / (samples - 1) as f64).collect()
}

/// Largest rise between consecutive entries (0 for a non-increasing run).
fn max_rise(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn headline_from(summary: &Summary) -> Vec<String> {
    summary.0.iter().map(|(k, v)| format!("{k} = {v}")).collect()
}

fn kernel_check(c: &Config) -> Result<Report, RunError> {
    let g = grid(c, "n_points", "half_width")?;
    let p = phys(c)?;
    let t = c.positive("total_time")?;
    let slices = c.usize_list("slices", 1)?;
    let margin = c.f64("edge_margin")?;
    if margin < 0.0 {
        return Err(c.reject("edge_margin", "must be non-negative").into());
    }
    // Interior window: at least `margin` diffusion lengths from either edge.
    let cut = g.x_max() - margin * (p.hbar * t / p.mass).sqrt();
    let interior: Vec<usize> = (0..g.len()).filter(|&j| g.x(j).abs() <= cut).collect();
    if interior.is_empty() {
        return Err(c.reject("edge_margin", "leaves no interior grid points").into());
    }

    let exact = kernels::free_kernel_euclidean(g, t, p)?;
    let mut data = Table::new(&["n_slices", "max_abs_dev_interior", "max_abs_dev_full"]);
    let mut devs = Vec::new();
    for &n in &slices {
        let plan = SlicingPlan::new(n, t, Regime::Euclidean)?;
        let k = kernels::sliced_kernel(g, &FreeParticle, &plan, p)?;
        let full = k.entries().max_abs_diff(exact.entries());
        let mut inner = 0.0f64;
        for &a in &interior {
            for &b in &interior {
                inner = inner.max((k.entry(a, b) - exact.entry(a, b)).norm());
            }
        }
        devs.push(inner);
        data.push(vec![n.to_string(), fmt_f64(inner), fmt_f64(full)]);
    }
    let mut s = Summary::default();
    s.num("interior_half_width", cut);
    s.num("final_interior_deviation", *devs.last().expect("non-empty list"));
    s.flag("strictly_decreasing", devs.windows(2).all(|w| w[1] < w[0]));
    Ok(Report {
        data,
        headline: headline_from(&s),
        summary: s,
    })
}

fn packet(c: &Config, prefix: &str) -> Result<GaussianPacket, RunError> {
    let key = |k: &str| format!("{prefix}_{k}");
    let center = c.f64(&key("center"))?;
    let width = c.positive(&key("width"))?;
    let momentum = c.f64(&key("momentum"))?;
    Ok(GaussianPacket::new(center, width, momentum)?)
}

fn commutator(c: &Config) -> Result<Report, RunError> {
    let p = phys(c)?;
    let t = c.positive("total_time")?;
    let slices = c.usize_list("slices", 2)?;
    let (pi, pf) = (packet(c, "initial")?, packet(c, "final")?);

    let mut data = Table::new(&["regime", "n_slices", "j", "re", "im"]);
    let mut s = Summary::default();
    for (regime, label, target) in [
        (Regime::Minkowski, "minkowski", Complex64::new(0.0, p.hbar)),
        (Regime::Euclidean, "euclidean", Complex64::new(p.hbar, 0.0)),
    ] {
        let mut dev = 0.0f64;
        let mut slice_spread = 0.0f64;
        for &n in &slices {
            let plan = SlicingPlan::new(n, t, regime)?;
            let vals = (1..n)
                .map(|j| kernels::commutator_expectation(&plan, p, &pi, &pf, j))
                .collect::<Result<Vec<_>, _>>()?;
            for (j, v) in vals.iter().enumerate() {
                dev = dev.max((v - target).norm());
                slice_spread = slice_spread.max((v - vals[0]).norm());
                data.push(vec![label.into(), n.to_string(), (j + 1).to_string(), fmt_f64(v.re), fmt_f64(v.im)]);
            }
        }
        s.num(&format!("{label}_max_deviation"), dev);
        s.num(&format!("{label}_slice_spread"), slice_spread);
    }
    Ok(Report {
        data,
        headline: headline_from(&s),
        summary: s,
    })
}

fn wigner(c: &Config) -> Result<Report, RunError> {
    let g = grid(c, "n_points", "half_width")?;
    let p = phys(c)?;
    let (x0, sigma, p0) = (c.f64("center")?, c.positive("width")?, c.f64("momentum")?);
    let (sep, cat_w) = (c.f64("cat_separation")?, c.positive("cat_width")?);
    let cells = c.usize_at_least("shear_cells", 1)?;

    let psi = WaveFunction::gaussian(g, p, x0, sigma, p0)?;
    let w = wigner_transform(&psi)?;
    let pg = *w.p_axis();
    let mut analytic_err = 0.0f64;
    for j in 0..g.len() {
        for k in 0..pg.len() {
            let (dx, dp) = (g.x(j) - x0, pg.x(k) - p0);
            let exact = (-dx * dx / (sigma * sigma) - sigma * sigma * dp * dp / (p.hbar * p.hbar)).exp() / (PI * p.hbar);
            analytic_err = analytic_err.max((w.value(j, k) - exact).abs());
        }
    }
    let mx = w
        .marginal_x()
        .iter()
        .zip(psi.amplitudes())
        .map(|(m, z)| (m - z.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let phi = momentum_representation(&psi);
    let mp = w
        .marginal_p()
        .iter()
        .zip(phi.amplitudes())
        .map(|(m, z)| (m - z.norm_sqr()).abs())
        .fold(0.0, f64::max);

    // Odd cat: the interference term is negative at the origin.
    let cat = WaveFunction::cat(g, p, sep, cat_w, false)?;
    let wc = wigner_transform(&cat)?;
    let (j0, k0) = (
        g.nearest_index(0.0).expect("symmetric grid contains 0"),
        pg.nearest_index(0.0).expect("momentum grid contains 0"),
    );

    let t = cells as f64 * evolution::commensurate_shear_time(&g, p);
    let sheared = evolution::free_wigner_shear(&w, t, p)?;
    let mut moved = wickbell_core::grid::apply_kernel(&kernels::free_kernel_minkowski(g, t, p)?, &psi)?;
    moved.normalize()?;
    let continuity = sheared.l1_distance(&wigner_transform(&moved)?)?;

    let mut data = Table::new(&["x", "p", "w_gaussian", "w_cat"]);
    for j in 0..g.len() {
        for k in 0..pg.len() {
            data.push(vec![
                fmt_f64(g.x(j)),
                fmt_f64(pg.x(k)),
                fmt_f64(w.value(j, k)),
                fmt_f64(wc.value(j, k)),
            ]);
        }
    }
    let mut s = Summary::default();
    s.num("gaussian_max_error", analytic_err);
    s.num("gaussian_imag_residue", w.imag_residue());
    s.num("marginal_x_max_error", mx);
    s.num("marginal_p_max_error", mp);
    s.num("cat_origin_x", g.x(j0));
    s.num("cat_origin_p", pg.x(k0));
    s.num("cat_w_origin", wc.value(j0, k0));
    s.num("cat_f", negativity_ratio(&wc)?);
    s.num("shear_time", t);
    s.num("continuity_l1", continuity);
    Ok(Report {
        data,
        headline: headline_from(&s),
        summary: s,
    })
}

fn epr_pair(c: &Config) -> Result<Report, RunError> {
    let g = grid(c, "n_points", "half_width")?;
    let p = phys(c)?;
    let envelope = c.positive("envelope")?;
    let ratio = c.positive("width_ratio")?;
    if ratio >= 1.0 {
        return Err(c.reject("width_ratio", "correlation width must be below the envelope").into());
    }
    let t = c.positive("total_time")?;
    let p_cond = c.f64("condition_p")?;
    let floor = c.f64("export_floor")?;
    let s_width = CorrelationWidth::new(ratio * envelope).map_err(|e| c.reject("width_ratio", e.to_string()))?;

    let pair = epr::epr_initial_pair(g, p, s_width, envelope)?;
    let m = epr::evolve_pair(&pair, t, Regime::Minkowski)?;
    let e = epr::evolve_pair(&pair, t, Regime::Euclidean)?;
    let c0 = epr::momentum_anticorrelation(&pair)?;
    let cm = epr::momentum_anticorrelation(&m)?;
    let (dm, de) = (epr::momentum_distribution(&m), epr::momentum_distribution(&e));
    let pa = dm.p_axis;
    let n = pa.len();

    let mut ratio_err = 0.0f64;
    let mut data = Table::new(&["p_x", "p_y", "probability_minkowski", "probability_euclidean"]);
    for a in 0..n {
        for b in 0..n {
            let (px, py) = (pa.x(a), pa.x(b));
            let vm = dm.value(a, b);
            if vm > 1e-12 {
                let expect = (-(px * px + py * py) * t / (p.mass * p.hbar)).exp();
                ratio_err = ratio_err.max((de.value(a, b) / vm - expect).abs());
            }
            if vm > floor {
                data.push(vec![fmt_f64(px), fmt_f64(py), fmt_f64(vm), fmt_f64(de.value(a, b))]);
            }
        }
    }
    let a = pa
        .nearest_index(p_cond)
        .ok_or_else(|| c.reject("condition_p", "outside the momentum grid"))?;
    let cond = dm.conditional_second(a)?;
    let peak = (0..n).max_by(|&i, &j| cond[i].total_cmp(&cond[j])).expect("non-empty grid");

    let mut s = Summary::default();
    s.num("correlation_width", ratio * envelope);
    s.num("pearson_initial", c0);
    s.num("pearson_minkowski", cm);
    s.num("pearson_change", (cm - c0).abs());
    s.num("norm_minkowski", m.norm_squared());
    s.num("ratio_max_error", ratio_err);
    s.num("conditioned_p", pa.x(a));
    s.num("partner_peak_p", pa.x(peak));
    s.num("peak_offset", (pa.x(peak) + pa.x(a)).abs());
    s.num("dp", pa.dx());
    Ok(Report {
        data,
        headline: headline_from(&s),
        summary: s,
    })
}

fn negativity_decay(c: &Config) -> Result<Report, RunError> {
    let regime = c.choice("regime", &["both", "euclidean", "minkowski"])?;
    let p = phys(c)?;
    let (sep, width) = (c.f64("separation")?, c.positive("width")?);
    let samples = c.usize_at_least("samples", 2)?;
    let oversample = c.usize_at_least("p_oversample", 1)?;
    let (omega, tau_max) = (c.positive("omega")?, c.positive("tau_max")?);
    let t_max = c.positive("t_max")?;
    let g = grid(c, "n_points", "half_width")?;
    let gs = grid(c, "shear_n_points", "shear_half_width")?;

    let mut data = Table::new(&["regime", "tau", "f", "purity", "trace"]);
    let mut s = Summary::default();
    if regime != "minkowski" {
        let cat = WaveFunction::cat(g, p, sep, width, true)?;
        let rho = DensityMatrix::from_pure(&cat)?;
        let h = Hamiltonian::new(g, &Harmonic::new(p.mass, omega), p)?;
        let traj = evolution::negativity_trajectory_with(
            &rho,
            &h,
            &linspace(tau_max, samples),
            Regime::Euclidean,
            EuclideanConvention::Symmetric,
            oversample,
        )?;
        for q in &traj {
            data.push(vec!["euclidean".into(), fmt_f64(q.tau), fmt_f64(q.f), fmt_f64(q.purity), fmt_f64(q.trace_raw)]);
        }
        let f: Vec<f64> = traj.iter().map(|q| q.f).collect();
        s.num("euclidean_initial_f", f[0]);
        s.num("euclidean_final_f", *f.last().expect("samples >= 2"));
        s.num("euclidean_max_step_rise", max_rise(&f));
    }
    if regime != "euclidean" {
        let cat = WaveFunction::cat(gs, p, sep, width, true)?;
        let w0 = wigner_transform(&cat)?;
        let mut f = Vec::with_capacity(samples);
        for t in linspace(t_max, samples) {
            let w = evolution::free_wigner_shear(&w0, t, p)?;
            let fk = negativity_ratio(&w)?;
            f.push(fk);
            data.push(vec!["minkowski".into(), fmt_f64(t), fmt_f64(fk), fmt_f64(wigner_purity(&w)), fmt_f64(w.integral())]);
        }
        s.num("minkowski_initial_f", f[0]);
        s.num("minkowski_f_variation", spread(&f));
    }
    Ok(Report {
        data,
        headline: headline_from(&s),
        summary: s,
    })
}

/// `2πħ ∫∫ W² dx dp`.
fn wigner_purity(w: &WignerGrid) -> f64 {
    2.0 * PI * w.params().hbar * w.values().iter().map(|v| v * v).sum::<f64>() * w.cell_area()
}

fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    UnitVector::from_angles(z.acos(), rng.gen_range(0.0..TAU))
}

fn read_path(file: &Path) -> Result<SphericalPath, RunError> {
    let csv_err = |source| RunError::Csv {
        path: file.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(file).map_err(csv_err)?;
    let mut pts = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let v: Vec<f64> = rec.iter().map(|f| f.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| {
            RunError::Config(ConfigError {
                origin: crate::config::Origin::Default,
                field: "path_file".into(),
                message: format!("{}: non-numeric row {:?}", file.display(), rec),
            })
        })?;
        if v.len() != 3 {
            return Err(RunError::Config(ConfigError {
                origin: crate::config::Origin::Default,
                field: "path_file".into(),
                message: format!("{}: expected n_x,n_y,n_z rows", file.display()),
            }));
        }
        pts.push(UnitVector::normalized(v[0], v[1], v[2])?);
    }
    Ok(SphericalPath::new(pts, true)?)
}

fn spin_phase(c: &Config) -> Result<Report, RunError> {
    let theta = c.f64("colatitude_deg")?.to_radians();
    if !(theta > 0.0 && theta < PI) {
        return Err(c.reject("colatitude_deg", "must lie strictly between 0 and 180").into());
    }
    let segments = c.usize_list("segments", 3)?;
    let gauge_samples = c.usize_at_least("gauge_samples", 1)?;
    let triples = c.usize_at_least("triples", 1)?;
    let seed = c.u64("seed")?;
    let extra = c.path("path_file").map(|f| read_path(&f)).transpose()?;

    let exact = spin_geom::wrap_phase(PI * (1.0 - theta.cos()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauges = vec![UnitVector::Z, UnitVector::X, -UnitVector::Y];
    gauges.extend((0..gauge_samples).map(|_| random_unit(&mut rng)));

    let mut data = Table::new(&["loop_id", "segments", "solid_angle", "wz_phase", "overlap_phase", "error"]);
    let mut errors = Vec::new();
    let mut gauge_spread = 0.0f64;
    let mut overlap_gap = 0.0f64;
    let mut loops: Vec<(String, SphericalPath, Option<f64>)> = Vec::new();
    for &n in &segments {
        loops.push((format!("latitude-{n}"), SphericalPath::latitude_circle(theta, n)?, Some(exact)));
    }
    loops.push((
        "octant".into(),
        SphericalPath::new(vec![UnitVector::X, UnitVector::Y, UnitVector::Z], true)?,
        Some(FRAC_PI_4),
    ));
    if let Some(path) = extra {
        loops.push(("file".into(), path, None));
    }
    for (id, path, want) in &loops {
        let omega = spin_geom::enclosed_solid_angle(path)?;
        let wz = spin_geom::wz_phase_closed_path(path)?;
        let phases = gauges
            .iter()
            .map(|n0| spin_geom::loop_overlap_phase(path, n0))
            .collect::<Result<Vec<_>, _>>()?;
        for ph in &phases {
            gauge_spread = gauge_spread.max(spin_geom::phase_distance(*ph, phases[0]));
        }
        overlap_gap = overlap_gap.max(spin_geom::phase_distance(phases[0], wz));
        let err = want.map(|w| spin_geom::phase_distance(wz, w));
        if id.starts_with("latitude-") {
            errors.push(err.expect("latitude loops have an exact value"));
        }
        data.push(vec![
            id.clone(),
            path.points().len().to_string(),
            fmt_f64(omega),
            fmt_f64(wz),
            fmt_f64(phases[0]),
            err.map(fmt_f64).unwrap_or_default(),
        ]);
    }

    let mut overlap_err = 0.0f64;
    let mut kernel_mismatch = 0usize;
    for _ in 0..triples {
        let (ni, nf, n0) = (random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng));
        let area_form = spin_geom::coherent_overlap(&ni, &nf, &n0);
        let direct = spin_geom::coherent_state_with_reference(&nf, &n0)
            .inner(&spin_geom::coherent_state_with_reference(&ni, &n0));
        overlap_err = overlap_err.max((area_form - direct).norm());
        let (km, ke) = spin_geom::free_spin_kernel_pair(&ni, &nf, &n0);
        kernel_mismatch += usize::from(km != ke);
    }
    let octant = spin_geom::coherent_overlap(&UnitVector::Y, &UnitVector::X, &UnitVector::Z);
    let octant_err = (octant - Complex64::from_polar(0.5f64.sqrt(), FRAC_PI_4)).norm();

    let mut s = Summary::default();
    s.num("exact_phase", exact);
    s.num("first_error", errors[0]);
    s.num("max_error", errors.iter().copied().fold(0.0, f64::max));
    s.flag("errors_strictly_decreasing", errors.windows(2).all(|w| w[1] < w[0]));
    s.num("gauge_spread", gauge_spread);
    s.num("overlap_vs_wz_gap", overlap_gap);
    s.num("overlap_max_error", overlap_err);
    s.num("octant_overlap_error", octant_err);
    s.int("kernel_mismatches", kernel_mismatch);
    Ok(Report {
        data,
        headline: headline_from(&s),
        summary: s,
    })
}

fn settings_row(label: &str, opt: &bell::ChshOptimum) -> Vec<String> {
    let mut row = vec![label.to_string(), fmt_f64(opt.value)];
    for st in &opt.settings {
        row.push(fmt_f64(st.direction().theta()));
        row.push(fmt_f64(st.direction().phi()));
    }
    row
}

fn chsh(c: &Config) -> Result<Report, RunError> {
    let restarts = c.usize_at_least("restarts", 1)?;
    let seed = c.u64("seed")?;
    let samples = c.usize_at_least("product_samples", 1)?;

    let singlet = bell::chsh_maximize(&bell::singlet(), restarts, seed)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let input = TwoQubitState::new([z, Complex64::new(h, 0.0), z, Complex64::new(h, 0.0)])?;
    let out = bell::cnot(&input);
    let bell_state = TwoQubitState::new([Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)])?;
    let demo = bell::chsh_maximize(&out, restarts, seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut product_max = 0.0f64;
    for _ in 0..samples {
        let s = TwoQubitState::product(
            &spin_geom::coherent_state(&random_unit(&mut rng)),
            &spin_geom::coherent_state(&random_unit(&mut rng)),
        );
        let st = [(); 4].map(|_| MeasurementSetting(random_unit(&mut rng)));
        product_max = product_max.max(bell::chsh_value(&s, &st[0], &st[1], &st[2], &st[3]).abs());
    }

    let mut data = Table::new(&[
        "state", "S", "a_theta", "a_phi", "a2_theta", "a2_phi", "b_theta", "b_phi", "b2_theta", "b2_phi",
    ]);
    data.push(settings_row("singlet", &singlet));
    data.push(settings_row("cnot_output", &demo));
    let mut s = Summary::default();
    s.num("singlet_S", singlet.value);
    s.num("singlet_gap", (singlet.value - 2.0 * SQRT_2).abs());
    s.num("cnot_output_S", demo.value);
    s.num("cnot_bell_fidelity", bell_state.inner(&out).norm_sqr());
    s.num("product_max_abs_S", product_max);
    s.int("product_samples", samples);
    Ok(Report {
        data,
        headline: vec![format!("S = {}", fmt_f64(singlet.value))],
        summary: s,
    })
}

fn chsh_decay(c: &Config) -> Result<Report, RunError> {
    let e = c.f64_list("energies")?;
    let energies: [f64; 4] = e
        .try_into()
        .map_err(|_| c.reject("energies", "need exactly four diagonal entries"))?;
    let hbar = c.positive("hbar")?;
    let (tau_max, t_max) = (c.positive("tau_max")?, c.positive("t_max")?);
    let samples = c.usize_at_least("samples", 2)?;
    let restarts = c.usize_at_least("restarts", 1)?;
    let seed = c.u64("seed")?;

    let s0 = bell::singlet();
    let decay = bell::euclidean_chsh_decay(&s0, &energies, hbar, &linspace(tau_max, samples), restarts, seed)?;
    let control = bell::minkowski_chsh_control(&s0, &energies, hbar, &linspace(t_max, samples), restarts, seed)?;
    let mut data = Table::new(&["regime", "tau", "chsh_max", "fidelity_to_initial"]);
    for (label, traj) in [("euclidean", &decay), ("minkowski", &control)] {
        for q in traj.iter() {
            data.push(vec![label.into(), fmt_f64(q.tau), fmt_f64(q.chsh_max), fmt_f64(q.fidelity_to_initial)]);
        }
    }
    let sd: Vec<f64> = decay.iter().map(|q| q.chsh_max).collect();
    let mut s = Summary::default();
    s.num("euclidean_initial", sd[0]);
    s.num("euclidean_final", *sd.last().expect("samples >= 2"));
    s.num("euclidean_max_step_rise", max_rise(&sd));
    s.num(
        "minkowski_max_deviation",
        control.iter().map(|q| (q.chsh_max - 2.0 * SQRT_2).abs()).fold(0.0, f64::max),
    );
    Ok(Report {
        data,
        headline: headline_from(&s),
        summary: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(e: Experiment, sets: &[&str]) -> Config {
        let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        Config::resolve(Some(e), None, &sets).unwrap()
    }

    fn rejected_field(e: Experiment, sets: &[&str]) -> String {
        match run(&config(e, sets)) {
            Err(RunError::Config(c)) => c.field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn validation_names_the_field() {
        assert_eq!(rejected_field(Experiment::Epr, &["width_ratio=1.5"]), "width_ratio");
        assert_eq!(rejected_field(Experiment::SpinPhase, &["colatitude_deg=0"]), "colatitude_deg");
        assert_eq!(rejected_field(Experiment::ChshDecay, &["energies=0,1,2"]), "energies");
        assert_eq!(rejected_field(Experiment::NegativityDecay, &["regime=sideways"]), "regime");
        assert_eq!(rejected_field(Experiment::KernelCheck, &["edge_margin=100"]), "edge_margin");
        assert_eq!(rejected_field(Experiment::Commutator, &["slices=1,2"]), "slices");
    }

    #[test]
    fn small_runs_fill_their_tables() {
        let r = run(&config(Experiment::Commutator, &["slices=2,3"])).unwrap();
        assert_eq!(r.data.rows.len(), 2 * (1 + 2));
        let r = run(&config(Experiment::ChshDecay, &["samples=3", "restarts=2"])).unwrap();
        assert_eq!(r.data.rows.len(), 6);
        assert!(r.summary.get("euclidean_final").is_some());
    }

    #[test]
    fn path_file_loop_is_read_and_reported() {
        let dir = std::env::temp_dir().join(format!("wickbell-path-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("octant.csv");
        std::fs::write(&file, "n_x,n_y,n_z\n1,0,0\n0,1,0\n0,0,1\n").unwrap();
        let set = format!("path_file={}", file.display());
        let r = run(&config(Experiment::SpinPhase, &["segments=8", "triples=1", "gauge_samples=1", &set])).unwrap();
        let row = r.data.rows.iter().find(|row| row[0] == "file").unwrap();
        let phase: f64 = row[3].parse().unwrap();
        assert!((phase - FRAC_PI_4).abs() < 1e-12);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
