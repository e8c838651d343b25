//! The fixed set of experiments and their parameter schemas.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Wigner,
    KernelCheck,
    Commutator,
    Epr,
    NegativityDecay,
    SpinPhase,
    Chsh,
    ChshDecay,
}

pub type Schema = &'static [(&'static str, &'static str)];

const WIGNER: Schema = &[
    ("n_points", "256"),
    ("half_width", "10"),
    ("hbar", "1"),
    ("mass", "1"),
    ("center", "-1"),
    ("width", "1"),
    ("momentum", "1"),
    ("cat_separation", "3"),
    ("cat_width", "1"),
    ("shear_cells", "3"),
    ("output_dir", ""),
];

const KERNEL_CHECK: Schema = &[
    ("n_points", "512"),
    ("half_width", "10"),
    ("hbar", "1"),
    ("mass", "1"),
    ("total_time", "1"),
    ("slices", "16,32,64,128"),
    ("edge_margin", "6"),
    ("output_dir", ""),
];

const COMMUTATOR: Schema = &[
    ("hbar", "1"),
    ("mass", "1"),
    ("total_time", "1"),
    ("slices", "2,3,4,16"),
    ("initial_center", "-0.5"),
    ("initial_width", "1.2"),
    ("initial_momentum", "0.4"),
    ("final_center", "0.8"),
    ("final_width", "0.7"),
    ("final_momentum", "-0.3"),
    ("output_dir", ""),
];

const EPR: Schema = &[
    ("n_points", "1024"),
    ("half_width", "10"),
    ("hbar", "1"),
    ("mass", "1"),
    ("envelope", "0.8"),
    ("width_ratio", "0.05"),
    ("total_time", "0.09"),
    ("condition_p", "1"),
    ("export_floor", "1e-6"),
    ("output_dir", ""),
];

const NEGATIVITY_DECAY: Schema = &[
    ("regime", "both"),
    ("n_points", "128"),
    ("half_width", "10"),
    ("hbar", "1"),
    ("mass", "1"),
    ("separation", "3"),
    ("width", "1"),
    ("omega", "1"),
    ("tau_max", "6"),
    ("samples", "32"),
    ("p_oversample", "4"),
    ("shear_n_points", "1024"),
    ("shear_half_width", "10"),
    ("t_max", "1"),
    ("output_dir", ""),
];

const SPIN_PHASE: Schema = &[
    ("colatitude_deg", "90"),
    ("segments", "256,512,1024,2048,4096"),
    ("gauge_samples", "16"),
    ("triples", "1000"),
    ("seed", "2024"),
    ("path_file", ""),
    ("output_dir", ""),
];

const CHSH: Schema = &[
    ("restarts", "16"),
    ("seed", "1"),
    ("product_samples", "10000"),
    ("output_dir", ""),
];

const CHSH_DECAY: Schema = &[
    ("energies", "0,1,2,3"),
    ("hbar", "1"),
    ("tau_max", "8"),
    ("t_max", "10"),
    ("samples", "33"),
    ("restarts", "16"),
    ("seed", "1"),
    ("output_dir", ""),
];

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Wigner,
        Experiment::KernelCheck,
        Experiment::Commutator,
        Experiment::Epr,
        Experiment::NegativityDecay,
        Experiment::SpinPhase,
        Experiment::Chsh,
        Experiment::ChshDecay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Wigner => "wigner",
            Experiment::KernelCheck => "kernel-check",
            Experiment::Commutator => "commutator",
            Experiment::Epr => "epr",
            Experiment::NegativityDecay => "negativity-decay",
            Experiment::SpinPhase => "spin-phase",
            Experiment::Chsh => "chsh",
            Experiment::ChshDecay => "chsh-decay",
        }
    }

    /// What the experiment reproduces.
    pub fn anchor(self) -> &'static str {
        match self {
            Experiment::Wigner => "Wigner transform, marginals, cat-state negativity, free-particle continuity equation",
            Experiment::KernelCheck => "time-sliced imaginary-time free kernel against its closed form",
            Experiment::Commutator => "path-integral average realizing the canonical commutator",
            Experiment::Epr => "EPR pair momentum anti-correlation in real and imaginary time",
            Experiment::NegativityDecay => "negativity ratio of the Wigner function along evolution",
            Experiment::SpinPhase => "spin coherent-state overlap and Wess-Zumino loop phase",
            Experiment::Chsh => "singlet CHSH optimum and the CNOT superposition-to-entanglement map",
            Experiment::ChshDecay => "CHSH violation under a non-negative diagonal kernel",
        }
    }

    pub fn schema(self) -> Schema {
        match self {
            Experiment::Wigner => WIGNER,
            Experiment::KernelCheck => KERNEL_CHECK,
            Experiment::Commutator => COMMUTATOR,
            Experiment::Epr => EPR,
            Experiment::NegativityDecay => NEGATIVITY_DECAY,
            Experiment::SpinPhase => SPIN_PHASE,
            Experiment::Chsh => CHSH,
            Experiment::ChshDecay => CHSH_DECAY,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Human-readable catalog, one line per experiment.
pub fn catalog_text() -> String {
    let width = Experiment::ALL.iter().map(|e| e.name().len()).max().unwrap_or(0);
    Experiment::ALL
        .iter()
        .map(|e| format!("{:width$}  {}\n", e.name(), e.anchor()))
        .collect()
}

/// The same catalog as CSV with a header row.
pub fn catalog_csv() -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "anchor"]).expect("in-memory write");
    for e in Experiment::ALL {
        w.write_record([e.name(), e.anchor()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii names")
}
