use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ffa_cli::{run, write_outputs, CliError, CommandKind, Format, RawConfig, RunConfig};

/// Non-Hermitian Fano-Anderson lattice: spectra, scattering and decay.
///
/// Options not given on the command line are taken from --config (a config
/// file or an earlier run's sidecar), then from built-in defaults.
#[derive(Parser, Debug)]
#[command(name = "ffa", version)]
struct Cli {
    /// What to compute.
    command: Option<CommandKind>,

    /// JSON config file or sidecar to start from.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Lattice hopping rate.
    #[arg(long)]
    kappa0: Option<f64>,
    /// Impurity hopping rate.
    #[arg(long = "kappaA")]
    kappa_a: Option<f64>,
    /// Real part of the impurity energy.
    #[arg(long = "reEa", allow_hyphen_values = true)]
    re_ea: Option<f64>,
    /// Imaginary part of the impurity energy (> 0 amplifying, < 0 absorbing).
    #[arg(long = "imEa", allow_hyphen_values = true)]
    im_ea: Option<f64>,

    /// Tolerance on the singularity conditions.
    #[arg(long)]
    tol: Option<f64>,

    /// domain-scan: Re(Ea) / kappa0 held fixed.
    #[arg(long = "reEaOverKappa0", allow_hyphen_values = true)]
    re_ea_over_kappa0: Option<f64>,
    /// domain-scan: <imPoints>x<kappaPoints>.
    #[arg(long)]
    grid: Option<String>,
    /// domain-scan: kappaA / kappa0 runs over [0, kappaMax].
    #[arg(long = "kappaMax")]
    kappa_max: Option<f64>,
    /// domain-scan: Im(Ea) / kappa0 runs over [-imMax, imMax].
    #[arg(long = "imMax")]
    im_max: Option<f64>,

    /// reflectance: number of momenta in (0, pi).
    #[arg(long)]
    kpoints: Option<usize>,

    /// wavepacket: carrier momentum.
    #[arg(long)]
    k: Option<f64>,
    /// wavepacket: initial centre site.
    #[arg(long)]
    n0: Option<usize>,
    /// wavepacket: Gaussian width in sites.
    #[arg(long = "deltaN")]
    delta_n: Option<f64>,
    /// wavepacket, decay: final time.
    #[arg(long = "tFinal")]
    t_final: Option<f64>,
    /// wavepacket, decay: RK4 time step.
    #[arg(long)]
    dt: Option<f64>,
    /// wavepacket: number of snapshot intervals.
    #[arg(long)]
    snapshots: Option<usize>,
    /// wavepacket: scale the initial packet to unit norm.
    #[arg(long)]
    normalize: bool,
    /// decay: start with every lattice site at amplitude 1 as well.
    #[arg(long = "legacy-cn-init")]
    legacy_cn_init: bool,

    /// selfenergy: lower end of the energy axis.
    #[arg(long = "eMin", allow_hyphen_values = true)]
    e_min: Option<f64>,
    /// selfenergy: upper end of the energy axis.
    #[arg(long = "eMax", allow_hyphen_values = true)]
    e_max: Option<f64>,
    /// selfenergy: number of energies.
    #[arg(long)]
    points: Option<usize>,

    /// poles: left edge of the search rectangle.
    #[arg(long = "reMin", allow_hyphen_values = true)]
    re_min: Option<f64>,
    /// poles: right edge of the search rectangle.
    #[arg(long = "reMax", allow_hyphen_values = true)]
    re_max: Option<f64>,
    /// poles: bottom edge of the search rectangle.
    #[arg(long = "imMin", allow_hyphen_values = true)]
    im_min: Option<f64>,
    /// poles: top edge of the search rectangle (at most kappa0 / 2).
    #[arg(long = "imTop", allow_hyphen_values = true)]
    im_top: Option<f64>,

    /// Output file; a sidecar <out>.meta.json is written next to it.
    /// Without it the data goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Cli {
    fn flags(&self) -> RawConfig {
        RawConfig {
            command: self.command,
            kappa0: self.kappa0,
            kappa_a: self.kappa_a,
            re_ea: self.re_ea,
            im_ea: self.im_ea,
            tol: self.tol,
            re_ea_over_kappa0: self.re_ea_over_kappa0,
            grid: self.grid.clone(),
            kappa_max: self.kappa_max,
            im_max: self.im_max,
            kpoints: self.kpoints,
            k: self.k,
            n0: self.n0,
            delta_n: self.delta_n,
            t_final: self.t_final,
            dt: self.dt,
            snapshots: self.snapshots,
            normalize: self.normalize.then_some(true),
            legacy_cn_init: self.legacy_cn_init.then_some(true),
            e_min: self.e_min,
            e_max: self.e_max,
            points: self.points,
            re_min: self.re_min,
            re_max: self.re_max,
            im_min: self.im_min,
            im_top: self.im_top,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

fn main_inner(cli: &Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    let config = RunConfig::resolve(&base.merge(&cli.flags()))?;
    let output = run(&config)?;
    write_outputs(&config, &output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ffa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
