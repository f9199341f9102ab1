//! The `spinent` command line: one subcommand per dataset, CSV or JSON out.
//!
//! Exit codes are 0 on success, 1 for usage and input errors and 2 when the
//! numerics fail (tolerance, convergence, degeneracy). Every error goes to
//! standard error as a single `error_kind=<kind>: <message>` line.

mod format;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use spinent::ed_engine::{self, Boundary, GroundStateOptions, SignConvention, XxzModel};
use spinent::scaling::{self, EntropyProfile, ProfilePoint};
use spinent::spectra::{self, ProbabilitySpectrum};
use spinent::xy_exact::{self, XyModel};

use output::{real, rounded, Cell, Table};

#[derive(Parser, Debug)]
#[command(
    name = "spinent",
    version,
    about = "Block entanglement entropy of XY and XXZ spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// S_L for L = 1..lmax of the XY chain. CSV columns L,S_bits.
    XyProfile {
        #[command(flatten)]
        model: XyArgs,
        #[arg(long)]
        lmax: usize,
        #[command(flatten)]
        out: TableOut,
    },
    /// S_L over a sweep of h. CSV columns a,L,S_bits with a = 1/h.
    XySurface {
        #[arg(long, allow_negative_numbers = true)]
        h_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        h_max: f64,
        /// Number of equally spaced h values, ends included.
        #[arg(long)]
        h_steps: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long)]
        lmax: usize,
        #[arg(long, default_value_t = xy_exact::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: TableOut,
    },
    /// Eigenvalues of rho_L, descending. CSV columns rank,probability.
    XySpectrum {
        #[command(flatten)]
        model: XyArgs,
        #[arg(long)]
        l: usize,
        /// Only the k largest eigenvalues (default: all 2^L).
        #[arg(long)]
        top: Option<usize>,
        #[command(flatten)]
        out: TableOut,
    },
    /// Near-critical half-chain entropy of the Ising chain at coupling a.
    XyHalfchain {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[command(flatten)]
        out: ValueOut,
    },
    /// S_L for L = 1..N-1 of the XXZ ground state. CSV columns L,S_bits.
    XxzProfile {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Sign::Antiferro)]
        sign: Sign,
        #[arg(long, value_enum, default_value_t = Bc::Periodic)]
        bc: Bc,
        /// Seed of the Lanczos start vectors.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to the sector with this total sigma^z.
        #[arg(long, allow_negative_numbers = true)]
        sector: Option<i32>,
        #[arg(long, default_value_t = GroundStateOptions::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = GroundStateOptions::default().max_iter)]
        max_iter: usize,
        #[command(flatten)]
        out: TableOut,
    },
    /// Least-squares fit of S against log2 L from a CSV with columns L,S_bits.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Window start (default lmax/4).
        #[arg(long)]
        lmin: Option<usize>,
        /// Window end (default the largest L in the input).
        #[arg(long)]
        lmax: Option<usize>,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Majorization of the spectrum of rho_L by that of rho_(L+2).
    Majorize {
        #[command(flatten)]
        model: XyArgs,
        #[arg(long)]
        lmax: usize,
        /// Allowed excess of a partial sum.
        #[arg(long = "maj-tol", default_value_t = spectra::MAJORIZATION_TOL)]
        maj_tol: f64,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Entropy shift at L = lmax of the critical chain at anisotropy gamma
    /// relative to gamma = 1.
    GammaShift {
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long)]
        lmax: usize,
        #[command(flatten)]
        out: ValueOut,
    },
    /// Number of eigenvalues of rho_L at least epsilon, L = 1..lmax.
    RankGrowth {
        #[command(flatten)]
        model: XyArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        lmax: usize,
        #[command(flatten)]
        out: TableOut,
    },
}

#[derive(Args, Debug)]
struct XyArgs {
    /// Inverse coupling h = 1/a.
    #[arg(long, allow_negative_numbers = true)]
    h: f64,
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
    /// Quadrature tolerance for the coupling coefficients.
    #[arg(long, default_value_t = xy_exact::DEFAULT_TOL)]
    tol: f64,
}

impl XyArgs {
    fn model(&self) -> Result<XyModel, Failure> {
        Ok(XyModel::new(self.h, self.gamma)?)
    }
}

#[derive(Args, Debug)]
struct TableOut {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a gnuplot script that plots the CSV file named by --output.
    #[arg(long)]
    plot_script: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValueOut {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct JsonOut {
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Sign {
    Antiferro,
    PaperFerro,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Bc {
    Periodic,
    Open,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Input(String),
    Core(spinent::Error),
}

impl From<spinent::Error> for Failure {
    fn from(e: spinent::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Input(_) => "input_format",
            Failure::Core(e) => e.kind(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Input(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("error_kind=usage: {first}");
            return 1;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error_kind={}: {}", f.kind(), f.message());
            f.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::XyProfile { model, lmax, out } => {
            let m = model.model()?;
            let prof = xy_exact::entropy_profile(&m, lmax, model.tol)?;
            let mut t = Table::new(&["L", "S_bits"], xy_meta(&m));
            for p in prof.points() {
                t.push(vec![Cell::Int(p.l), Cell::Real(p.s)]);
            }
            emit_table(&t, &out, &m.label())
        }
        Command::XySurface {
            h_min,
            h_max,
            h_steps,
            gamma,
            lmax,
            tol,
            out,
        } => {
            let models = surface_models(h_min, h_max, h_steps, gamma)?;
            let mut meta = Map::new();
            meta.insert("h_min".into(), real(h_min));
            meta.insert("h_max".into(), real(h_max));
            meta.insert("h_steps".into(), Value::from(h_steps));
            meta.insert("gamma".into(), real(gamma));
            let mut t = Table::new(&["a", "L", "S_bits"], meta);
            for m in &models {
                let prof = xy_exact::entropy_profile(m, lmax, tol)?;
                for p in prof.points() {
                    t.push(vec![Cell::Real(m.a()), Cell::Int(p.l), Cell::Real(p.s)]);
                }
            }
            emit_table(&t, &out, &format!("xy surface gamma={gamma}"))
        }
        Command::XySpectrum { model, l, top, out } => {
            let m = model.model()?;
            let nu = xy_exact::block_modes(&m, l, model.tol)?;
            let spec = match top {
                Some(k) => spectra::reduced_spectrum_topk(&nu, k)?,
                None => spectra::reduced_spectrum_full(&nu)?,
            };
            let mut meta = xy_meta(&m);
            meta.insert("l".into(), Value::from(l));
            meta.insert("complete".into(), Value::from(spec.is_complete()));
            let mut t = Table::new(&["rank", "probability"], meta);
            for (i, &p) in spec.probabilities().iter().enumerate() {
                t.push(vec![Cell::Int(i + 1), Cell::Real(p)]);
            }
            emit_table(&t, &out, &format!("{} L={l}", m.label()))
        }
        Command::XyHalfchain { a, out } => {
            let m = XyModel::from_coupling(a, 1.0)?;
            let s = xy_exact::half_chain_entropy(&m)?;
            let near = xy_exact::half_chain_is_near_critical(&m);
            if !near {
                eprintln!(
                    "note: |1 - a| = {} exceeds {}; the half-chain formula is an asymptotic estimate there",
                    format::sig12((1.0 - a).abs()),
                    xy_exact::HALF_CHAIN_VALIDITY
                );
            }
            let mut doc = Map::new();
            doc.insert("a".into(), real(a));
            doc.insert("h".into(), real(m.h()));
            doc.insert("gamma".into(), real(1.0));
            doc.insert("near_critical".into(), Value::from(near));
            doc.insert("s_bits".into(), real(s));
            emit_value(s, doc, &out)
        }
        Command::XxzProfile {
            delta,
            lambda,
            n,
            sign,
            bc,
            seed,
            sector,
            tol,
            max_iter,
            out,
        } => {
            let sign = match sign {
                Sign::Antiferro => SignConvention::Antiferro,
                Sign::PaperFerro => SignConvention::PaperFerro,
            };
            let boundary = match bc {
                Bc::Periodic => Boundary::Periodic,
                Bc::Open => Boundary::Open,
            };
            let model = XxzModel::new(delta, lambda, n)?
                .with_sign(sign)
                .with_boundary(boundary);
            let opts = GroundStateOptions {
                tol,
                max_iter,
                seed,
            };
            let gs = match sector {
                Some(m) => ed_engine::ground_state_in_sector(&model, m, &opts)?,
                None => ed_engine::ground_state(&model, &opts)?,
            };
            let prof = ed_engine::state_entropy_profile(model.label(), &gs.state)?;
            let mut meta = Map::new();
            meta.insert("delta".into(), real(delta));
            meta.insert("lambda".into(), real(lambda));
            meta.insert("n".into(), Value::from(n));
            meta.insert("sign".into(), Value::from(sign_name(sign)));
            meta.insert("bc".into(), Value::from(bc_name(boundary)));
            meta.insert("seed".into(), Value::from(seed));
            meta.insert("energy".into(), real(gs.energy));
            meta.insert("sector".into(), Value::from(gs.sector));
            let mut t = Table::new(&["L", "S_bits"], meta);
            for p in prof.points() {
                t.push(vec![Cell::Int(p.l), Cell::Real(p.s)]);
            }
            emit_table(&t, &out, &model.label())
        }
        Command::Fit {
            input,
            lmin,
            lmax,
            out,
        } => {
            let prof = read_profile(&input)?;
            let (dmin, dmax) = scaling::default_window(&prof);
            let hi = lmax.unwrap_or(dmax);
            let lo = lmin.unwrap_or(if lmax.is_some() {
                (hi / 4).max(1)
            } else {
                dmin
            });
            if lo > hi {
                return Err(Failure::Usage(format!("--lmin {lo} exceeds --lmax {hi}")));
            }
            let fit = scaling::fit_central_charge(&prof, (lo, hi))?;
            emit_json(&fit, &out)
        }
        Command::Majorize {
            model,
            lmax,
            maj_tol,
            out,
        } => {
            let m = model.model()?;
            if lmax < 3 {
                return Err(Failure::Usage(format!(
                    "--lmax must be at least 3 to form an (L, L+2) pair, got {lmax}"
                )));
            }
            if lmax > spectra::FULL_SPECTRUM_CAP {
                return Err(spinent::Error::EnumerationCap {
                    l: lmax,
                    cap: spectra::FULL_SPECTRUM_CAP,
                }
                .into());
            }
            let g = xy_exact::coupling_coefficients(&m, lmax, model.tol)?;
            let spectra_by_l = (1..=lmax)
                .map(|l| {
                    let b = xy_exact::block_correlation(&g, l)?;
                    spectra::reduced_spectrum_full(&xy_exact::mode_occupations(&b)?)
                })
                .collect::<spinent::Result<Vec<ProbabilitySpectrum>>>()?;
            let mut reports = Vec::new();
            for l in 1..=lmax - 2 {
                let report = spectra::majorization_compare(
                    &spectra_by_l[l - 1],
                    &spectra_by_l[l + 1],
                    maj_tol,
                )?;
                reports.push(PairReport {
                    l,
                    l_plus_2: l + 2,
                    report,
                });
            }
            emit_json(&reports, &out)
        }
        Command::GammaShift { gamma, lmax, out } => {
            let shift = scaling::gamma_subleading(gamma, lmax)?;
            let mut doc = Map::new();
            doc.insert("gamma".into(), real(gamma));
            doc.insert("lmax".into(), Value::from(lmax));
            doc.insert("shift_bits".into(), real(shift));
            emit_value(shift, doc, &out)
        }
        Command::RankGrowth {
            model,
            epsilon,
            lmax,
            out,
        } => {
            let m = model.model()?;
            if lmax == 0 {
                return Err(Failure::Usage("--lmax must be at least 1".into()));
            }
            let g = xy_exact::coupling_coefficients(&m, lmax, model.tol)?;
            let mut meta = xy_meta(&m);
            meta.insert("epsilon".into(), real(epsilon));
            let mut t = Table::new(&["L", "effective_rank"], meta);
            for l in 1..=lmax {
                let nu = xy_exact::mode_occupations(&xy_exact::block_correlation(&g, l)?)?;
                let r = spectra::effective_rank_of_modes(&nu, epsilon)?;
                t.push(vec![Cell::Int(l), Cell::Int(r)]);
            }
            emit_table(&t, &out, &format!("{} epsilon={epsilon}", m.label()))
        }
    }
}

#[derive(Serialize)]
struct PairReport {
    l: usize,
    l_plus_2: usize,
    #[serde(flatten)]
    report: spectra::MajorizationReport,
}

#[derive(Deserialize)]
struct ProfileRow {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "S_bits")]
    s: f64,
}

fn read_profile(path: &Path) -> Result<EntropyProfile, Failure> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for row in reader.deserialize::<ProfileRow>() {
        let row = row.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        points.push(ProfilePoint { l: row.l, s: row.s });
    }
    Ok(EntropyProfile::new(path.display().to_string(), points)?)
}

fn surface_models(
    h_min: f64,
    h_max: f64,
    steps: usize,
    gamma: f64,
) -> Result<Vec<XyModel>, Failure> {
    if steps == 0 {
        return Err(Failure::Usage("--h-steps must be at least 1".into()));
    }
    if h_min > h_max {
        return Err(Failure::Usage(format!(
            "--h-min {h_min} exceeds --h-max {h_max}"
        )));
    }
    (0..steps)
        .map(|i| {
            let h = if steps == 1 {
                h_min
            } else {
                h_min + (h_max - h_min) * i as f64 / (steps - 1) as f64
            };
            Ok(XyModel::new(h, gamma)?)
        })
        .collect()
}

fn xy_meta(m: &XyModel) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("h".into(), real(m.h()));
    meta.insert("a".into(), real(m.a()));
    meta.insert("gamma".into(), real(m.gamma()));
    meta
}

fn sign_name(s: SignConvention) -> &'static str {
    match s {
        SignConvention::Antiferro => "antiferro",
        SignConvention::PaperFerro => "paper-ferro",
    }
}

fn bc_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Open => "open",
    }
}

fn emit_table(t: &Table, out: &TableOut, title: &str) -> Result<(), Failure> {
    if let Some(script) = &out.plot_script {
        let Some(data) = out.output.as_ref().filter(|_| out.format == Format::Csv) else {
            return Err(Failure::Usage(
                "--plot-script needs CSV written to a file with --output".into(),
            ));
        };
        let text = output::plot_script(t, &data.display().to_string(), title);
        write_file(script, &text)?;
    }
    let text = match out.format {
        Format::Csv => t.to_csv().map_err(|e| Failure::Io(e.to_string()))?,
        Format::Json => t.to_json(),
    };
    write_out(out.output.as_deref(), &text)
}

fn emit_value(x: f64, doc: Map<String, Value>, out: &ValueOut) -> Result<(), Failure> {
    let text = match out.format {
        Format::Csv => format!("{}\n", format::sig12(x)),
        Format::Json => output::json_text(&Value::Object(doc)),
    };
    write_out(out.output.as_deref(), &text)
}

fn emit_json<T: Serialize>(value: &T, out: &JsonOut) -> Result<(), Failure> {
    let v = serde_json::to_value(value).map_err(|e| Failure::Io(e.to_string()))?;
    write_out(out.output.as_deref(), &output::json_text(&rounded(v)))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("writing standard output: {e}")))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}
