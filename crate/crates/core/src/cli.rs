//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or check failure, 2 usage error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::attacks::{
    average_clone_fidelity, optimize_cloner, paper_trine_cloner, reduced_clone_fidelities, AnnealConfig, AttackKind,
    SYMMETRY_TOL,
};
use crate::error::Error;
use crate::frames::{
    self, classical_fidelity, entangled_realization, frame_potential, is_equiangular, make_bb84, make_simplex,
    make_trine, povm_from_frame, v1_floor, v2_floor, Frame,
};
use crate::protocol::Protocol;
use crate::rates::{
    self, compare, format_sig, sweep, tolerable_error, uniform_grid, Bound, ClonerSource, Dominance, Scenario,
    SweepConfig, DEFAULT_Q_POINTS, THRESHOLD_TOL,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

const POVM_CHECK_TOL: f64 = 1e-12;
const REDUCED_STATE_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "escqkd",
    version,
    about = "Key-rate bounds for trine and BB84 key distribution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a frame: equiangularity, potentials, POVM and entangled realization.
    FrameVerify(FrameVerifyArgs),
    /// Write one joint distribution p(a, b, e) as CSV.
    DumpDist(DumpDistArgs),
    /// Sweep the interception fraction and write the rate curve CSV.
    Rates(RatesArgs),
    /// Optimize a symmetric cloner by simulated annealing.
    CloneOpt(CloneOptArgs),
    /// Reproduce the trine vs BB84 intercept-resend comparison.
    Fig1(Fig1Args),
}

#[derive(Debug, Args)]
pub struct FrameVerifyArgs {
    /// trine, bb84 or simplex:<d>
    pub frame: String,
    /// Also write the frame in the plain-text matrix format.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnnealArgs {
    #[arg(long, default_value_t = AnnealConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = AnnealConfig::default().steps)]
    pub steps: usize,
    #[arg(long, default_value_t = AnnealConfig::default().restarts)]
    pub restarts: usize,
    /// Initial temperature.
    #[arg(long, default_value_t = AnnealConfig::default().temp_initial)]
    pub temp: f64,
    #[arg(long, default_value_t = AnnealConfig::default().cooling)]
    pub cooling: f64,
    #[arg(long, default_value_t = AnnealConfig::default().step_scale)]
    pub step_scale: f64,
    /// Weight of the symmetry penalty.
    #[arg(long, default_value_t = AnnealConfig::default().penalty_weight)]
    pub penalty: f64,
}

impl AnnealArgs {
    pub fn config(&self) -> AnnealConfig {
        AnnealConfig {
            seed: self.seed,
            steps: self.steps,
            restarts: self.restarts,
            temp_initial: self.temp,
            cooling: self.cooling,
            step_scale: self.step_scale,
            penalty_weight: self.penalty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ClonerChoice {
    Paper,
    Optimize,
}

#[derive(Debug, Args)]
pub struct DumpDistArgs {
    #[arg(long, default_value = "trine")]
    pub protocol: Protocol,
    #[arg(long, default_value = "intercept-resend")]
    pub attack: AttackKind,
    /// Interception fraction.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = ClonerChoice::Paper)]
    pub cloner: ClonerChoice,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long, default_value = "trine")]
    pub protocol: Protocol,
    #[arg(long, default_value = "intercept-resend")]
    pub attack: AttackKind,
    #[arg(long, value_enum, default_value_t = ClonerChoice::Paper)]
    pub cloner: ClonerChoice,
    /// Number of uniformly spaced q values in [0, 1].
    #[arg(long, default_value_t = DEFAULT_Q_POINTS)]
    pub q_points: usize,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CloneOptArgs {
    #[arg(long, default_value = "trine")]
    pub protocol: Protocol,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// Write the optimized unitary in the plain-text matrix format.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// Output directory for the CSVs and the gnuplot script.
    #[arg(long, default_value = "fig1")]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_Q_POINTS)]
    pub q_points: usize,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("I/O error: {e}"))
    }
}

/// Runs a parsed invocation, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run<O: Write, E: Write>(cli: &Cli, out: &mut O, err: &mut E) -> u8 {
    let result = match &cli.command {
        Command::FrameVerify(args) => frame_verify(args, out),
        Command::DumpDist(args) => dump_dist(args, out),
        Command::Rates(args) => rates_cmd(args, out),
        Command::CloneOpt(args) => clone_opt(args, out),
        Command::Fig1(args) => fig1(args, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

/// Resolves `trine`, `bb84` or `simplex:<d>`.
pub fn parse_frame_name(name: &str) -> Result<Frame, String> {
    match name {
        "trine" => Ok(make_trine()),
        "bb84" => Ok(make_bb84()),
        _ => {
            let d = name
                .strip_prefix("simplex:")
                .ok_or_else(|| format!("unknown frame `{name}` (expected trine, bb84 or simplex:<d>)"))?;
            let d: usize = d.parse().map_err(|_| format!("bad simplex dimension `{d}`"))?;
            make_simplex(d).map_err(|e| e.to_string())
        }
    }
}

fn g(x: f64) -> String {
    format_sig(x, 12)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn frame_verify<O: Write>(args: &FrameVerifyArgs, out: &mut O) -> Result<u8, Failure> {
    let frame = parse_frame_name(&args.frame).map_err(Failure::Usage)?;
    let (n, d) = (frame.len(), frame.dim());
    let mut report = String::new();
    let mut pass = true;

    let _ = writeln!(report, "frame: {}", frame.label());
    let _ = writeln!(report, "n = {n}, d = {d}");
    let eq = is_equiangular(&frame, 1e-10);
    let verdict = if eq.equiangular {
        "equiangular"
    } else {
        "not equiangular"
    };
    let _ = writeln!(
        report,
        "{verdict}: mean overlap^2 = {}, Welch value (n-d)/(d(n-1)) = {}",
        g(eq.overlap),
        g(eq.welch)
    );

    let v1 = frame_potential(&frame, 1)?;
    let v2 = frame_potential(&frame, 2)?;
    let floor = v1_floor(n, d);
    let v1_ok = v1 >= floor - frames::SPECTRAL_TOL && (v1 - floor).abs() <= frames::SPECTRAL_TOL;
    pass &= v1_ok;
    let _ = writeln!(
        report,
        "V_1 = {} (minimum n^2/d = {}) [{}]",
        g(v1),
        g(floor),
        mark(v1_ok)
    );
    let _ = writeln!(report, "V_2 = {} (equiangular value = {})", g(v2), g(v2_floor(n, d)));

    match povm_from_frame(&frame) {
        Ok(povm) => {
            let residual = povm.identity_residual();
            let ok = residual <= POVM_CHECK_TOL;
            pass &= ok;
            let _ = writeln!(report, "POVM identity residual = {residual:.3e} [{}]", mark(ok));
            let _ = writeln!(
                report,
                "classical fidelity d V_2 / n^2 = {}",
                g(classical_fidelity(&frame)?)
            );

            let phi = entangled_realization(&frame)?;
            let target = DMatrix::<Complex64>::identity(d, d).unscale(d as f64);
            let residual =
                frames::max_abs_diff(&phi.reduced_a(), &target).max(frames::max_abs_diff(&phi.reduced_b(), &target));
            let ok = residual <= REDUCED_STATE_TOL;
            pass &= ok;
            let _ = writeln!(
                report,
                "entangled realization reduced-state residual = {residual:.3e} [{}]",
                mark(ok)
            );
        }
        Err(e) => {
            pass = false;
            let _ = writeln!(report, "POVM construction failed: {e} [FAIL]");
        }
    }
    let _ = writeln!(report, "result: {}", if pass { "PASS" } else { "FAIL" });
    out.write_all(report.as_bytes())?;

    if let Some(path) = &args.out {
        fs::write(path, frame.to_text())?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_FAILURE })
}

fn cloner_source(choice: ClonerChoice, anneal: &AnnealArgs) -> ClonerSource {
    match choice {
        ClonerChoice::Paper => ClonerSource::Paper,
        ClonerChoice::Optimize => ClonerSource::Optimize(anneal.config()),
    }
}

fn scenario_for(
    protocol: Protocol,
    attack: AttackKind,
    choice: ClonerChoice,
    anneal: &AnnealArgs,
) -> Result<Scenario, Failure> {
    Ok(match attack {
        AttackKind::InterceptResend => Scenario::intercept_resend(protocol),
        AttackKind::Clone => Scenario::clone(protocol, cloner_source(choice, anneal).resolve(protocol)?),
    })
}

fn dump_dist<O: Write>(args: &DumpDistArgs, out: &mut O) -> Result<u8, Failure> {
    if !(0.0..=1.0).contains(&args.q) {
        return Err(Failure::Usage(format!("--q must lie in [0, 1], got {}", args.q)));
    }
    let scenario = scenario_for(args.protocol, args.attack, args.cloner, &args.anneal)?;
    let csv = scenario.attack_at(args.q)?.joint(args.protocol)?.to_csv();
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn threshold_line(scenario: &Scenario, bound: Bound) -> Result<String, Failure> {
    let name = match bound {
        Bound::Lower => "lower",
        Bound::Upper => "upper",
    };
    Ok(match tolerable_error(scenario, bound, THRESHOLD_TOL) {
        Ok(t) => format!("{name}-bound tolerable error: {} (q = {})", g(t.error_rate), g(t.q)),
        Err(Error::NoZeroCrossing) => format!("{name} bound: no zero crossing"),
        Err(Error::BoundNotPositive(v)) => format!("{name} bound: not positive at q = 0 ({})", g(v)),
        Err(e) => return Err(e.into()),
    })
}

fn rates_cmd<O: Write>(args: &RatesArgs, out: &mut O) -> Result<u8, Failure> {
    let q_grid = uniform_grid(args.q_points).map_err(|e| Failure::Usage(e.to_string()))?;
    let config = SweepConfig {
        protocol: args.protocol,
        attack: args.attack,
        q_grid,
        cloner_source: Some(cloner_source(args.cloner, &args.anneal)),
    };
    let scenario = config.scenario()?;
    let points = rates::sweep_scenario(&scenario, &config.q_grid)?;
    let mut csv = Vec::new();
    rates::write_csv(&mut csv, args.protocol, args.attack, &points)?;
    fs::write(&args.out, csv)?;

    writeln!(
        out,
        "{} / {}: {} points written to {}",
        args.protocol,
        args.attack,
        points.len(),
        args.out.display()
    )?;
    writeln!(out, "{}", threshold_line(&scenario, Bound::Lower)?)?;
    writeln!(out, "{}", threshold_line(&scenario, Bound::Upper)?)?;
    Ok(EXIT_OK)
}

fn clone_opt<O: Write>(args: &CloneOptArgs, out: &mut O) -> Result<u8, Failure> {
    let config = args.anneal.config();
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let signal = args.protocol.signal_frame();
    let opt = optimize_cloner(&signal, &config)?;
    let (sig_fid, probe_fid) = reduced_clone_fidelities(&opt.unitary, &signal)?;

    writeln!(out, "protocol: {}", args.protocol)?;
    writeln!(out, "average clone fidelity: {}", g(opt.fidelity))?;
    writeln!(out, "symmetry penalty: {:.3e}", opt.penalty)?;
    writeln!(out, "winning restart: {}", opt.restart)?;
    writeln!(
        out,
        "single-copy fidelities: signal {}, probe {}",
        g(sig_fid),
        g(probe_fid)
    )?;
    if args.protocol == Protocol::Trine {
        let reference = average_clone_fidelity(&paper_trine_cloner(), &signal)?;
        writeln!(
            out,
            "reference trine cloner fidelity: {} (optimized - reference = {:.3e})",
            g(reference),
            opt.fidelity - reference
        )?;
    }
    if let Some(path) = &args.out {
        fs::write(path, opt.unitary.to_text())?;
    }
    if opt.penalty >= SYMMETRY_TOL {
        writeln!(out, "result: NON-SYMMETRIC (penalty >= {SYMMETRY_TOL:e})")?;
        return Ok(EXIT_FAILURE);
    }
    writeln!(out, "result: symmetric")?;
    Ok(EXIT_OK)
}

fn curve_file(protocol: Protocol) -> String {
    format!("{protocol}_intercept-resend.csv")
}

/// gnuplot script: upper bounds solid, lower bounds dashed, against error rate.
pub fn fig1_script() -> String {
    let trine = curve_file(Protocol::Trine);
    let bb84 = curve_file(Protocol::Bb84);
    format!(
        "# Key-rate bounds vs error rate under intercept-resend.\n\
         # Columns: 3 = q, 4 = error rate, 5 = lower bound, 6 = upper bound.\n\
         set datafile separator ','\n\
         set terminal pngcairo size 800,600\n\
         set output 'fig1.png'\n\
         set xlabel 'error rate'\n\
         set ylabel 'key rate (bits per signal)'\n\
         set yrange [0:*]\n\
         set key top right\n\
         plot '{trine}' every ::1 using 4:6 with lines dt 1 lc 1 title 'trine upper', \\\n\
         \x20    '{trine}' every ::1 using 4:5 with lines dt 2 lc 1 title 'trine lower', \\\n\
         \x20    '{bb84}' every ::1 using 4:6 with lines dt 1 lc 2 title 'BB84 upper', \\\n\
         \x20    '{bb84}' every ::1 using 4:5 with lines dt 2 lc 2 title 'BB84 lower'\n"
    )
}

fn dominance_text(d: Dominance) -> &'static str {
    match d {
        Dominance::Tie => "tie",
        Dominance::First => "trine >= bb84",
        Dominance::Second => "bb84 >= trine",
        Dominance::Neither => "curves cross",
    }
}

fn fig1<O: Write>(args: &Fig1Args, out: &mut O) -> Result<u8, Failure> {
    let q_grid = uniform_grid(args.q_points).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    for protocol in Protocol::ALL {
        let points = sweep(&SweepConfig {
            protocol,
            attack: AttackKind::InterceptResend,
            q_grid: q_grid.clone(),
            cloner_source: None,
        })?;
        let mut csv = Vec::new();
        rates::write_csv(&mut csv, protocol, AttackKind::InterceptResend, &points)?;
        files.push((args.out.join(curve_file(protocol)), csv));
        writeln!(out, "{protocol}: zero-error rate {} bits", g(points[0].lower))?;
    }
    files.push((args.out.join("fig1.gp"), fig1_script().into_bytes()));

    let trine = Scenario::intercept_resend(Protocol::Trine);
    let bb84 = Scenario::intercept_resend(Protocol::Bb84);
    let report = compare(&trine, &bb84, &q_grid)?;
    for (name, t) in [("trine", report.threshold_first), ("bb84", report.threshold_second)] {
        match t {
            Some(t) => writeln!(
                out,
                "{name} lower-bound tolerable error: {} (q = {})",
                g(t.error_rate),
                g(t.q)
            )?,
            None => writeln!(out, "{name} lower bound: no zero crossing")?,
        }
    }
    if report.lower == Dominance::First && report.upper == Dominance::First && report.first_more_robust() {
        writeln!(out, "dominance: trine >= bb84 on both bounds")?;
    } else {
        writeln!(
            out,
            "dominance: lower {}, upper {}",
            dominance_text(report.lower),
            dominance_text(report.upper)
        )?;
    }

    write_all(&args.out, &files)?;
    for (path, _) in &files {
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn write_all(dir: &Path, files: &[(PathBuf, Vec<u8>)]) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    for (path, bytes) in files {
        fs::write(path, bytes)?;
    }
    Ok(())
}
