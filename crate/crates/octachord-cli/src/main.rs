//! Command-line surface: density tables, a validation report, Monte Carlo
//! comparisons, and scattering-intensity tables, all as CSV/JSON with a
//! run manifest comment so any output can be reproduced exactly.

use clap::{Args, Parser, Subcommand};
use octachord::geometry::consts;
use octachord::quadrature::{edges_within, integrate};
use octachord::{
    density_table, discontinuity, gamma0, gamma1, gamma2_edge, gamma2_parallel, gamma2_vertex,
    intensity, iur_chords, make_octahedron, mc_pair_density, stick_gamma, sum_rules, McConfig,
    McHistogram, PairTag, QuadratureConfig, SumRuleReport,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;
use std::str::FromStr;

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "octachord",
    version,
    about = "Chord-length distribution of the regular octahedron"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate gamma'' per facet-pair class, eta, gamma', gamma over a grid
    Table(TableArgs),
    /// Check sum rules, the jump, and branch continuity; print a JSON report
    Validate(ValidateArgs),
    /// Compare the Monte Carlo estimators against the closed forms
    Mc(McArgs),
    /// Tabulate the scattering intensity I(q) over a q grid
    Intensity(IntensityArgs),
}

/// start:stop:count grid specification.
#[derive(Debug, Clone, Copy, Serialize)]
struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count, got {s:?}"));
        }
        let start: f64 = parts[0].parse().map_err(|e| format!("bad start: {e}"))?;
        let stop: f64 = parts[1].parse().map_err(|e| format!("bad stop: {e}"))?;
        let count: usize = parts[2].parse().map_err(|e| format!("bad count: {e}"))?;
        if !start.is_finite() || !stop.is_finite() || start >= stop || count < 2 {
            return Err(format!("grid {s:?} must satisfy start < stop, count >= 2"));
        }
        Ok(Grid { start, stop, count })
    }
}

#[derive(Args)]
struct TableArgs {
    /// Edge length of the octahedron
    #[arg(long, default_value_t = 1.0)]
    edge: f64,
    /// Grid start:stop:count; defaults to the full support [0, sqrt2*edge]
    #[arg(long)]
    grid: Option<Grid>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Edge length used for the jump report (sum rules are scale-free)
    #[arg(long, default_value_t = 1.0)]
    edge: f64,
    /// Tolerance on the sum-rule deviations
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct McArgs {
    /// Edge length of the octahedron
    #[arg(long, default_value_t = 1.0)]
    edge: f64,
    /// RNG seed; identical seeds reproduce outputs byte for byte
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per estimator (>= 10000)
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Histogram bins over [0, sqrt2*edge]
    #[arg(long, default_value_t = 200)]
    bins: usize,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct IntensityArgs {
    /// Edge length of the octahedron
    #[arg(long, default_value_t = 1.0)]
    edge: f64,
    /// q grid start:stop:count
    #[arg(long, default_value = "0:20:201")]
    grid: Grid,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

enum CliError {
    Usage(String),
    Io(String),
    Validation,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Validation => EXIT_VALIDATION,
        }
    }
}

impl From<octachord::Error> for CliError {
    fn from(e: octachord::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    version: &'a str,
    edge: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<Grid>,
    quadrature: &'a QuadratureConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<&'a McConfig>,
    /// Omitted for mc runs, whose outputs must be byte-identical per seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
}

fn manifest_line(m: &RunManifest) -> String {
    // The manifest is one '#' comment line of JSON ahead of the CSV header.
    format!("# {}", serde_json::to_string(m).expect("manifest serializes"))
}

fn now_unix() -> Option<u64> {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

/// 17 significant digits: round-trip exact for f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_output(out: &Option<std::path::PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            f.write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(EXIT_USAGE) };
        }
    };
    let result = match cli.cmd {
        Cmd::Table(args) => cmd_table(args),
        Cmd::Validate(args) => cmd_validate(args),
        Cmd::Mc(args) => cmd_mc(args),
        Cmd::Intensity(args) => cmd_intensity(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Io(msg) => eprintln!("i/o error: {msg}"),
                CliError::Validation => eprintln!("validation failed; see report"),
            }
            ExitCode::from(e.code())
        }
    }
}

fn cmd_table(args: TableArgs) -> Result<(), CliError> {
    let cfg = QuadratureConfig::default();
    let grid = args.grid.unwrap_or(Grid {
        start: 0.0,
        stop: consts::sqrt_2() * args.edge,
        count: 200,
    });
    let table = density_table(args.edge, grid.start, grid.stop, grid.count, &cfg)?;
    let manifest = RunManifest {
        command: "table",
        version: env!("CARGO_PKG_VERSION"),
        edge: args.edge,
        grid: Some(grid),
        quadrature: &cfg,
        mc: None,
        timestamp_unix: now_unix(),
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", manifest_line(&manifest));
    let _ = writeln!(out, "r,g2_edge,g2_vertex,g2_parallel,g2_total,eta,gamma1,gamma0,side");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt(row.r),
            fmt(row.g2_edge),
            fmt(row.g2_vertex),
            fmt(row.g2_parallel),
            fmt(row.g2_total),
            fmt(row.eta),
            fmt(row.gamma1),
            fmt(row.gamma0),
            row.side
        );
    }
    write_output(&args.out, &out)
}

#[derive(Serialize)]
struct ValidateReport {
    #[serde(flatten)]
    sum_rules: SumRuleReport,
    /// Worst two-sided gamma'' gap at the interior breakpoints, probed at
    /// +-1e-7: edge and vertex classes at {sqrt(2/3), sqrt3/2, 1}, parallel
    /// at {sqrt3/2, 1} (it jumps at sqrt(2/3) by design).
    continuity_max_gap: f64,
    continuity_tolerance: f64,
    /// Worst two-sided gap of the vertex-class arcsine branches Lambda_C and
    /// Lambda_D across their flip points, probed at +-1e-7.  The slopes
    /// there are O(10), so a smooth passage shows ~1e-6; a wrong branch
    /// would show O(1).
    lambda_max_gap: f64,
    lambda_tolerance: f64,
    jump_location: f64,
    edge: f64,
    ok: bool,
}

fn continuity_gaps() -> Result<(f64, f64), CliError> {
    let eps = 1e-7;
    let h = consts::minimax()[0];
    let hh = consts::minimax()[1];
    let mut worst = 0.0f64;
    let mut probe = |f: fn(f64) -> octachord::Result<f64>, bp: f64| -> Result<(), CliError> {
        let gap = (f(bp + eps)? - f(bp - eps)?).abs();
        worst = worst.max(gap);
        Ok(())
    };
    for bp in [h, hh, 1.0] {
        probe(gamma2_edge, bp)?;
        probe(gamma2_vertex, bp)?;
    }
    for bp in [hh, 1.0] {
        probe(gamma2_parallel, bp)?;
    }
    let lc = consts::lambda_c_flip();
    let ld = consts::lambda_d_flip();
    let lam_c_gap =
        (octachord::lambda_c(lc + eps)? - octachord::lambda_c(lc - eps)?).abs();
    let lam_d_gap =
        (octachord::lambda_d(ld + eps)? - octachord::lambda_d(ld - eps)?).abs();
    Ok((worst, lam_c_gap.max(lam_d_gap)))
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    if !args.tolerance.is_finite() || args.tolerance <= 0.0 {
        return Err(CliError::Usage(format!(
            "tolerance {} must be positive",
            args.tolerance
        )));
    }
    let cfg = QuadratureConfig { tolerance: args.tolerance, ..QuadratureConfig::default() };
    let rules = sum_rules(&cfg)?;
    let jump = discontinuity(args.edge)?;
    let (continuity_max_gap, lambda_max_gap) = continuity_gaps()?;
    let continuity_tolerance = 1e-6;
    let lambda_tolerance = 1e-5;
    let ok = rules.within_tolerance
        && continuity_max_gap < continuity_tolerance
        && lambda_max_gap < lambda_tolerance;
    let report = ValidateReport {
        sum_rules: rules,
        continuity_max_gap,
        continuity_tolerance,
        lambda_max_gap,
        lambda_tolerance,
        jump_location: jump.location,
        edge: args.edge,
        ok,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_output(&args.out, &format!("{json}\n"))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation)
    }
}

/// z-score of an MC bin against its analytic reference.  Empty bins whose
/// expected deposit mass is negligible score 0 (nothing distinguishable from
/// zero was expected); empty bins that should have been populated score 99.
fn bin_z(mc: f64, se: f64, analytic: f64, expected_mass: f64) -> f64 {
    if se > 0.0 {
        (mc - analytic) / se
    } else if expected_mass < 9.0 {
        0.0
    } else {
        99.0
    }
}

struct Comparison {
    label: &'static str,
    rows: Vec<(f64, f64, f64, f64, f64, f64)>, // lo, hi, analytic, estimate, se, z
}

impl Comparison {
    fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.5.abs()).fold(0.0, f64::max)
    }
}

fn histogram_comparison(
    label: &'static str,
    hist: &McHistogram,
    samples: f64,
    mut bin_avg: impl FnMut(f64, f64) -> Result<f64, CliError>,
) -> Result<Comparison, CliError> {
    let mut rows = Vec::with_capacity(hist.density.len());
    for i in 0..hist.density.len() {
        let (lo, hi) = (hist.bin_edges[i], hist.bin_edges[i + 1]);
        let avg = bin_avg(lo, hi)?;
        let z = bin_z(hist.density[i], hist.std_err[i], avg, avg * (hi - lo) * samples);
        rows.push((lo, hi, avg, hist.density[i], hist.std_err[i], z));
    }
    Ok(Comparison { label, rows })
}

fn cmd_mc(args: McArgs) -> Result<(), CliError> {
    if args.samples < 10_000 {
        return Err(CliError::Usage(format!(
            "samples {} < 10000 gives meaningless comparisons",
            args.samples
        )));
    }
    let geom = make_octahedron(args.edge)?;
    let qcfg = QuadratureConfig::default();
    let l = args.edge;
    let diam = consts::sqrt_2() * l;
    let mc_cfg = McConfig {
        seed: args.seed,
        samples: args.samples,
        bins: args.bins,
        r_max: diam,
    };
    let mean_chord = 4.0 * geom.volume / geom.surface;

    // Chord-length histogram vs eta; the exact bin average comes from the
    // antiderivative: integral of gamma''_l over a bin is gamma'_l(hi) - gamma'_l(lo).
    let iur = iur_chords(&mc_cfg, &geom)?;
    let hits = iur.total_weight;
    let iur_cmp = histogram_comparison("iur", &iur, hits, |lo, hi| {
        let g = (gamma1((hi / l).min(consts::sqrt_2()), &qcfg)?
            - gamma1((lo / l).min(consts::sqrt_2()), &qcfg)?)
            / l;
        Ok(mean_chord * g / (hi - lo))
    })?;

    // Per-class pair densities vs their closed forms.
    type Exact = fn(f64) -> octachord::Result<f64>;
    let classes: [(&'static str, PairTag, Exact); 3] = [
        ("pair_edge", PairTag::Edge, gamma2_edge),
        ("pair_vertex", PairTag::Vertex, gamma2_vertex),
        ("pair_parallel", PairTag::Parallel, gamma2_parallel),
    ];
    let mut comparisons = vec![iur_cmp];
    for (label, tag, exact) in classes {
        let hist = mc_pair_density(tag, &mc_cfg, &geom)?;
        let cmp = histogram_comparison(label, &hist, args.samples as f64, |lo, hi| {
            let edges = edges_within(&qcfg.panel_breakpoints, lo / l, (hi / l).min(consts::sqrt_2()));
            let mass = integrate(exact, &edges, qcfg.nodes_per_panel)? / l;
            Ok(mass / (hi - lo))
        })?;
        comparisons.push(cmp);
    }

    // Stick tossing vs gamma at four representative distances.
    let stick_rs = [0.2 * l, 0.5 * l, 0.9 * l, 1.3 * l];
    let mut stick_rows = Vec::new();
    for r in stick_rs {
        let (est, se) = stick_gamma(r, &mc_cfg, &geom)?;
        let truth = gamma0(r / l, &qcfg)?;
        let z = bin_z(est, se, truth, truth * args.samples as f64);
        stick_rows.push((r, r, truth, est, se, z));
    }
    comparisons.push(Comparison { label: "stick", rows: stick_rows });

    let manifest = RunManifest {
        command: "mc",
        version: env!("CARGO_PKG_VERSION"),
        edge: args.edge,
        grid: None,
        quadrature: &qcfg,
        mc: Some(&mc_cfg),
        timestamp_unix: None,
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", manifest_line(&manifest));
    let _ = writeln!(
        out,
        "# z convention: (estimate - analytic)/std_err; empty bins expecting \
         fewer than 9 deposits score 0, empty bins expecting more score 99"
    );
    let _ = writeln!(out, "comparison,r_lo,r_hi,analytic,estimate,std_err,z");
    for cmp in &comparisons {
        for (lo, hi, analytic, est, se, z) in &cmp.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                cmp.label,
                fmt(*lo),
                fmt(*hi),
                fmt(*analytic),
                fmt(*est),
                fmt(*se),
                fmt(*z)
            );
        }
    }
    let mut summary = String::new();
    for cmp in &comparisons {
        let _ = writeln!(summary, "# max_abs_z {} = {:.3}", cmp.label, cmp.max_abs_z());
    }
    out.push_str(&summary);
    write_output(&args.out, &out)?;
    if args.out.is_some() {
        // Echo the summary so a file run still reports at a glance.
        print!("{summary}");
    }
    Ok(())
}

fn cmd_intensity(args: IntensityArgs) -> Result<(), CliError> {
    let grid = args.grid;
    if grid.start < 0.0 {
        return Err(CliError::Usage(format!("q start {} must be >= 0", grid.start)));
    }
    let edge = args.edge;
    if !edge.is_finite() || edge <= 0.0 {
        return Err(CliError::Usage(format!("edge {edge} must be positive")));
    }
    let cfg = QuadratureConfig::default();
    let manifest = RunManifest {
        command: "intensity",
        version: env!("CARGO_PKG_VERSION"),
        edge,
        grid: Some(grid),
        quadrature: &cfg,
        mc: None,
        timestamp_unix: now_unix(),
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", manifest_line(&manifest));
    let _ = writeln!(out, "q,intensity,q4_intensity");
    let step = (grid.stop - grid.start) / (grid.count - 1) as f64;
    let scale = edge.powi(3);
    for i in 0..grid.count {
        let q = if i + 1 == grid.count { grid.stop } else { grid.start + step * i as f64 };
        // I_l(q) = l^3 I(q l) by the scaling of gamma.
        let iq = scale * intensity(q * edge, &cfg)?;
        let _ = writeln!(out, "{},{},{}", fmt(q), fmt(iq), fmt(q.powi(4) * iq));
    }
    write_output(&args.out, &out)
}
