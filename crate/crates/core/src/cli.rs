//! Command-line front end. Every output file starts with `#` metadata lines
//! (tool version, command, arguments, seed) so the run can be repeated.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::born_inversion::{
    assemble_g, born_dataset, born_phase_partial, dataset_from_csv, dataset_to_csv, exact_dataset, g_high, g_low,
    invert_sine, invert_sine_band_limited, max_abs_error, profile_to_csv, relative_l2_error, PhaseShiftDataset,
    PipelineOptions,
};
use crate::error::{Error, Result};
use crate::io::fmt_num;
use crate::piecewise_inversion::{jump_profile, jumps_to_csv, reconstruct, reconstruct_mixed, uniform_radii, JumpOptions, ReconstructionReport};
use crate::potentials::{BargmannOneBoundPotential, ExponentialPotential, PiecewiseConstantPotential, Potential};
use crate::radial::{self, phase_shift, AngularParameter};
use crate::suites::{run_suite, SUITES};
use crate::zero_lines::{
    invert_line, line_from_csv, line_to_csv, mixed_to_csv, trace_fixed_l, trace_fixed_l_at_radii, trace_mixed,
    trace_mixed_at_radii, LineData,
};

pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_BAD_INPUT: i32 = 4;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvariantViolation(_) | Error::SeamMismatch { .. } | Error::SupportNotCovered { .. } | Error::Unresolvable { .. } => EXIT_INVARIANT,
        Error::Domain(_)
        | Error::ZeroBeyondRange { .. }
        | Error::InsufficientSamples { .. }
        | Error::Truncation { .. }
        | Error::Integration(_) => EXIT_NUMERICAL,
        Error::InvalidInput(_) | Error::Parse { .. } | Error::Unsupported(_) | Error::Io(_) => EXIT_BAD_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "zeroline", version, about = "Lines of zeros of the radial Schrödinger equation and the inverse problems built on them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zeros and phase shifts on an energy grid.
    Forward(ForwardArgs),
    /// Lines of zeros, fixed-l or mixed.
    Trace(TraceArgs),
    /// The one-sided curves -E'''/(2E') along the first s-wave line, also at each detected jump.
    Fig2(Fig2Args),
    /// Step potential from a traced line.
    InvertPiecewise(InvertPiecewiseArgs),
    /// Born reconstruction from mixed phase-shift data.
    InvertBorn(InvertBornArgs),
    /// Randomized invariant suites.
    Verify(VerifyArgs),
}

/// Settings shared by every command.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidInput(format!("--tol must lie in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }
}

/// Potential selection: a file, a preset, or inline `key=value;key=value`.
#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    /// File path, preset (zero, two-step, bargmann, exponential) or inline `type=..;..`.
    #[arg(long, default_value = "two-step")]
    pub potential: String,
    /// Bound energy is `-gamma2` for the bargmann preset.
    #[arg(long, default_value_t = 10.0)]
    pub gamma2: f64,
    /// Coupling of the bargmann preset.
    #[arg(long, default_value_t = 5.0)]
    pub c: f64,
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub v0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
}

impl PotentialArgs {
    pub fn load(&self) -> Result<Potential> {
        let spec = self.potential.trim();
        match spec {
            "zero" | "free" => return Ok(Potential::Zero),
            "two-step" => return Ok(PiecewiseConstantPotential::two_step_example().into()),
            "bargmann" => return Ok(BargmannOneBoundPotential::from_gamma_squared(self.gamma2, self.c)?.into()),
            "exponential" => return Ok(ExponentialPotential::new(self.v0, self.mu)?.into()),
            _ => {}
        }
        let path = Path::new(spec);
        if path.is_file() {
            return fs::read_to_string(path)?.parse();
        }
        if spec.contains('=') {
            return spec.replace(';', "\n").parse();
        }
        Err(Error::InvalidInput(format!("{spec:?} is neither a file, a preset nor an inline potential")))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub run: RunConfig,
    /// Zero indices, e.g. `3`, `1..4` or `1,3`.
    #[arg(long, default_value = "1..3")]
    pub n: String,
    #[arg(long, default_value_t = 0)]
    pub fixed_l: usize,
    /// Comma-separated energies.
    #[arg(long, default_value = "1,4,9.869604401089358,100", allow_hyphen_values = true)]
    pub energies: String,
    /// Also write first-order Born phase shifts.
    #[arg(long)]
    pub born: bool,
    /// Matching radius for phase shifts; defaults past the potential tail.
    #[arg(long)]
    pub r_match: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub run: RunConfig,
    #[arg(long, default_value = "1")]
    pub n: String,
    #[arg(long, default_value_t = 0)]
    pub fixed_l: usize,
    /// Junction energy; makes the line mixed.
    #[arg(long, allow_negative_numbers = true)]
    pub e0: Option<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub e_min: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    pub e_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Upper end of the lambda part of a mixed line.
    #[arg(long, default_value_t = 4.0)]
    pub lambda_max: f64,
    /// Sample at radii `start:end` instead of on an energy grid.
    #[arg(long)]
    pub r_range: Option<String>,
    /// Samples per unit radius with `--r-range`.
    #[arg(long, default_value_t = 400.0)]
    pub density: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Fig2Args {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub run: RunConfig,
    #[arg(long, default_value = "0.3:4.6")]
    pub r_range: String,
    #[arg(long, default_value_t = 400.0)]
    pub density: f64,
    /// Write every k-th interior sample of the curve.
    #[arg(long, default_value_t = 4)]
    pub stride: usize,
}

#[derive(Debug, Clone, Args)]
pub struct InvertPiecewiseArgs {
    /// Line CSV written by `trace`.
    #[arg(long)]
    pub line: PathBuf,
    #[command(flatten)]
    pub run: RunConfig,
    #[arg(long, default_value_t = 15)]
    pub window: usize,
    #[arg(long, default_value_t = 6)]
    pub degree: usize,
    #[arg(long, default_value_t = 5.0)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Args)]
pub struct InvertBornArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub run: RunConfig,
    /// Dataset CSV; when absent the data are generated from `--potential`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    pub k0: f64,
    #[arg(long, default_value_t = 40)]
    pub lmax: usize,
    /// Largest momentum transfer; the fixed-l branch runs to `qmax / 2`.
    #[arg(long, default_value_t = 60.0)]
    pub qmax: f64,
    /// `born` or `exact` phase shifts for generated data.
    #[arg(long, default_value = "born")]
    pub source: String,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunConfig,
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Cases per suite; each suite has its own default.
    #[arg(long)]
    pub count: Option<usize>,
}

/// Metadata written at the top of every output file.
struct Meta(Vec<(String, String)>);

impl Meta {
    fn new(command: &str, args: &[String], seed: u64) -> Self {
        Meta(vec![
            ("tool".into(), format!("zeroline-{}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), command.into()),
            ("args".into(), args.join(" ")),
            ("seed".into(), seed.to_string()),
        ])
    }

    fn with(&self, extra: &[(&str, String)]) -> Vec<(String, String)> {
        let mut m = self.0.clone();
        m.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        m
    }

    fn comment(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(s, "# {k}={v}");
        }
        s
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

/// `3`, `1..4` (inclusive) or `1,3`.
pub fn parse_indices(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidInput(format!("bad zero index list {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

/// `start:end` with `start < end`.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidInput(format!("bad range {s:?}; expected start:end"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if !(a < b && a > 0.0 && b.is_finite()) {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_energies(s: &str) -> Result<Vec<f64>> {
    let es: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad energy {t:?}"))))
        .collect::<Result<_>>()?;
    if es.is_empty() {
        return Err(Error::InvalidInput("empty energy list".into()));
    }
    Ok(es)
}

/// Descending energies on `(e_min, e_max]`: a uniform grid refined
/// geometrically towards `e_min` and towards zero, where lines end.
pub fn tracing_energy_grid(e_min: f64, e_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(e_min < e_max && points >= 2) {
        return Err(Error::InvalidInput("need e_min < e_max and at least two points".into()));
    }
    let mut es: Vec<f64> = (0..points)
        .map(|i| e_max - (e_max - e_min) * i as f64 / (points - 1) as f64)
        .filter(|&e| e > e_min)
        .collect();
    let mut anchors = vec![e_min];
    if e_min < 0.0 && e_max > 0.0 {
        anchors.push(0.0);
    }
    for a in anchors {
        for j in 0..6 {
            for m in [5.0, 2.0, 1.0] {
                let d = m * 10f64.powi(-j);
                for e in [a + d, a - d] {
                    if e > e_min && e <= e_max && e != 0.0 {
                        es.push(e);
                    }
                }
            }
        }
    }
    es.sort_by(|a, b| b.total_cmp(a));
    es.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    Ok(es)
}

fn gnuplot_lines(files: &[String], title: &str) -> String {
    let mut s = format!("set datafile separator ','\nset xlabel 'E'\nset ylabel 'r'\nset title '{title}'\nplot ");
    let parts: Vec<String> = files
        .iter()
        .map(|f| format!("'{f}' every ::1 using 2:3 with lines title '{f}'"))
        .collect();
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}

fn cmd_forward(a: &ForwardArgs, meta: &Meta) -> Result<String> {
    a.run.validate()?;
    let p = a.potential.load()?;
    let ns = parse_indices(&a.n)?;
    let es = parse_energies(&a.energies)?;
    let ang = AngularParameter::from_ell(a.fixed_l as f64)?;
    let mut zeros = meta.comment();
    let _ = writeln!(zeros, "# ell={}", a.fixed_l);
    zeros.push_str("E,n,r\n");
    for &e in &es {
        for &n in &ns {
            let r = match radial::nth_zero(&p, ang, e, n, a.run.tol) {
                Ok(r) => r,
                Err(Error::ZeroBeyondRange { .. }) => f64::INFINITY,
                Err(err) => return Err(err),
            };
            let _ = writeln!(zeros, "{},{n},{}", fmt_num(e), fmt_num(r));
        }
    }
    write_file(&a.run.out, "zeros.csv", &zeros)?;

    let r_match = a.r_match.unwrap_or_else(|| p.tail_radius(a.run.tol).max(10.0));
    let mut phases = meta.comment();
    let _ = writeln!(phases, "# ell={} r_match={}", a.fixed_l, fmt_num(r_match));
    phases.push_str(if a.born { "k,delta,delta_born\n" } else { "k,delta\n" });
    let mut rows = 0;
    for &e in es.iter().filter(|&&e| e > 0.0) {
        let k = e.sqrt();
        let d = phase_shift(&p, a.fixed_l, k, r_match, a.run.tol)?;
        if a.born {
            let b = born_phase_partial(&p, a.fixed_l, k)?;
            let _ = writeln!(phases, "{},{},{}", fmt_num(k), fmt_num(d), fmt_num(b));
        } else {
            let _ = writeln!(phases, "{},{}", fmt_num(k), fmt_num(d));
        }
        rows += 1;
    }
    write_file(&a.run.out, "phase_shifts.csv", &phases)?;
    Ok(format!("zeros={} phase_shifts={rows}", es.len() * ns.len()))
}

fn cmd_trace(a: &TraceArgs, meta: &Meta) -> Result<String> {
    a.run.validate()?;
    let p = a.potential.load()?;
    let ns = parse_indices(&a.n)?;
    let ang = AngularParameter::from_ell(a.fixed_l as f64)?;
    let radii = match &a.r_range {
        Some(s) => {
            let (lo, hi) = parse_range(s)?;
            if !(a.density > 0.0) {
                return Err(Error::InvalidInput("--density must be positive".into()));
            }
            Some(uniform_radii(lo, hi, a.density))
        }
        None => None,
    };
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for &n in &ns {
        let (name, text) = match (a.e0, &radii) {
            (Some(e0), Some(rs)) => {
                let line = trace_mixed_at_radii(&p, n, ang, e0, rs, a.run.tol)?;
                summary.push(format!("n={n} r0={}", fmt_num(line.r0)));
                (format!("mixed_n{n}.csv"), mixed_to_csv(&line, &meta.0))
            }
            (Some(e0), None) => {
                let line = trace_mixed(&p, n, ang, e0, a.e_max, a.lambda_max, a.points, a.run.tol)?;
                summary.push(format!("n={n} r0={}", fmt_num(line.r0)));
                (format!("mixed_n{n}.csv"), mixed_to_csv(&line, &meta.0))
            }
            (None, Some(rs)) => {
                let line = trace_fixed_l_at_radii(&p, n, ang, rs, a.run.tol)?;
                summary.push(format!("n={n} samples={}", line.samples.len()));
                (format!("line_n{n}.csv"), line_to_csv(&line, &meta.0))
            }
            (None, None) => {
                let grid = tracing_energy_grid(a.e_min, a.e_max, a.points)?;
                let line = trace_fixed_l(&p, n, ang, &grid, a.run.tol)?;
                let mut s = format!("n={n} samples={}", line.samples.len());
                if let Some(t) = line.truncation {
                    let _ = write!(s, " truncated_at_E={}", fmt_num(t.param));
                }
                summary.push(s);
                (format!("line_n{n}.csv"), line_to_csv(&line, &meta.0))
            }
        };
        write_file(&a.run.out, &name, &text)?;
        files.push(name);
    }
    write_file(&a.run.out, "trace.gp", &gnuplot_lines(&files, "lines of zeros"))?;
    Ok(summary.join("\n"))
}

fn cmd_fig2(a: &Fig2Args, meta: &Meta) -> Result<String> {
    a.run.validate()?;
    let p = a.potential.load()?;
    let (lo, hi) = parse_range(&a.r_range)?;
    let rs = uniform_radii(lo, hi, a.density);
    let line = trace_fixed_l_at_radii(&p, 1, AngularParameter::s_wave(), &rs, 1e-12)?;
    let inv = invert_line(&line)?;
    let opts = JumpOptions::default();
    let w = opts.derivatives.window;
    if rs.len() < 2 * w + 2 {
        return Err(Error::InvalidInput("radius range too short for the derivative window".into()));
    }
    let rep = reconstruct(&line, &opts)?;
    let mut points: Vec<f64> = rs[w..rs.len() - w].iter().step_by(a.stride.max(1)).copied().collect();
    points.extend(rep.jumps.iter().map(|j| j.a));
    points.sort_by(f64::total_cmp);
    let curve = jump_profile(&inv, &points, opts.derivatives)?;
    let mut s = meta.comment();
    s.push_str("r,left,right,left_err,right_err\n");
    for c in &curve {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_num(c.r),
            fmt_num(c.left),
            fmt_num(c.right),
            fmt_num(c.left_err),
            fmt_num(c.right_err)
        );
    }
    write_file(&a.run.out, "fig2.csv", &s)?;
    write_report(&a.run.out, &rep, meta)?;
    let gp = "set datafile separator ','\nset xlabel 'r'\nset ylabel \"-E'''/(2E')\"\n\
              plot 'fig2.csv' every ::1 using 1:2 with lines title 'left', \\\n     \
              'fig2.csv' every ::1 using 1:3 with lines title 'right'\n";
    write_file(&a.run.out, "fig2.gp", gp)?;
    Ok(report_summary(&rep))
}

fn write_report(dir: &Path, rep: &ReconstructionReport, meta: &Meta) -> Result<()> {
    let potential = Potential::from(rep.potential.clone());
    write_file(dir, "potential.txt", &format!("{}{potential}", meta.comment()))?;
    write_file(dir, "jumps.csv", &jumps_to_csv(&rep.jumps, &meta.0))?;
    Ok(())
}

fn report_summary(rep: &ReconstructionReport) -> String {
    let mut s = format!("jumps={} residual={}", rep.jumps.len(), fmt_num(rep.residual));
    for j in &rep.jumps {
        let _ = write!(s, "\na={} deltaV={} err={}", fmt_num(j.a), fmt_num(j.delta_v), fmt_num(j.delta_v_err));
    }
    let _ = write!(s, "\nvalues={:?}", rep.potential.values());
    s
}

fn cmd_invert_piecewise(a: &InvertPiecewiseArgs, meta: &Meta) -> Result<String> {
    a.run.validate()?;
    if a.window < a.degree + 2 || !(a.threshold > 0.0) {
        return Err(Error::InvalidInput("need window >= degree + 2 and a positive threshold".into()));
    }
    let mut opts = JumpOptions::default();
    opts.derivatives.window = a.window;
    opts.derivatives.degree = a.degree;
    opts.threshold = a.threshold;
    let text = fs::read_to_string(&a.line)?;
    let rep = match line_from_csv(&text)? {
        LineData::Fixed(line) => reconstruct(&line, &opts)?,
        LineData::Mixed(line) => reconstruct_mixed(&line, &opts)?,
    };
    write_report(&a.run.out, &rep, meta)?;
    Ok(report_summary(&rep))
}

fn cmd_invert_born(a: &InvertBornArgs, meta: &Meta) -> Result<String> {
    a.run.validate()?;
    let (ds, truth): (PhaseShiftDataset, Option<Potential>) = match &a.data {
        Some(path) => (dataset_from_csv(&fs::read_to_string(path)?)?, None),
        None => {
            if !(a.k0 > 0.0 && a.qmax > 2.0 * a.k0) {
                return Err(Error::InvalidInput("need 0 < 2 k0 < qmax".into()));
            }
            let p = a.potential.load()?;
            let o = PipelineOptions::new(a.k0, 0.5 * a.qmax, a.lmax);
            let ds = match a.source.as_str() {
                "born" => born_dataset(&p, 0, o.k0, o.k_max, o.nk, o.l_max)?,
                "exact" => exact_dataset(&p, 0, o.k0, o.k_max, o.nk, o.l_max, a.run.tol)?,
                other => return Err(Error::InvalidInput(format!("unknown source {other:?}; expected born or exact"))),
            };
            (ds, Some(p))
        }
    };
    let k_max = ds.fixed_l_branch.last().map(|x| x.0).unwrap_or(ds.k0);
    let o = PipelineOptions::new(ds.k0, k_max, ds.fixed_e_branch.len().saturating_sub(1));
    let q_low: Vec<f64> = (0..o.n_low).map(|i| 2.0 * ds.k0 * i as f64 / (o.n_low - 1) as f64).collect();
    let low = g_low(&ds, &q_low)?;
    let high = g_high(&ds)?;
    let profile = assemble_g(&low, &high, o.seam_tol)?;
    let inv = invert_sine(&profile, &o.r_grid)?;
    let band = invert_sine_band_limited(&low, &o.r_grid)?;

    let source = [("source", ds.source.label().to_string())];
    write_file(&a.run.out, "dataset.csv", &dataset_to_csv(&ds, &meta.0))?;
    write_file(&a.run.out, "profile.csv", &profile_to_csv(&profile, &meta.with(&source)))?;
    let mut s = meta.comment();
    s.push_str(if truth.is_some() { "r,V,V_band_limited,V_true\n" } else { "r,V,V_band_limited\n" });
    for (i, r) in o.r_grid.iter().enumerate() {
        let _ = write!(s, "{},{},{}", fmt_num(*r), fmt_num(inv.potential.values()[i]), fmt_num(band.values()[i]));
        if let Some(t) = &truth {
            let _ = write!(s, ",{}", fmt_num(t.value(*r)));
        }
        s.push('\n');
    }
    write_file(&a.run.out, "reconstruction.csv", &s)?;

    let seam = (low.g[low.g.len() - 1] - high.g[0]).abs();
    let mut report = format!("source={} seam_mismatch={}", ds.source.label(), fmt_num(seam));
    if let Some(w) = &inv.tail_warning {
        eprintln!("warning: {w}");
        report.push_str(" tail_warning=yes");
    }
    if let Some(t) = &truth {
        let _ = write!(
            report,
            "\nl2_error={} max_error={} band_limited_l2_error={}",
            fmt_num(relative_l2_error(&inv.potential, t, &o.r_grid)),
            fmt_num(max_abs_error(&inv.potential, t, &o.r_grid)),
            fmt_num(relative_l2_error(&band, t, &o.r_grid))
        );
    }
    write_file(&a.run.out, "report.txt", &format!("{}{report}\n", meta.comment()))?;
    Ok(report)
}

fn cmd_verify(a: &VerifyArgs, meta: &Meta) -> Result<(String, bool)> {
    let names: Vec<&str> = if a.suite == "all" { SUITES.to_vec() } else { vec![a.suite.as_str()] };
    let mut lines = Vec::new();
    let mut ok = true;
    for name in names {
        let s = run_suite(name, a.run.seed, a.count)?;
        ok &= s.passed();
        lines.push(s.line());
        for f in s.failures.iter().take(10) {
            eprintln!("{name}: {f}");
        }
    }
    let text = lines.join("\n");
    write_file(&a.run.out, "verify.txt", &format!("{}{text}\n", meta.comment()))?;
    Ok((text, ok))
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { 0 };
        }
    };
    let rest = &args[1.min(args.len())..];
    let (name, seed) = match &cli.command {
        Command::Forward(a) => ("forward", a.run.seed),
        Command::Trace(a) => ("trace", a.run.seed),
        Command::Fig2(a) => ("fig2", a.run.seed),
        Command::InvertPiecewise(a) => ("invert-piecewise", a.run.seed),
        Command::InvertBorn(a) => ("invert-born", a.run.seed),
        Command::Verify(a) => ("verify", a.run.seed),
    };
    let meta = Meta::new(name, rest, seed);
    let outcome = match &cli.command {
        Command::Forward(a) => cmd_forward(a, &meta).map(|s| (s, true)),
        Command::Trace(a) => cmd_trace(a, &meta).map(|s| (s, true)),
        Command::Fig2(a) => cmd_fig2(a, &meta).map(|s| (s, true)),
        Command::InvertPiecewise(a) => cmd_invert_piecewise(a, &meta).map(|s| (s, true)),
        Command::InvertBorn(a) => cmd_invert_born(a, &meta).map(|s| (s, true)),
        Command::Verify(a) => cmd_verify(a, &meta),
    };
    match outcome {
        Ok((text, ok)) => {
            println!("{text}");
            if ok {
                0
            } else {
                EXIT_INVARIANT
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
