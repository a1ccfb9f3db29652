//! Command-line definitions and their execution.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use virtent_core::contour::{self, ContourConfig, RatioMode};
use virtent_core::entropy::{
    self as ent, EntropyBreakdown, MassReading, SpectralDensity, TotalOptions, VacuumForm,
};
use virtent_core::loops::SchemeParams;
use virtent_core::series::EpsSeries;
use virtent_core::trace::{self, VacuumOverlap};

use crate::checks::{self, CheckContext, Status};
use crate::config::FileConfig;
use crate::error::{CliError, Result};
use crate::grid::Grid;
use crate::report::{ratio_report, BreakdownReport, ComplexDto};
use crate::svg::{Chart, Curve};
use crate::sweeps;
use crate::table;

#[derive(Debug, Parser)]
#[command(
    name = "virtent",
    version,
    about = "Entropies of real and virtual propagation in phi^4 theory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First-order total, external and internal entropies against m0.
    Figure2(SweepArgs),
    /// Vacuum entropy finite coefficient against m0, one curve per mu.
    Figure3(Figure3Args),
    /// One entropy as a JSON breakdown.
    Entropy(EntropyArgs),
    /// The contour constant and its regulated quadrature.
    Tau(TauArgs),
    /// Trace relations among the vacuum, two-point and four-point states.
    TraceCheck(TraceArgs),
    /// The full invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long)]
    pub m0_min: Option<f64>,
    #[arg(long)]
    pub m0_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Space the m0 grid logarithmically.
    #[arg(long)]
    pub log_grid: bool,
    /// Comma-separated list of mass scales.
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub tv: Option<f64>,
    /// Truncation order of the ε-series.
    #[arg(long)]
    pub order: Option<i32>,
    /// Table destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write the table as JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct Figure3Args {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, value_enum, default_value_t = VacuumFormArg::Derived)]
    pub vacuum_form: VacuumFormArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VacuumFormArg {
    Printed,
    Derived,
}

impl From<VacuumFormArg> for VacuumForm {
    fn from(v: VacuumFormArg) -> Self {
        match v {
            VacuumFormArg::Printed => VacuumForm::Printed,
            VacuumFormArg::Derived => VacuumForm::Derived,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioArg {
    Tau,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MassReadingArg {
    Printed,
    ExtraRatioLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    #[value(name = "ext2_order0")]
    Ext2Order0,
    #[value(name = "ext2_order1")]
    Ext2Order1,
    #[value(name = "ext2_total")]
    Ext2Total,
    #[value(name = "ext2_total_composed")]
    Ext2TotalComposed,
    #[value(name = "ext21")]
    Ext21,
    #[value(name = "int21")]
    Int21,
    #[value(name = "total21")]
    Total21,
    #[value(name = "mutual21")]
    Mutual21,
    #[value(name = "cond_ext_int")]
    CondExtInt,
    #[value(name = "cond_int_ext")]
    CondIntExt,
    #[value(name = "vacuum")]
    Vacuum,
    #[value(name = "tau")]
    Tau,
    #[value(name = "nonperturbative")]
    Nonperturbative,
    #[value(name = "ext2_order0_derived")]
    Ext2Order0Derived,
    #[value(name = "ext2_order1_derived")]
    Ext2Order1Derived,
    #[value(name = "ext21_derived")]
    Ext21Derived,
    #[value(name = "total21_derived")]
    Total21Derived,
    #[value(name = "generic_order1")]
    GenericOrder1,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct EntropyArgs {
    #[arg(long = "q", value_enum)]
    pub quantity: Quantity,
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub tv: Option<f64>,
    #[arg(long)]
    pub order: Option<i32>,
    /// Endpoint cut of the contour integrals.
    #[arg(long)]
    pub delta_cut: Option<f64>,
    #[arg(long, value_enum, default_value_t = RatioArg::Tau)]
    pub ratio: RatioArg,
    #[arg(long, value_enum, default_value_t = MassReadingArg::Printed)]
    pub mass_reading: MassReadingArg,
    #[arg(long, value_enum, default_value_t = VacuumFormArg::Derived)]
    pub vacuum_form: VacuumFormArg,
    /// Pole residue of the spectral density.
    #[arg(long)]
    pub z: Option<f64>,
    /// Physical mass of the spectral pole; defaults to m0.
    #[arg(long)]
    pub m_phys: Option<f64>,
    /// Multiparticle sample `M2:WEIGHT`, repeatable.
    #[arg(long = "sample", value_parser = parse_sample)]
    pub samples: Vec<(f64, f64)>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_sample(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected M2:WEIGHT, got {s}"))?;
    let m2 = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let w = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((m2, w))
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct TauArgs {
    #[arg(long)]
    pub delta_cut: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct TraceArgs {
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub tv: Option<f64>,
    #[arg(long)]
    pub order: Option<i32>,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long)]
    pub m_phys: Option<f64>,
    /// |⟨Ω₀|Ω⟩|²
    #[arg(long, default_value_t = 1.0)]
    pub overlap: f64,
    #[arg(long, default_value_t = 0.0)]
    pub e0: f64,
    /// Half time extent T.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        Some(p) => FileConfig::load(p),
        None => Ok(FileConfig::default()),
    }
}

fn params(m0: f64, mu: f64, lambda0: f64, tv: f64, order: Option<i32>) -> Result<SchemeParams> {
    let p = SchemeParams::from_tv(m0, mu, lambda0, tv)?;
    Ok(match order {
        Some(o) => p.set_order(o)?,
        None => p,
    })
}

/// Grid defaults differ per figure; flags override the config file.
struct Resolved {
    grid: Grid,
    mus: Vec<f64>,
    base: SchemeParams,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
    json: bool,
}

fn resolve(a: &SweepArgs, default_grid: (f64, f64), default_mus: &[f64]) -> Result<Resolved> {
    let c = load_config(&a.config)?;
    let grid = Grid::new(
        a.m0_min.or(c.m0_min).unwrap_or(default_grid.0),
        a.m0_max.or(c.m0_max).unwrap_or(default_grid.1),
        a.steps.or(c.steps).unwrap_or(200),
        a.log_grid || c.log_grid.unwrap_or(false),
    )?;
    let mus = if !a.mu.is_empty() {
        a.mu.clone()
    } else {
        c.mu.clone().unwrap_or_else(|| default_mus.to_vec())
    };
    if mus.is_empty() {
        return Err(CliError::Usage("at least one mu is required".into()));
    }
    let base = params(
        grid.min,
        mus[0],
        a.lambda0.or(c.lambda0).unwrap_or(1.0),
        a.tv.or(c.tv).unwrap_or(1.0),
        a.order.or(c.order),
    )?;
    Ok(Resolved {
        grid,
        mus,
        base,
        out: a.out.clone().or(c.out),
        svg: a.svg.clone().or(c.svg),
        json: a.json || c.json.unwrap_or(false),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn emit<F>(out: &Option<PathBuf>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut w = create(path)?;
            f(&mut w)?;
            w.flush().map_err(|e| CliError::io(path, e))
        }
        None => f(stdout),
    }
}

fn json_line<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w).map_err(|e| CliError::io("<stdout>", e))
}

fn figure2(a: &SweepArgs, stdout: &mut dyn Write) -> Result<u8> {
    let r = resolve(a, (1.0, 10.0), &[1.0])?;
    let rows = sweeps::figure2(&r.grid, &r.base)?;
    emit(&r.out, stdout, |w| {
        if r.json {
            json_line(w, &rows)
        } else {
            table::write_figure2(w, &r.grid, &rows)
        }
    })?;
    if let Some(path) = &r.svg {
        let col = |f: fn(&sweeps::Figure2Row) -> f64| rows.iter().map(|x| (x.m0, f(x))).collect();
        let curve = |label: &str, points, dashed| Curve {
            label: label.into(),
            points,
            dashed,
        };
        let chart = Chart {
            title: format!("Finite parts at TV = {}", r.base.tv()),
            x_label: "m0".into(),
            y_label: "entropy (finite part)".into(),
            curves: vec![
                curve("S_total", col(|x| x.s_total), false),
                curve("S_ext", col(|x| x.s_ext), false),
                curve("S_int", col(|x| x.s_int), false),
                curve("I", col(|x| x.mutual), false),
                curve("S_ext + S_int", col(|x| x.ext_plus_int), true),
            ],
        };
        write_text(path, &chart.render())?;
    }
    Ok(0)
}

fn figure3(a: &Figure3Args, stdout: &mut dyn Write) -> Result<u8> {
    let r = resolve(&a.sweep, (0.5, 6.0), &[0.5, 1.0, 2.0])?;
    let fig = sweeps::figure3(&r.grid, &r.mus, &r.base, a.vacuum_form.into())?;
    emit(&r.out, stdout, |w| {
        if r.json {
            json_line(w, &fig)
        } else {
            table::write_figure3(w, &r.grid, &fig)
        }
    })?;
    if let Some(path) = &r.svg {
        let chart = Chart {
            title: format!(
                "Vacuum entropy finite coefficient, lambda0 = {}",
                r.base.lambda0()
            ),
            x_label: "m0".into(),
            y_label: "finite coefficient".into(),
            curves: fig
                .mus
                .iter()
                .enumerate()
                .map(|(k, mu)| Curve {
                    label: format!("mu = {mu}"),
                    points: fig.column(k),
                    dashed: false,
                })
                .collect(),
        };
        write_text(path, &chart.render())?;
    }
    Ok(0)
}

fn contour_config(cut: Option<f64>) -> Result<ContourConfig> {
    Ok(match cut {
        Some(d) => ContourConfig::with_cut(d)?,
        None => ContourConfig::default(),
    })
}

/// Evaluates one named quantity.
pub fn evaluate(a: &EntropyArgs, p: &SchemeParams) -> Result<EntropyBreakdown> {
    let cfg = contour_config(a.delta_cut)?;
    let ratio = match a.ratio {
        RatioArg::Tau => RatioMode::Tau,
        RatioArg::Quadrature => RatioMode::Quadrature,
    };
    Ok(match a.quantity {
        Quantity::Ext2Order0 => ent::s_ext_2_order0(p),
        Quantity::Ext2Order1 => ent::s_ext_2_order1(p),
        Quantity::Ext2Total => ent::s_ext_2_total(p),
        Quantity::Ext2TotalComposed => ent::s_ext_2_total_composed(p),
        Quantity::Ext21 => ent::s_ext_21(p),
        Quantity::Int21 => ent::s_int_21(p),
        Quantity::Total21 => {
            let opts = TotalOptions {
                ratio,
                reading: match a.mass_reading {
                    MassReadingArg::Printed => MassReading::Printed,
                    MassReadingArg::ExtraRatioLog => MassReading::ExtraRatioLog,
                },
                contour: cfg,
            };
            ent::s_total_21_with(p, &opts)?
        }
        Quantity::Mutual21 => ent::mutual_information_21(p).compositional,
        Quantity::CondExtInt => ent::conditional_entropies_21(p).0,
        Quantity::CondIntExt => ent::conditional_entropies_21(p).1,
        Quantity::Vacuum => ent::s_vacuum_order1(p, a.vacuum_form.into())?,
        Quantity::Tau => {
            let value = match ratio {
                RatioMode::Tau => contour::tau().into(),
                RatioMode::Quadrature => {
                    contour::coeff_a(&cfg)?.value / contour::coeff_b(&cfg)?.value
                }
            };
            EntropyBreakdown::new("tau", EpsSeries::constant(value, 0))
        }
        Quantity::Nonperturbative => {
            let sd = SpectralDensity::new(
                a.z.unwrap_or(1.0),
                a.m_phys.unwrap_or(p.m0()),
                a.samples.clone(),
            )?;
            ent::s_nonperturbative(&sd, p)?
        }
        Quantity::Ext2Order0Derived => ent::s_ext_2_order0_derived(p)?,
        Quantity::Ext2Order1Derived => ent::s_ext_2_order1_derived(p)?,
        Quantity::Ext21Derived => ent::s_ext_21_derived(p)?,
        Quantity::Total21Derived => ent::s_total_21_derived(p)?,
        Quantity::GenericOrder1 => EntropyBreakdown::new(
            "generic_order1",
            ent::two_point_inputs(p)?.evaluate()?.truncate(p.order()),
        ),
    })
}

fn entropy(a: &EntropyArgs, stdout: &mut dyn Write) -> Result<u8> {
    let c = load_config(&a.config)?;
    let p = params(
        a.m0.or(c.m0).unwrap_or(1.0),
        a.mu.or(c.mu.as_ref().and_then(|m| m.first().copied()))
            .unwrap_or(1.0),
        a.lambda0.or(c.lambda0).unwrap_or(1.0),
        a.tv.or(c.tv).unwrap_or(1.0),
        a.order.or(c.order),
    )?;
    let a = EntropyArgs {
        delta_cut: a.delta_cut.or(c.delta_cut),
        ..a.clone()
    };
    let b = evaluate(&a, &p)?;
    json_line(stdout, &BreakdownReport::new(&b, &p))?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct TauReport {
    tau: f64,
    delta_cut: f64,
    a: ComplexDto,
    b: ComplexDto,
    ratio: ComplexDto,
}

fn tau(a: &TauArgs, stdout: &mut dyn Write) -> Result<u8> {
    let cfg = contour_config(a.delta_cut)?;
    let ca = contour::coeff_a(&cfg)?.value;
    let cb = contour::coeff_b(&cfg)?.value;
    let report = TauReport {
        tau: contour::tau(),
        delta_cut: cfg.endpoint_cut(),
        a: ca.into(),
        b: cb.into(),
        ratio: (ca / cb).into(),
    };
    json_line(stdout, &report)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct TraceReport {
    ratio_checks: Vec<crate::report::RatioCheckDto>,
    overlap_factor: ComplexDto,
    round_trip_max_diff: f64,
    phir_matches_phi4: bool,
    passed: bool,
}

fn trace_check(a: &TraceArgs, stdout: &mut dyn Write) -> Result<u8> {
    let m0 = a.m0.unwrap_or(1.0);
    let p = params(
        m0,
        1.0,
        a.lambda0.unwrap_or(1.0),
        a.tv.unwrap_or(1.0),
        a.order,
    )?;
    let overlap = VacuumOverlap {
        overlap_sq: a.overlap,
        e0: a.e0,
        t: a.t,
    };
    let ts = trace::consistent_trace_set(a.z, a.m_phys.unwrap_or(m0), &overlap, &p)?;
    let back = trace::vacuum_trace_phi4(&ts)?;
    let diff = back.max_coeff_diff(&EpsSeries::constant(overlap.factor(), p.order()));
    let same = trace::vacuum_trace_phir(&ts)? == back;
    let ratios = trace::ratio_checks(&p)?;
    let passed = diff <= 1e-10
        && same
        && ratios.checks[..2]
            .iter()
            .all(|c| c.deviation_from_unity() <= 1e-10);
    let report = TraceReport {
        ratio_checks: ratio_report(&ratios),
        overlap_factor: overlap.factor().into(),
        round_trip_max_diff: diff,
        phir_matches_phi4: same,
        passed,
    };
    json_line(stdout, &report)?;
    Ok(if passed { 0 } else { 1 })
}

/// Runs the suite with an explicit context so callers can inject faults.
pub fn check_with(ctx: &CheckContext, json: bool, stdout: &mut dyn Write) -> Result<u8> {
    let outcomes = checks::run_checks(ctx);
    let io = |e| CliError::io("<stdout>", e);
    if json {
        json_line(stdout, &outcomes)?;
    } else {
        for o in &outcomes {
            let tag = match o.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
            };
            writeln!(stdout, "{tag} {}: {}", o.name, o.detail).map_err(io)?;
        }
    }
    Ok(if checks::all_passed(&outcomes) { 0 } else { 1 })
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Figure2(a) => figure2(a, stdout),
        Command::Figure3(a) => figure3(a, stdout),
        Command::Entropy(a) => entropy(a, stdout),
        Command::Tau(a) => tau(a, stdout),
        Command::TraceCheck(a) => trace_check(a, stdout),
        Command::Check(a) => {
            let mut ctx = CheckContext::default();
            if let Some(seed) = a.seed {
                ctx.seed = seed;
            }
            check_with(&ctx, a.json, stdout)
        }
    }
}
