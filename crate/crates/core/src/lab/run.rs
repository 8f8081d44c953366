use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{LabError, Result};
use crate::grid::{Density, Grid, ScalarField};
use crate::inequality::{lemma1_check, ratio_report, ExponentConfig, RatioReport};
use crate::pullback::{
    ball_cover, coarea_check, incidence_graph, lq_scaling, pullback_lq_check, pullback_mean_check,
    spanning_tree, CoveringMapSpec, Metric, PointCloud,
};
use crate::riesz::{young_check, young_exponent, RieszKernelSpec};
use crate::search::{
    bump_density, fit_loglog, random_density, random_field, sweep, sweep_csv, BumpSpec,
    TrigPolynomial,
};

use super::config::{Command, DensityPreset, ExperimentConfig, FieldPreset};
use super::verify::run_suite;

/// Environment variable overriding the worker-pool size.
pub const THREADS_ENV: &str = "POINCARE_LAB_THREADS";

/// In-memory result of one command, before it is written to disk.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: String,
    pub json: serde_json::Value,
    /// Human-readable lines printed to stdout.
    pub summary: String,
    /// False when the command ran but its checks failed (e.g. a failing `verify`).
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub command: Command,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    pub manifest_path: PathBuf,
    pub threads: usize,
    pub wall_time: f64,
    pub artifacts: Artifacts,
}

/// Exit status for a finished run: 0 success, 2 hypothesis violation, 1 otherwise.
pub fn exit_code(result: &Result<RunSummary>) -> i32 {
    match result {
        Ok(summary) if summary.artifacts.passed => 0,
        Ok(_) => 1,
        Err(e) if e.is_hypothesis_violation() => 2,
        Err(_) => 1,
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                LabError::Config(format!("{THREADS_ENV}={v:?} is not a positive integer"))
            }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(LabError::Config(format!("{THREADS_ENV}: {e}"))),
    }
}

/// Runs the configured command inside a dedicated thread pool and writes
/// `<out>.csv`, `<out>.json` and `<out>.manifest.txt`.
pub fn run(cfg: &ExperimentConfig, config_text: &str) -> Result<RunSummary> {
    let start = Instant::now();
    let threads = threads_from_env()?.or(cfg.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    let artifacts = pool.install(|| execute(cfg))?;
    let threads = pool.current_num_threads();

    let prefix = cfg.resolve(&cfg.out);
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let csv_path = with_suffix(&prefix, "csv");
    let json_path = with_suffix(&prefix, "json");
    let manifest_path = with_suffix(&prefix, "manifest.txt");
    std::fs::write(&csv_path, &artifacts.csv)?;
    let mut json = serde_json::to_string_pretty(&artifacts.json)?;
    json.push('\n');
    std::fs::write(&json_path, json)?;

    let wall_time = start.elapsed().as_secs_f64();
    let mut manifest = String::new();
    let _ = writeln!(manifest, "poincare-lab {}", crate::VERSION);
    let _ = writeln!(manifest, "command = {}", cfg.command);
    let _ = writeln!(manifest, "seed = {}", cfg.seed);
    let _ = writeln!(manifest, "threads = {threads}");
    let _ = writeln!(manifest, "wall_time_s = {wall_time:.3}");
    let _ = writeln!(manifest, "csv = {}", csv_path.display());
    let _ = writeln!(manifest, "json = {}", json_path.display());
    let _ = writeln!(manifest, "passed = {}", artifacts.passed);
    manifest.push_str("--- config ---\n");
    manifest.push_str(config_text);
    if !config_text.ends_with('\n') {
        manifest.push('\n');
    }
    std::fs::write(&manifest_path, manifest)?;

    Ok(RunSummary {
        command: cfg.command,
        csv_path,
        json_path,
        manifest_path,
        threads,
        wall_time,
        artifacts,
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

/// Computes a command's artifacts on the current rayon pool without touching disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<Artifacts> {
    match cfg.command {
        Command::Verify => run_verify(),
        Command::Ratio => run_ratio(cfg),
        Command::Lemma1 => run_lemma1(cfg),
        Command::Young => run_young(cfg),
        Command::Coarea => run_coarea(cfg),
        Command::Cover => run_cover(cfg),
        Command::Sweep => run_sweep(cfg),
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_verify() -> Result<Artifacts> {
    let outcomes = run_suite();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let mut csv = String::from("check,passed,detail\n");
    let mut summary = String::new();
    for o in &outcomes {
        let _ = writeln!(csv, "{},{},{}", o.name, o.passed, csv_quote(&o.detail));
        let status = if o.passed { "pass" } else { "FAIL" };
        let _ = writeln!(summary, "{status} {}: {}", o.name, o.detail);
    }
    let _ = writeln!(
        summary,
        "{} passed, {failed} failed",
        outcomes.len() - failed
    );
    Ok(Artifacts {
        csv,
        json: json!({
            "passed": outcomes.len() - failed,
            "failed": failed,
            "checks": outcomes,
        }),
        summary,
        passed: failed == 0,
    })
}

/// Trigonometric polynomial sampled on any grid; Nyquist-checked on tori.
fn trig_field(grid: &Arc<Grid>, max_freq: usize, seed: u64) -> Result<ScalarField> {
    if grid.is_torus() {
        random_field(grid, max_freq, seed)
    } else {
        TrigPolynomial::random(grid.lengths(), max_freq, seed)?.sample(grid)
    }
}

/// Node closest to the centre of the domain.
pub fn midpoint_node(grid: &Grid) -> usize {
    let idx: Vec<usize> = grid
        .nodes()
        .iter()
        .zip(grid.periodic())
        .map(|(&m, &periodic)| if periodic { m / 2 } else { (m - 1) / 2 })
        .collect();
    grid.ravel(&idx)
}

fn preset_field(
    grid: &Arc<Grid>,
    preset: FieldPreset,
    max_freq: usize,
    seed: u64,
) -> Result<ScalarField> {
    let l0 = grid.lengths()[0];
    match preset {
        FieldPreset::Sin => ScalarField::from_fn(grid.clone(), |x| {
            (2.0 * std::f64::consts::PI * x[0] / l0).sin()
        }),
        FieldPreset::X => ScalarField::from_fn(grid.clone(), |x| x[0]),
        FieldPreset::Random => trig_field(grid, max_freq, seed),
    }
}

fn preset_density(
    grid: &Arc<Grid>,
    preset: DensityPreset,
    eps: f64,
    max_freq: usize,
    seed: u64,
) -> Result<Density> {
    match preset {
        DensityPreset::Uniform => Density::uniform(grid.clone()),
        DensityPreset::Bump => bump_density(grid, &BumpSpec::centred(grid, eps)),
        DensityPreset::Random => random_density(grid, max_freq, seed),
        DensityPreset::PointMass => Density::point_mass(grid.clone(), midpoint_node(grid)),
    }
}

#[derive(Serialize)]
struct RatioOutput {
    exponents: ExponentConfig,
    field: FieldPreset,
    density: DensityPreset,
    #[serde(flatten)]
    report: RatioReport,
}

fn run_ratio(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let exponents = cfg.exponent_config()?;
    let grid = cfg.build_grid()?;
    let section = &cfg.ratio;
    let f = preset_field(&grid, section.field, section.max_freq, cfg.seed)?;
    let omega = preset_density(
        &grid,
        section.density,
        section.eps,
        section.max_freq,
        cfg.seed.wrapping_add(1),
    )?;
    let report = ratio_report(&f, &omega, &exponents)?;
    Ok(Artifacts {
        csv: f.to_csv(),
        json: serde_json::to_value(RatioOutput {
            exponents,
            field: section.field,
            density: section.density,
            report,
        })?,
        summary: format!(
            "ratio = {} (deficit {}, |omega|_q {}, |df|_p {})\n",
            report.ratio, report.deficit, report.omega_q_norm, report.grad_p_norm
        ),
        passed: true,
    })
}

fn run_lemma1(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let exponents = cfg.exponent_config()?;
    let grid = cfg.build_grid()?;
    let section = &cfg.lemma1;
    let uniform = Density::uniform(grid.clone())?;
    let x = ScalarField::from_fn(grid.clone(), |x| x[0])?;
    let reference = lemma1_check(&x, &uniform, &exponents)?;

    let mut csv = String::from("case,lhs,rhs_core,implied_c\n");
    let _ = writeln!(
        csv,
        "reference,{},{},{}",
        reference.lhs, reference.rhs_core, reference.implied_c
    );
    let mut samples = Vec::with_capacity(section.samples);
    for i in 0..section.samples as u64 {
        let base = cfg.seed.wrapping_add(2 * i);
        let f = trig_field(&grid, section.max_freq, base)?;
        let omega = random_density(&grid, section.max_freq, base.wrapping_add(1))?;
        let report = lemma1_check(&f, &omega, &exponents)?;
        let _ = writeln!(
            csv,
            "random_{i},{},{},{}",
            report.lhs, report.rhs_core, report.implied_c
        );
        samples.push(report);
    }
    let all_finite = samples.iter().all(|r| r.implied_c.is_finite());
    let max_implied_c = samples.iter().map(|r| r.implied_c).fold(0.0, f64::max);
    Ok(Artifacts {
        csv,
        json: json!({
            "exponents": exponents,
            "reference": reference,
            "samples": samples.len(),
            "all_finite": all_finite,
            "max_implied_c": max_implied_c,
        }),
        summary: format!(
            "reference implied_c = {}; max over {} random pairs = {max_implied_c}\n",
            reference.implied_c,
            samples.len()
        ),
        passed: all_finite,
    })
}

fn run_young(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let grid = cfg.build_grid()?;
    let section = &cfg.young;
    let q = match (section.q, cfg.exponents) {
        (Some(q), _) => q,
        (None, Some(e)) => e.q,
        (None, None) => {
            return Err(LabError::Config(
                "young needs [young].q or an [exponents] section".into(),
            ))
        }
    };
    let s = young_exponent(grid.dim(), q)?;
    let spec = match section.d {
        Some(d) => RieszKernelSpec::new(grid.dim(), d)?,
        None => RieszKernelSpec::for_grid(&grid)?,
    };
    let mut cases = vec![
        ("uniform".to_string(), Density::uniform(grid.clone())?),
        (
            "point_mass".to_string(),
            Density::point_mass(grid.clone(), midpoint_node(&grid))?,
        ),
    ];
    for i in 0..section.densities as u64 {
        cases.push((
            format!("random_{i}"),
            random_density(&grid, section.max_freq, cfg.seed.wrapping_add(i))?,
        ));
    }
    let mut csv = String::from("case,lhs,kernel_norm,rhs,slack\n");
    let mut reports = Vec::with_capacity(cases.len());
    for (name, omega) in &cases {
        let report = young_check(omega, q, &spec)?;
        let _ = writeln!(
            csv,
            "{name},{},{},{},{}",
            report.lhs, report.kernel_norm, report.rhs, report.slack
        );
        reports.push(report);
    }
    let max_slack = reports.iter().map(|r| r.slack).fold(0.0, f64::max);
    Ok(Artifacts {
        csv,
        json: json!({
            "n": grid.dim(),
            "q": q,
            "d": spec.d,
            "young_exponent": s,
            "max_slack": max_slack,
            "reports": reports,
        }),
        summary: format!("max slack over {} densities = {max_slack}\n", reports.len()),
        passed: true,
    })
}

fn rel_defect(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn run_coarea(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let target = cfg.build_grid()?;
    let section = &cfg.coarea;
    if section.wraps.is_empty() {
        return Err(LabError::Config("coarea needs [coarea].wraps".into()));
    }
    let spec = CoveringMapSpec::over(&target, &section.wraps)?;
    let q = cfg.exponents.map_or(2.0, |e| e.q);
    let scaling = lq_scaling(&spec, q);
    let mut csv =
        String::from("trial,coarea_lhs,coarea_rhs,mean_source,mean_target,lq_source,lq_target\n");
    let (mut worst_coarea, mut worst_mean, mut worst_lq) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..section.fields as u64 {
        let base = cfg.seed.wrapping_add(3 * i);
        // exp keeps the integrand positive, so both sides are far from zero.
        let h = random_field(spec.source(), section.max_freq, base)?.map(f64::exp)?;
        let f = random_field(spec.target(), section.max_freq, base.wrapping_add(1))?;
        let omega = random_density(spec.target(), section.max_freq, base.wrapping_add(2))?;
        let (c_lhs, c_rhs) = coarea_check(&h, &spec)?;
        let (m_src, m_tgt) = pullback_mean_check(&f, &omega, &spec)?;
        let (l_src, l_tgt) = pullback_lq_check(&omega, q, &spec)?;
        worst_coarea = worst_coarea.max(rel_defect(c_lhs, c_rhs));
        worst_mean = worst_mean.max(rel_defect(m_src, m_tgt));
        worst_lq = worst_lq.max(rel_defect(l_src, scaling * l_tgt));
        let _ = writeln!(csv, "{i},{c_lhs},{c_rhs},{m_src},{m_tgt},{l_src},{l_tgt}");
    }
    Ok(Artifacts {
        csv,
        json: json!({
            "wraps": section.wraps,
            "sheets": spec.sheets(),
            "q": q,
            "lq_scaling": scaling,
            "fields": section.fields,
            "max_rel_defect_coarea": worst_coarea,
            "max_rel_defect_mean": worst_mean,
            "max_rel_defect_lq": worst_lq,
        }),
        summary: format!(
            "max relative defects: coarea {worst_coarea:e}, mean {worst_mean:e}, lq {worst_lq:e}\n"
        ),
        passed: true,
    })
}

fn random_torus_points(lengths: &[f64], count: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..count)
        .flat_map(|_| {
            lengths
                .iter()
                .map(|l| l * rng.random::<f64>())
                .collect::<Vec<_>>()
        })
        .collect();
    PointCloud::new(
        lengths.len(),
        coords,
        Metric::Torus {
            lengths: lengths.to_vec(),
        },
    )
}

fn run_cover(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let section = &cfg.cover;
    let points = match &section.points {
        Some(path) => {
            let path = cfg.resolve(path);
            if !path.exists() {
                return Err(LabError::Config(format!(
                    "point cloud {} does not exist",
                    path.display()
                )));
            }
            PointCloud::read_csv(path)?
        }
        None => {
            let grid = cfg.build_grid()?;
            random_torus_points(grid.lengths(), section.random_points, cfg.seed)?
        }
    };
    let cover = ball_cover(&points, section.radius)?;
    cover.validate()?;
    let graph = incidence_graph(&cover);
    let tree = spanning_tree(&graph)?;
    let mut csv = String::from("ball,center,members\n");
    let mut members = vec![0usize; cover.k()];
    for balls in &cover.assignment {
        for &b in balls {
            members[b] += 1;
        }
    }
    for (b, (&c, &count)) in cover.centers.iter().zip(&members).enumerate() {
        let _ = writeln!(csv, "{b},{c},{count}");
    }
    let passed = tree.is_tree() && tree.leaf_order_is_valid();
    Ok(Artifacts {
        csv,
        json: json!({
            "points": points.len(),
            "radius": section.radius,
            "centers": cover.centers,
            "incidence_edges": graph.edges,
            "k": tree.k,
            "edges": tree.edges,
            "leaf_order": tree.leaf_order,
        }),
        summary: format!(
            "{} points, K = {} balls, {} incidence edges, {} tree edges\n",
            points.len(),
            tree.k,
            graph.edges.len(),
            tree.edges.len()
        ),
        passed,
    })
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let exponents = cfg.exponent_config()?;
    let grid = cfg.build_grid()?;
    let section = &cfg.sweep;
    let records = sweep(
        &exponents,
        &grid,
        &section.eps,
        section.max_freq,
        section.budget,
        cfg.seed,
    )?;
    let fit = fit_loglog(&records, section.x_key, section.y_key)?;
    let mut summary = String::new();
    for r in &records {
        let _ = writeln!(
            summary,
            "eps {:<8} |omega|_q {:<12.6} deficit {:<12.6} ratio {:.6}",
            r.eps, r.omega_q_norm, r.best_deficit, r.best_ratio
        );
    }
    let _ = writeln!(
        summary,
        "fitted slope {} (alpha = {})",
        fit.slope, exponents.alpha
    );
    Ok(Artifacts {
        csv: sweep_csv(&records),
        json: json!({
            "x_key": section.x_key,
            "y_key": section.y_key,
            "alpha": exponents.alpha,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "max_abs_residual": fit.max_abs_residual,
        }),
        summary,
        passed: true,
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "poincare-lab",
    version,
    about = "Run a weighted Poincaré inequality experiment"
)]
struct Cli {
    /// TOML experiment config.
    config: PathBuf,
    /// Overrides the config's `command`.
    #[arg(long)]
    command: Option<String>,
    /// Overrides the config's output prefix (relative to the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(cli: &Cli) -> Result<(ExperimentConfig, String)> {
    let (mut cfg, text) = ExperimentConfig::load(&cli.config)?;
    if let Some(name) = &cli.command {
        cfg.command = name.parse()?;
    }
    if let Some(out) = &cli.out {
        cfg.out = std::path::absolute(out)?;
    }
    Ok((cfg, text))
}

/// Parses `args` (including the program name), runs, reports, and returns the exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors; that code is reserved for hypothesis violations.
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = load(&cli).and_then(|(cfg, text)| run(&cfg, &text));
    match &result {
        Ok(summary) => {
            print!("{}", summary.artifacts.summary);
            println!(
                "wrote {}, {}, {} ({:.2} s, {} threads)",
                summary.csv_path.display(),
                summary.json_path.display(),
                summary.manifest_path.display(),
                summary.wall_time,
                summary.threads
            );
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}
