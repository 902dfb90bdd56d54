//! The replicated experiment driver: one row per (n, replication), bound and
//! integration columns, per-size summaries with bound-coverage fractions,
//! and the log-log convergence fit.
//!
//! Replications fan out across threads; every replication's stream is keyed
//! by (seed, sampler id, n, replication), and rows are sorted before writing,
//! so the CSV is byte-identical regardless of parallelism.

use crate::config::{ExperimentConfig, IntegrandConfig};
use crate::{CliError, CliResult};
use hsfc::discrepancy::{self, replication_state, ConvexRegion};
use hsfc::integrate::{self, Integrand, RegionIntegrand};
use hsfc::rng::RngState;
use hsfc::sampler::GeneratorSpec;
use hsfc::stats;
use rayon::prelude::*;
use std::fmt::Write as _;

pub const CSV_SCHEMA_LINE: &str = "# schema=1";
pub const CSV_HEADER: &str =
    "sampler,d,n,replication,seed_label,dstar,bound_hsfc,bound_mc_gnewuch,integ_error,kh_margin";

/// One replication's results.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub sampler: String,
    pub d: u32,
    pub n: u64,
    pub replication: u32,
    pub seed_label: u64,
    pub dstar: f64,
    pub bound_hsfc: f64,
    pub bound_mc_gnewuch: f64,
    pub integ_error: Option<f64>,
    pub kh_margin: Option<f64>,
}

impl ExperimentRow {
    fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.sampler,
            self.d,
            self.n,
            self.replication,
            self.seed_label,
            self.dstar,
            self.bound_hsfc,
            self.bound_mc_gnewuch,
            opt(self.integ_error),
            opt(self.kh_margin),
        )
    }
}

/// Per-sample-size aggregate.
#[derive(Clone, Debug)]
pub struct SizeSummary {
    pub n: u64,
    pub mean: f64,
    pub std: f64,
    pub ci95: (f64, f64),
    /// For each q in the config: fraction of replications with
    /// `D* <= hsfc_bound(d, q, n)`.
    pub coverage: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct ExperimentSummary {
    pub sampler: String,
    pub d: u32,
    pub seed: u64,
    pub per_n: Vec<SizeSummary>,
    pub fit: Option<ConvergenceFit>,
}

impl std::fmt::Display for ExperimentSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "# summary sampler={} d={} seed={}", self.sampler, self.d, self.seed)?;
        for s in &self.per_n {
            let mut line = format!(
                "n={} mean_dstar={:.6} std={:.6} ci95=[{:.6},{:.6}]",
                s.n, s.mean, s.std, s.ci95.0, s.ci95.1
            );
            for (q, frac) in &s.coverage {
                let _ = write!(line, " coverage[q={q}]={frac:.3}");
            }
            writeln!(f, "{line}")?;
        }
        if let Some(fit) = &self.fit {
            writeln!(
                f,
                "fit slope={:.4} stderr={:.4} intercept={:.4}",
                fit.slope, fit.slope_stderr, fit.intercept
            )?;
        }
        Ok(())
    }
}

/// Least-squares fit of `log(mean D*)` on `log N`.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// OLS of log mean discrepancy on log n over the rows' distinct sizes.
/// Requires at least 3 distinct sizes.
pub fn fit_convergence(rows: &[ExperimentRow]) -> CliResult<ConvergenceFit> {
    let mut by_n: std::collections::BTreeMap<u64, Vec<f64>> = Default::default();
    for row in rows {
        by_n.entry(row.n).or_default().push(row.dstar);
    }
    if by_n.len() < 3 {
        return Err(CliError::Config(format!(
            "convergence fit needs >= 3 distinct n values, got {}",
            by_n.len()
        )));
    }
    let mut xs = Vec::with_capacity(by_n.len());
    let mut ys = Vec::with_capacity(by_n.len());
    for (n, values) in &by_n {
        let (mean, _) = stats::mean_std(values);
        if mean <= 0.0 {
            return Err(CliError::Config("convergence fit needs positive means".into()));
        }
        xs.push((*n as f64).ln());
        ys.push(mean.ln());
    }
    let fit = stats::ols(&xs, &ys);
    Ok(ConvergenceFit { slope: fit.slope, intercept: fit.intercept, slope_stderr: fit.slope_stderr })
}

enum RowIntegrand {
    Plain(Integrand),
    Restricted(RegionIntegrand),
}

fn resolve_integrand(cfg: &ExperimentConfig) -> CliResult<Option<RowIntegrand>> {
    let Some(ic) = &cfg.integrand else { return Ok(None) };
    let d = cfg.d;
    Ok(Some(match ic {
        IntegrandConfig::ProductPoly => RowIntegrand::Plain(Integrand::ProductPoly { d }),
        IntegrandConfig::IndicatorBox { corner } => {
            RowIntegrand::Plain(Integrand::IndicatorBox { corner: corner.clone() })
        }
        IntegrandConfig::SimplexF { eps } => {
            let region = ConvexRegion::simplex_eps(d, *eps).map_err(CliError::from)?;
            RowIntegrand::Restricted(
                RegionIntegrand::new(Integrand::SimplexF { d, eps: *eps }, region)
                    .map_err(CliError::from)?,
            )
        }
    }))
}

fn run_one(
    cfg: &ExperimentConfig,
    spec: &GeneratorSpec,
    master: &RngState,
    rep: u32,
    integrand: &Option<RowIntegrand>,
) -> CliResult<ExperimentRow> {
    let state = replication_state(master, spec, rep);
    let set = spec.generate(&state)?;
    let est = discrepancy::star_discrepancy(set.points(), cfg.method)?;
    let n = spec.n();
    let q0 = cfg.q_values.first().copied().unwrap_or(0.9);
    let (integ_error, kh_margin) = match integrand {
        None => (None, None),
        Some(RowIntegrand::Plain(f)) => {
            let chk = integrate::kh_check(f, set.points(), &est)?;
            (Some(chk.error), Some(chk.margin))
        }
        Some(RowIntegrand::Restricted(rf)) => {
            let out = integrate::restricted_integrate(rf, set.points(), cfg.method)?;
            (Some(out.error), Some(out.kh_variant_bound - out.error))
        }
    };
    Ok(ExperimentRow {
        sampler: cfg.sampler.name().to_string(),
        d: cfg.d,
        n,
        replication: rep,
        seed_label: state.key(),
        dstar: est.value,
        bound_hsfc: hsfc::bounds::hsfc_bound(cfg.d, q0, n)?,
        bound_mc_gnewuch: hsfc::bounds::mc_bound_gnewuch(cfg.d, q0, n)?,
        integ_error,
        kh_margin,
    })
}

/// Run the experiment: every (n, replication) pair, in parallel, rows sorted
/// by (sampler, n, replication).
pub fn run(cfg: &ExperimentConfig) -> CliResult<(Vec<ExperimentRow>, ExperimentSummary)> {
    cfg.validate()?;
    let master = RngState::new(cfg.seed);
    let integrand = resolve_integrand(cfg)?;

    let mut jobs: Vec<(GeneratorSpec, u32)> = Vec::new();
    for &n in &cfg.n_values {
        let spec = cfg.sampler.instantiate(cfg.d, n)?;
        for rep in 0..cfg.replications {
            jobs.push((spec.clone(), rep));
        }
    }

    let mut rows = jobs
        .par_iter()
        .map(|(spec, rep)| run_one(cfg, spec, &master, *rep, &integrand))
        .collect::<CliResult<Vec<ExperimentRow>>>()?;
    rows.sort_by(|a, b| {
        (&a.sampler, a.n, a.replication).cmp(&(&b.sampler, b.n, b.replication))
    });

    let summary = summarize(cfg, &rows)?;
    Ok((rows, summary))
}

fn summarize(cfg: &ExperimentConfig, rows: &[ExperimentRow]) -> CliResult<ExperimentSummary> {
    let mut per_n = Vec::new();
    let mut sizes: Vec<u64> = cfg.n_values.clone();
    sizes.sort_unstable();
    sizes.dedup();
    for n in sizes {
        let values: Vec<f64> =
            rows.iter().filter(|r| r.n == n).map(|r| r.dstar).collect();
        let (mean, std) = stats::mean_std(&values);
        let ci95 = stats::ci95(mean, std, values.len());
        let mut coverage = Vec::new();
        for &q in &cfg.q_values {
            let bound = hsfc::bounds::hsfc_bound(cfg.d, q, n)?;
            let frac =
                values.iter().filter(|&&v| v <= bound).count() as f64 / values.len() as f64;
            coverage.push((q, frac));
        }
        per_n.push(SizeSummary { n, mean, std, ci95, coverage });
    }
    let fit = if per_n.len() >= 3 { Some(fit_convergence(rows)?) } else { None };
    Ok(ExperimentSummary {
        sampler: cfg.sampler.name().to_string(),
        d: cfg.d,
        seed: cfg.seed,
        per_n,
        fit,
    })
}

/// Render rows as the versioned CSV.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_LINE);
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}
