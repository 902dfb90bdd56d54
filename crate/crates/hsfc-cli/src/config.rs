//! Experiment configuration: a JSON file with all numeric fields explicit.
//! There is no default seed — ambient randomness is a bug, not a feature.

use crate::{CliError, CliResult};
use hsfc::sampler::{GeneratorSpec, HsfcMode};
use serde::{Deserialize, Serialize};

/// Sampler family plus its fixed parameters; the sample size is supplied per
/// run from the config's `n_values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerTemplate {
    Hsfc {
        #[serde(default)]
        mode: HsfcMode,
    },
    Mc,
    Jittered,
    Lhs,
    Theta {
        theta: f64,
    },
}

impl SamplerTemplate {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerTemplate::Hsfc { .. } => "hsfc",
            SamplerTemplate::Mc => "mc",
            SamplerTemplate::Jittered => "jittered",
            SamplerTemplate::Lhs => "lhs",
            SamplerTemplate::Theta { .. } => "theta",
        }
    }

    /// Resolve the template at dimension `d` and sample size `n`, refusing
    /// sizes the family cannot realize (with the valid sizes named).
    pub fn instantiate(&self, d: u32, n: u64) -> CliResult<GeneratorSpec> {
        if d == 0 {
            return Err(CliError::Config("d must be >= 1".into()));
        }
        if n == 0 {
            return Err(CliError::Config("n must be >= 1".into()));
        }
        match self {
            SamplerTemplate::Hsfc { mode } => {
                let m = exact_log(n, 1u64 << d).ok_or_else(|| {
                    CliError::Config(format!(
                        "hsfc at d={d} needs n = 2^(d*m); valid: {}",
                        valid_sizes(|m| (1u64 << d).checked_pow(m))
                    ))
                })?;
                Ok(GeneratorSpec::Hsfc { d, m, mode: *mode })
            }
            SamplerTemplate::Mc => Ok(GeneratorSpec::Mc { d, n }),
            SamplerTemplate::Jittered => {
                let m = exact_root(n, d).ok_or_else(|| {
                    CliError::Config(format!(
                        "jittered at d={d} needs n = m^d; valid: {}",
                        valid_sizes(|m| (m as u64 + 1).checked_pow(d))
                    ))
                })?;
                Ok(GeneratorSpec::Jittered { d, m })
            }
            SamplerTemplate::Lhs => Ok(GeneratorSpec::Lhs { d, n }),
            SamplerTemplate::Theta { theta } => {
                if d != 2 {
                    return Err(CliError::Config("theta partition requires d = 2".into()));
                }
                let m = exact_root(n, 2).filter(|&m| m >= 2).ok_or_else(|| {
                    CliError::Config(format!(
                        "theta partition needs n = m^2 with m >= 2; valid: {}",
                        valid_sizes(|m| ((m as u64) + 1).checked_pow(2))
                    ))
                })?;
                Ok(GeneratorSpec::Theta { m, theta: *theta })
            }
        }
    }
}

/// `m` such that `base^m = n`, if any.
fn exact_log(n: u64, base: u64) -> Option<u32> {
    if base < 2 {
        return None;
    }
    let mut value = 1u64;
    let mut m = 0u32;
    while value < n {
        value = value.checked_mul(base)?;
        m += 1;
    }
    (value == n).then_some(m)
}

/// `m` such that `m^d = n`, if any.
fn exact_root(n: u64, d: u32) -> Option<u32> {
    let mut m = (n as f64).powf(1.0 / d as f64).round() as u64;
    m = m.max(1);
    for cand in m.saturating_sub(1)..=m + 1 {
        if cand >= 1 && cand.checked_pow(d) == Some(n) {
            return Some(cand as u32);
        }
    }
    None
}

fn valid_sizes(gen: impl Fn(u32) -> Option<u64>) -> String {
    let sizes: Vec<String> =
        (1..=6).filter_map(|m| gen(m).filter(|&n| n <= 1 << 20)).map(|n| n.to_string()).collect();
    format!("{}, ...", sizes.join(", "))
}

/// Which built-in integrand (if any) each replication evaluates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntegrandConfig {
    ProductPoly,
    IndicatorBox { corner: Vec<f64> },
    SimplexF { eps: f64 },
}

/// One experiment: a sampler swept over sample sizes with replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sampler: SamplerTemplate,
    pub d: u32,
    pub n_values: Vec<u64>,
    pub replications: u32,
    /// Master seed; mandatory.
    pub seed: u64,
    pub method: hsfc::discrepancy::DiscrepancyMethod,
    pub q_values: Vec<f64>,
    #[serde(default)]
    pub integrand: Option<IntegrandConfig>,
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(raw: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(raw).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.n_values.is_empty() {
            return Err(CliError::Config("n_values must be nonempty".into()));
        }
        if self.replications == 0 {
            return Err(CliError::Config("replications must be >= 1".into()));
        }
        if self.q_values.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return Err(CliError::Config("q_values must lie in (0,1)".into()));
        }
        if let hsfc::discrepancy::DiscrepancyMethod::Cover { delta } = self.method {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(CliError::Config(format!("cover delta {delta} outside (0,1]")));
            }
        }
        if let Some(IntegrandConfig::IndicatorBox { corner }) = &self.integrand {
            if corner.len() != self.d as usize {
                return Err(CliError::Config("indicator corner dimension mismatch".into()));
            }
            if corner.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(CliError::Config("indicator corner outside [0,1]".into()));
            }
        }
        // Every (sampler, n) pair must be instantiable up front.
        for &n in &self.n_values {
            self.sampler.instantiate(self.d, n)?;
        }
        Ok(())
    }
}
