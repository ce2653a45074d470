use std::path::{Path, PathBuf};

use clap::Args;
use dwork_core::arith;
use dwork_core::hyperg::FamilyTag;
use dwork_core::suites::SuiteParams;
use serde::Deserialize;

/// Flags shared by every suite. Unset flags fall back to the config file,
/// then to the built-in defaults.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Comma-separated odd primes.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// Largest precision exponent s.
    #[arg(long = "s-max")]
    pub s_max: Option<u32>,
    /// Comma-separated family tags (half, third-q, third-r, fifth-41, fifth-32).
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<FamilyTag>>,
    /// Cap on sample points, random instances and digit tuples per prime.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized instances.
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with any of the keys above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    primes: Option<Vec<u64>>,
    s_max: Option<u32>,
    families: Option<Vec<String>>,
    samples: Option<usize>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

/// Everything a run needs after merging flags, file and defaults.
#[derive(Debug)]
pub struct Resolved {
    pub params: SuiteParams,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

pub fn resolve(flags: Flags) -> Result<Resolved, String> {
    let file = match &flags.config {
        Some(path) => load(path)?,
        None => FileConfig::default(),
    };
    let defaults = SuiteParams::default();
    let file_families = file
        .families
        .map(|v| v.iter().map(|s| s.parse::<FamilyTag>()).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    let params = SuiteParams {
        primes: flags.primes.or(file.primes).unwrap_or(defaults.primes),
        s_max: flags.s_max.or(file.s_max).unwrap_or(defaults.s_max),
        families: flags.families.or(file_families).unwrap_or(defaults.families),
        samples: flags.samples.or(file.samples).unwrap_or(defaults.samples),
        seed: flags.seed.or(file.seed).unwrap_or(defaults.seed),
        cache_dir: std::env::var_os("VERIFY_CACHE_DIR").map(PathBuf::from),
    };
    validate(&params)?;
    let jobs = flags.jobs.or(file.jobs);
    if jobs == Some(0) {
        return Err("--jobs must be at least 1".into());
    }
    Ok(Resolved { params, jobs, out: flags.out.or(file.out) })
}

fn validate(params: &SuiteParams) -> Result<(), String> {
    if params.primes.is_empty() {
        return Err("at least one prime is required".into());
    }
    if let Some(p) = params.primes.iter().find(|&&p| p < 3 || !arith::is_prime(p)) {
        return Err(format!("{p} is not an odd prime"));
    }
    if params.s_max == 0 {
        return Err("--s-max must be at least 1".into());
    }
    Ok(())
}
