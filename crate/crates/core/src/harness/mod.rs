//! Verification driver: runs the registered properties, reproduces the
//! worked examples and writes reports.

pub mod config;
pub mod format;
pub mod properties;
pub mod reproduce;
pub mod verdict;

use std::path::Path;

use rayon::prelude::*;

use crate::error::Result;
use crate::io::write_atomic;
use crate::random::{derive_seed, rng_from_seed};

pub use config::{parse_seed, RunConfig, DEFAULT_SEED, SEED_ENV};
pub use properties::{PropertyInfo, REGISTRY};
pub use reproduce::{reproduce, ExampleId, Reproduction};
pub use verdict::{Kind, PropertyVerdict, Report, Status, Summary, Tally};

/// Runs one property under `config`. Evaluation errors become a `Fail`
/// verdict (or a `ReportOnly` verdict carrying the error).
pub fn run_property(info: &PropertyInfo, config: &RunConfig) -> PropertyVerdict {
    let dims = match (&config.dims, info.fixed_dims) {
        (Some(dims), false) => dims.clone(),
        _ => info.dims.to_vec(),
    };
    let mut ctx = properties::Ctx {
        rng: rng_from_seed(derive_seed(config.seed, info.id)),
        samples: config.samples_per_property.unwrap_or(info.samples),
        per_dim: info.per_dim,
        dims,
        optimizer: &config.optimizer,
        master_seed: config.seed,
        tally: Tally::default(),
    };
    let error = (info.run)(&mut ctx).err().map(|e| e.to_string());
    ctx.tally.finish(info.id, info.kind, error)
}

/// Runs every registered property in parallel; verdicts keep registry order.
pub fn run_suite(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let verdicts = REGISTRY
        .par_iter()
        .map(|info| run_property(info, config))
        .collect();
    Ok(Report::new(config.seed, verdicts))
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("plain data serializes")
}

/// Writes the report through a temporary file and a rename.
pub fn write_report(path: impl AsRef<Path>, report: &Report) -> Result<()> {
    write_atomic(path, report_json(report).as_bytes())
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            samples_per_property: Some(3),
            ..RunConfig::default()
        }
    }

    #[test]
    fn ids_are_unique() {
        let ids: HashSet<_> = REGISTRY.iter().map(|p| p.id).collect();
        assert_eq!(ids.len(), REGISTRY.len());
        assert!(ids.contains("example2.G.expansivity.violation"));
    }

    #[test]
    fn small_budget_suite_passes() {
        let report = run_suite(&small()).unwrap();
        assert!(report.passed(), "{}", report_json(&report));
        for v in &report.verdicts {
            if v.status == Status::Pass {
                assert!(v.worst_margin >= -v.tolerance, "{}", v.property_id);
            }
            assert!(v.samples >= 1, "{}", v.property_id);
        }
        let ex2 = report.verdict("example2.G.expansivity.violation").unwrap();
        assert_eq!(ex2.status, Status::Pass);
    }

    #[test]
    fn property_seeds_are_independent_of_order() {
        let config = small();
        let info = properties::find("metrics.qubit.Dg.eq.C").unwrap();
        let alone = run_property(info, &config);
        let report = run_suite(&config).unwrap();
        assert_eq!(report.verdict(info.id).unwrap(), &alone);
    }

    #[test]
    fn dimension_override_skips_fixed_properties() {
        let config = RunConfig {
            dims: Some(vec![3]),
            samples_per_property: Some(2),
            ..RunConfig::default()
        };
        let v = run_property(properties::find("metrics.qubit.Dpg.eq.Dtr").unwrap(), &config);
        assert_eq!(v.status, Status::Pass);
        let v = run_property(properties::find("states.bloch.round_trip").unwrap(), &config);
        assert_eq!(v.samples, 2);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let config = RunConfig {
            samples_per_property: Some(0),
            ..RunConfig::default()
        };
        assert!(matches!(run_suite(&config), Err(crate::Error::BadConfig(_))));
    }
}
