//! Side-by-side comparison of published values with computed ones.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channels::example2_channel;
use crate::error::{Error, Result};
use crate::fidelity::{metric_c, super_fidelity, uhlmann_fidelity};
use crate::fixtures::{example1_pair, example2_pair};
use crate::metrics::{g_metric, g_metric_bound, pg_metric};

use super::config::RunConfig;
use super::format::sig12;
use super::properties::find;
use super::run_property;
use super::verdict::PropertyVerdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExampleId {
    Ex1,
    Ex2,
    QubitPg,
    QubitG,
    PureMax,
    GBound,
}

impl ExampleId {
    pub const ALL: [ExampleId; 6] = [
        ExampleId::Ex1,
        ExampleId::Ex2,
        ExampleId::QubitPg,
        ExampleId::QubitG,
        ExampleId::PureMax,
        ExampleId::GBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
            ExampleId::QubitPg => "qubit-pg",
            ExampleId::QubitG => "qubit-g",
            ExampleId::PureMax => "pure-max",
            ExampleId::GBound => "g-bound",
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `computed = claimed`
    Equal,
    /// `computed ≤ claimed`
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub quantity: String,
    pub relation: Relation,
    pub claimed: f64,
    pub computed: f64,
    /// `|computed − claimed|` for equalities, `max(0, computed − claimed)`
    /// for upper bounds.
    pub deviation: f64,
    pub tolerance: f64,
}

impl Row {
    fn new(quantity: &str, relation: Relation, claimed: f64, computed: f64, tolerance: f64) -> Self {
        let deviation = match relation {
            Relation::Equal => (computed - claimed).abs(),
            Relation::AtMost => (computed - claimed).max(0.0),
        };
        Self {
            quantity: quantity.to_string(),
            relation,
            claimed,
            computed,
            deviation,
            tolerance,
        }
    }

    pub fn holds(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reproduction {
    pub id: ExampleId,
    pub rows: Vec<Row>,
}

impl Reproduction {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(Row::holds)
    }
}

impl fmt::Display for Reproduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let rel = match row.relation {
                Relation::Equal => "=",
                Relation::AtMost => "<=",
            };
            writeln!(
                f,
                "{}: {}  claimed {} {}  computed {}  deviation {}  tolerance {}  {}",
                self.id,
                row.quantity,
                rel,
                sig12(row.claimed),
                sig12(row.computed),
                sig12(row.deviation),
                sig12(row.tolerance),
                if row.holds() { "ok" } else { "MISMATCH" },
            )?;
        }
        Ok(())
    }
}

/// Largest violation recorded by a check of a property verdict, i.e. the
/// negated worst slack.
fn largest(verdict: &PropertyVerdict, check: &str) -> Result<f64> {
    if let Some(err) = verdict.details.get("error") {
        return Err(Error::Format(format!("{}: {err}", verdict.property_id)));
    }
    verdict.details["checks"][check]["worst_margin"]
        .as_f64()
        .map(|w| -w)
        .ok_or_else(|| Error::Format(format!("{} has no check {check}", verdict.property_id)))
}

fn property(id: &str, config: &RunConfig) -> PropertyVerdict {
    run_property(find(id).expect("registered property"), config)
}

pub fn reproduce(id: ExampleId, config: &RunConfig) -> Result<Reproduction> {
    use Relation::{AtMost, Equal};
    let rows = match id {
        ExampleId::Ex1 => {
            let (rho, sigma) = example1_pair();
            let g = g_metric(&rho, &sigma, &config.optimizer)?.value;
            let bound = g_metric_bound(&rho, &sigma)?;
            let claimed_bound = 0.375f64.sqrt();
            vec![
                Row::new("D_G", Equal, 0.5, g, 1e-6),
                Row::new("D_PG", Equal, 0.5, pg_metric(&rho, &sigma)?.value, 1e-9),
                Row::new("F", Equal, 0.75, uhlmann_fidelity(&rho, &sigma)?, 1e-9),
                Row::new("bound", Equal, claimed_bound, bound, 1e-12),
                Row::new("bound - D_G", Equal, claimed_bound - 0.5, bound - g, 1e-6),
            ]
        }
        ExampleId::Ex2 => {
            let (rho, sigma) = example2_pair();
            let phi = example2_channel();
            let (out_rho, out_sigma) = (phi.apply(&rho)?, phi.apply(&sigma)?);
            vec![
                Row::new("G before", Equal, 0.5, super_fidelity(&rho, &sigma)?, 1e-12),
                Row::new("G after", Equal, 0.0, super_fidelity(&out_rho, &out_sigma)?, 1e-12),
                Row::new("C before", Equal, 0.5f64.sqrt(), metric_c(&rho, &sigma)?, 1e-12),
                Row::new("C after", Equal, 1.0, metric_c(&out_rho, &out_sigma)?, 1e-12),
            ]
        }
        ExampleId::QubitPg => {
            let v = property("metrics.qubit.Dpg.eq.Dtr", config);
            let q = format!("max |D_PG - D_tr| over {} qubit pairs", v.samples);
            vec![Row::new(&q, Equal, 0.0, largest(&v, "Dpg_eq_Dtr")?, 1e-9)]
        }
        ExampleId::QubitG => {
            let v = property("metrics.qubit.Dg.eq.C", config);
            let q = format!("max |D_G - sqrt(1 - G)| over {} qubit pairs", v.samples);
            vec![Row::new(&q, Equal, 0.0, largest(&v, "Dg_eq_C")?, 1e-6)]
        }
        ExampleId::PureMax => {
            let v = property("metrics.pg.pure_state_maximum", config);
            vec![
                Row::new(
                    &format!("max |D_PG - spectral norm| over {} pairs", v.samples),
                    Equal,
                    0.0,
                    largest(&v, "equals_spectral_norm")?,
                    0.0,
                ),
                Row::new(
                    "max (sampled pure-state maximum - D_PG)",
                    AtMost,
                    0.0,
                    largest(&v, "sampled_not_above")?,
                    1e-9,
                ),
            ]
        }
        ExampleId::GBound => {
            let v = property("metrics.ordering_chain", config);
            vec![
                Row::new(
                    &format!("max (D_G - bound) over {} pairs", v.samples),
                    AtMost,
                    0.0,
                    largest(&v, "g_le_bound")?,
                    1e-9,
                ),
                Row::new(
                    "max |D_G - bound| over qubit pairs",
                    Equal,
                    0.0,
                    largest(&v, "qubit_bound_equality")?,
                    1e-6,
                ),
            ]
        }
    };
    Ok(Reproduction { id, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ids() {
        for id in ExampleId::ALL {
            assert_eq!(id.name().parse::<ExampleId>().unwrap(), id);
        }
        assert!(matches!("ex3".parse::<ExampleId>(), Err(Error::UnknownExample(_))));
    }

    #[test]
    fn worked_examples_reproduce() {
        let config = RunConfig::default();
        let ex1 = reproduce(ExampleId::Ex1, &config).unwrap();
        assert!(ex1.holds(), "{ex1}");
        assert!(ex1.rows[4].computed >= 0.11);
        let ex2 = reproduce(ExampleId::Ex2, &config).unwrap();
        assert!(ex2.holds(), "{ex2}");
        assert!(ex2.to_string().contains("G after"));
    }

    #[test]
    fn sampled_claims_reproduce_on_small_budget() {
        let config = RunConfig {
            samples_per_property: Some(10),
            ..RunConfig::default()
        };
        for id in [ExampleId::QubitPg, ExampleId::QubitG, ExampleId::PureMax, ExampleId::GBound] {
            let r = reproduce(id, &config).unwrap();
            assert!(r.holds(), "{r}");
        }
    }
}
