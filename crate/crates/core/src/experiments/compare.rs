//! ParSched against XtalkSched on a set of benchmarks.

use rayon::prelude::*;
use serde::Serialize;

use super::{compact, map_to_device, Benchmark, ExperimentError};
use crate::device::{CrosstalkMap, DeviceModel};
use crate::schedule::{par_sched, schedule_cost, xtalk_sched, ScheduleCost, ScheduledCircuit};
use crate::sim::{run_scheduled, NoiseBinding};

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub omega: f64,
    pub threshold: f64,
    /// Ratios the scheduler believes in. `None` uses the device's own map;
    /// the simulation always uses the device's map.
    pub scheduler_crosstalk: Option<CrosstalkMap>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            omega: 0.5,
            threshold: 2.0,
            scheduler_crosstalk: None,
        }
    }
}

impl CompareOptions {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(ExperimentError::Input(format!(
                "omega = {} is outside [0, 1]",
                self.omega
            )));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(ExperimentError::Input(format!(
                "threshold = {} must be positive",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub benchmark: String,
    pub metric: String,
    pub fidelity_par: f64,
    pub fidelity_xtalk: f64,
    pub depth_par: u64,
    pub depth_xtalk: u64,
    pub makespan_par_ns: u64,
    pub makespan_xtalk_ns: u64,
    pub omega: f64,
    pub threshold: f64,
    pub cost_par: ScheduleCost,
    pub cost_xtalk: ScheduleCost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub mean_fidelity_par: f64,
    pub mean_fidelity_xtalk: f64,
    pub mean_depth_par: f64,
    pub mean_depth_xtalk: f64,
}

impl ComparisonSummary {
    pub fn of(records: &[ComparisonRecord]) -> Option<Self> {
        if records.is_empty() {
            return None;
        }
        let mean = |f: &dyn Fn(&ComparisonRecord) -> f64| records.iter().map(f).sum::<f64>() / records.len() as f64;
        Some(ComparisonSummary {
            mean_fidelity_par: mean(&|r| r.fidelity_par),
            mean_fidelity_xtalk: mean(&|r| r.fidelity_xtalk),
            mean_depth_par: mean(&|r| r.depth_par as f64),
            mean_depth_xtalk: mean(&|r| r.depth_xtalk as f64),
        })
    }
}

fn compare_one(b: &Benchmark, d: &DeviceModel, opts: &CompareOptions) -> Result<ComparisonRecord, ExperimentError> {
    let mapped = map_to_device(&b.circuit, d, &b.name)?;
    let (small, qubits) = compact(&mapped)?;
    let sub = d.restrict(&qubits)?;
    let believed = match &opts.scheduler_crosstalk {
        Some(map) => d.with_crosstalk(map.clone()).restrict(&qubits)?,
        None => sub.clone(),
    };
    let par = par_sched(&small, &sub)?;
    let xtalk = xtalk_sched(&small, &believed, opts.omega, opts.threshold)?;
    let metric = b.metric();
    let fidelity = |sc: &ScheduledCircuit| -> Result<f64, ExperimentError> {
        Ok(metric.score(&run_scheduled(sc, &NoiseBinding::analytic(&sub))?))
    };
    Ok(ComparisonRecord {
        benchmark: b.name.clone(),
        metric: metric.name().to_string(),
        fidelity_par: fidelity(&par)?,
        fidelity_xtalk: fidelity(&xtalk)?,
        depth_par: par.gate_depth(),
        depth_xtalk: xtalk.gate_depth(),
        makespan_par_ns: par.makespan(),
        makespan_xtalk_ns: xtalk.makespan(),
        omega: opts.omega,
        threshold: opts.threshold,
        cost_par: schedule_cost(&par, &sub, opts.omega),
        cost_xtalk: schedule_cost(&xtalk, &sub, opts.omega),
    })
}

/// Schedules every benchmark both ways and scores the noisy outputs. Records
/// keep the order of `benchmarks`.
pub fn run_compare(
    d: &DeviceModel,
    benchmarks: &[Benchmark],
    opts: &CompareOptions,
) -> Result<Vec<ComparisonRecord>, ExperimentError> {
    opts.validate()?;
    if benchmarks.is_empty() {
        return Err(ExperimentError::Input("no benchmarks given".into()));
    }
    benchmarks.par_iter().map(|b| compare_one(b, d, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{bundled_device, bundled_suite};

    #[test]
    fn crosstalk_free_device_gives_equal_columns() {
        let d = bundled_device("casablanca-like").unwrap().without_crosstalk();
        for r in run_compare(&d, &bundled_suite(), &CompareOptions::default()).unwrap() {
            assert!((r.fidelity_par - r.fidelity_xtalk).abs() < 1e-9, "{r:?}");
            assert_eq!((r.depth_par, r.makespan_par_ns), (r.depth_xtalk, r.makespan_xtalk_ns));
        }
    }

    #[test]
    fn xtalk_never_worse_on_bundled_model() {
        let d = bundled_device("casablanca-like").unwrap();
        let records = run_compare(&d, &bundled_suite(), &CompareOptions::default()).unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            assert!(r.depth_xtalk >= r.depth_par);
            assert!(r.fidelity_xtalk >= r.fidelity_par - 1e-9, "{r:?}");
            assert!(r.cost_xtalk.total <= r.cost_par.total + 1e-12);
            assert!((0.0..=1.0).contains(&r.fidelity_par) && (0.0..=1.0).contains(&r.fidelity_xtalk));
        }
        let s = ComparisonSummary::of(&records).unwrap();
        assert!(s.mean_fidelity_xtalk > s.mean_fidelity_par);
        assert!(s.mean_depth_xtalk > s.mean_depth_par);
    }

    #[test]
    fn option_validation() {
        let d = bundled_device("casablanca-like").unwrap();
        let bad = CompareOptions {
            omega: 1.5,
            ..CompareOptions::default()
        };
        assert!(run_compare(&d, &bundled_suite(), &bad).is_err());
        let bad = CompareOptions {
            threshold: 0.0,
            ..CompareOptions::default()
        };
        assert!(run_compare(&d, &bundled_suite(), &bad).is_err());
        assert!(run_compare(&d, &[], &CompareOptions::default()).is_err());
    }
}
