use super::cost::{find_conflicts, schedule_cost, ConflictPair};
use super::{asap, check_schedulable, ScheduleError, ScheduledCircuit};
use crate::circuit::{build_dag, Circuit, CircuitDag};
use crate::device::DeviceModel;

/// Conflict count up to which [`SearchStrategy::Auto`] searches exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Exhaustive for at most [`EXHAUSTIVE_LIMIT`] conflicts, greedy beyond.
    #[default]
    Auto,
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XtalkOptions {
    pub omega: f64,
    pub threshold: f64,
    pub strategy: SearchStrategy,
}

impl Default for XtalkOptions {
    fn default() -> Self {
        XtalkOptions {
            omega: 0.5,
            threshold: 2.0,
            strategy: SearchStrategy::Auto,
        }
    }
}

/// Crosstalk-adaptive schedule with the default search strategy.
pub fn xtalk_sched(
    c: &Circuit,
    d: &DeviceModel,
    omega: f64,
    threshold: f64,
) -> Result<ScheduledCircuit, ScheduleError> {
    xtalk_sched_with(
        c,
        d,
        &XtalkOptions {
            omega,
            threshold,
            ..XtalkOptions::default()
        },
    )
}

struct Search<'a> {
    c: &'a Circuit,
    d: &'a DeviceModel,
    dag: CircuitDag,
    omega: f64,
    threshold: f64,
    force: bool,
}

impl Search<'_> {
    fn evaluate(&self, fences: &[(usize, usize)]) -> Option<(f64, ScheduledCircuit)> {
        let dag = self.dag.with_edges(fences)?;
        let sc = asap(self.c, self.d, &dag, fences.to_vec());
        Some((schedule_cost(&sc, self.d, self.omega).total, sc))
    }

    /// Tries every none / `a -> b` / `b -> a` choice per conflict, in
    /// lexicographic order, keeping the first strict minimum.
    fn exhaustive(&self, base: &[(usize, usize)], conflicts: &[ConflictPair]) -> Option<(f64, ScheduledCircuit)> {
        let k = conflicts.len();
        let total = 3usize.pow(k as u32);
        let mut best: Option<(f64, ScheduledCircuit)> = None;
        for code in 0..total {
            let mut fences = base.to_vec();
            let mut rest = code;
            let mut digits = vec![0usize; k];
            for slot in digits.iter_mut().rev() {
                *slot = rest % 3;
                rest /= 3;
            }
            if self.force && digits.contains(&0) {
                continue;
            }
            for (p, &choice) in conflicts.iter().zip(&digits) {
                match choice {
                    1 => fences.push((p.gate_a, p.gate_b)),
                    2 => fences.push((p.gate_b, p.gate_a)),
                    _ => {}
                }
            }
            if let Some((cost, sc)) = self.evaluate(&fences) {
                if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    best = Some((cost, sc));
                }
            }
        }
        best
    }

    /// Local search over fences. Starting from `base`, conflicts are
    /// serialized one at a time, each time adding the fence (among all
    /// conflicts of the current schedule, highest ratio first, both
    /// orientations) with the lowest resulting cost, until none remain. The cheapest state
    /// along that path is kept (the last one, when forced); then removing or
    /// flipping an added fence is tried until no move lowers the cost.
    /// Runs [`Search::descend`] once per opening fence (each orientation of
    /// each current conflict) and keeps the cheapest result.
    fn greedy(&self, base: &[(usize, usize)]) -> Option<(f64, ScheduledCircuit)> {
        let start = self.evaluate(base)?;
        let mut openings = Vec::new();
        let mut conflicts = find_conflicts(&start.1, self.d, self.threshold);
        conflicts.sort_by(|x, y| y.ratio.total_cmp(&x.ratio));
        for p in &conflicts {
            openings.push((p.gate_a, p.gate_b));
            openings.push((p.gate_b, p.gate_a));
        }
        let mut best: Option<(f64, ScheduledCircuit)> = if self.force { None } else { Some(start.clone()) };
        for f in openings {
            let mut seed = base.to_vec();
            seed.push(f);
            if let Some(r) = self.descend(base.len(), seed) {
                if best.as_ref().is_none_or(|(c, _)| r.0 < *c) {
                    best = Some(r);
                }
            }
        }
        best.or(Some(start))
    }

    /// Adds the best fence for any open conflict until none remain, keeping
    /// the cheapest point on the way, then removes or flips added fences
    /// while that lowers the cost. Fences before `fixed` are never touched.
    fn descend(&self, fixed: usize, seed: Vec<(usize, usize)>) -> Option<(f64, ScheduledCircuit)> {
        let mut path_fences = seed;
        let mut step = self.evaluate(&path_fences)?;
        let mut fences = path_fences.clone();
        let mut current = step.clone();
        loop {
            let mut order = find_conflicts(&step.1, self.d, self.threshold);
            order.sort_by(|x, y| y.ratio.total_cmp(&x.ratio));
            let mut best: Option<((usize, usize), (f64, ScheduledCircuit))> = None;
            for p in &order {
                for f in [(p.gate_a, p.gate_b), (p.gate_b, p.gate_a)] {
                    let mut trial = path_fences.clone();
                    trial.push(f);
                    if let Some(r) = self.evaluate(&trial) {
                        if best.as_ref().is_none_or(|(_, (c, _))| r.0 < *c) {
                            best = Some((f, r));
                        }
                    }
                }
            }
            let Some((f, r)) = best else { break };
            path_fences.push(f);
            step = r;
            if self.force || step.0 < current.0 {
                fences = path_fences.clone();
                current = step.clone();
            }
        }
        if self.force {
            return Some(current);
        }
        'improve: loop {
            for i in fixed..fences.len() {
                let (a, b) = fences[i];
                let removed: Vec<(usize, usize)> = fences
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &f)| f)
                    .collect();
                let mut flipped = fences.clone();
                flipped[i] = (b, a);
                for trial in [removed, flipped] {
                    if let Some(r) = self.evaluate(&trial) {
                        if r.0 < current.0 {
                            fences = trial;
                            current = r;
                            continue 'improve;
                        }
                    }
                }
            }
            break;
        }
        Some(current)
    }
}

/// Serializes high-crosstalk simultaneous CX pairs by adding precedence
/// fences and re-running ASAP, minimising [`schedule_cost`].
///
/// Conflicts are taken from the ASAP schedule. With `omega = 1` every pair
/// is serialized, repeating on newly created conflicts until none remain.
pub fn xtalk_sched_with(c: &Circuit, d: &DeviceModel, opts: &XtalkOptions) -> Result<ScheduledCircuit, ScheduleError> {
    if !(0.0..=1.0).contains(&opts.omega) {
        return Err(ScheduleError::InvalidParameter(format!(
            "omega = {} not in [0, 1]",
            opts.omega
        )));
    }
    if opts.threshold.is_nan() || opts.threshold <= 0.0 {
        return Err(ScheduleError::InvalidParameter(format!(
            "threshold = {} must be positive",
            opts.threshold
        )));
    }
    check_schedulable(c, d)?;
    let search = Search {
        c,
        d,
        dag: build_dag(c),
        omega: opts.omega,
        threshold: opts.threshold,
        force: opts.omega >= 1.0,
    };
    let mut current = asap(c, d, &search.dag, Vec::new());
    loop {
        let conflicts = find_conflicts(&current, d, opts.threshold);
        if conflicts.is_empty() {
            break;
        }
        let exhaustive = match opts.strategy {
            SearchStrategy::Auto => conflicts.len() <= EXHAUSTIVE_LIMIT,
            SearchStrategy::Exhaustive => true,
            SearchStrategy::Greedy => false,
        };
        let base = current.fences().to_vec();
        let found = if exhaustive {
            search.exhaustive(&base, &conflicts)
        } else {
            search.greedy(&base)
        };
        let Some((_, next)) = found else { break };
        let progressed = next.fences().len() > base.len();
        current = next;
        if !search.force || !progressed {
            break;
        }
    }
    Ok(current)
}
