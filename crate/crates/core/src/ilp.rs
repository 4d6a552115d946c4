//! Minimum-size explanations of rejection as a 0-1 integer program.
//!
//! With `z_j = 1` meaning feature `j` is fixed, the upper worst-case bound
//! is `baseline_max + sum z_j (beta_j - alpha_max_j)` and the lower one is
//! `baseline_min + sum z_j (beta_j - alpha_min_j)`. A rejected instance is
//! explained by any `z` that keeps the first below `t_plus` and the second
//! above `t_minus`; the objective is `sum z_j`.
//!
//! Both rows are covering constraints over non-negative gains, so the
//! solver is a best-first branch-and-bound whose node bound is the larger
//! of the two single-constraint greedy cover counts.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{Explanation, ExplanationKind, Instance, Label, RejectClassifier};

/// Constraint data of the rejection program, constants moved right.
///
/// Row 1: `sum z_j * correction_up[j] <= slack_up`.
/// Row 2: `sum z_j * correction_down[j] >= slack_down`.
/// Both rows are relaxed by `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionIlp {
    pub correction_up: Vec<f64>,
    pub correction_down: Vec<f64>,
    pub slack_up: f64,
    pub slack_down: f64,
    pub tolerance: f64,
}

impl RejectionIlp {
    pub fn n_vars(&self) -> usize {
        self.correction_up.len()
    }

    /// Evaluates both rows for the given selection.
    pub fn is_feasible(&self, selected: &[usize]) -> bool {
        let up: f64 = selected.iter().map(|&j| self.correction_up[j]).sum();
        let down: f64 = selected.iter().map(|&j| self.correction_down[j]).sum();
        up <= self.slack_up + self.tolerance && down >= self.slack_down - self.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            node_limit: 10_000_000,
            time_limit: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpSolution {
    pub selected: Vec<usize>,
    pub objective: usize,
    /// True only when no smaller feasible selection exists.
    pub optimal: bool,
    pub nodes_explored: u64,
    pub solve_time: Duration,
}

pub fn build_rejection_ilp(clf: &RejectClassifier, instance: &Instance) -> Result<RejectionIlp> {
    let label = clf.predict(instance)?.label;
    if label != Label::Reject {
        return Err(Error::KindMismatch {
            kind: ExplanationKind::Rejection,
            label,
        });
    }
    let p = clf.coefficient_profile(instance)?;
    Ok(RejectionIlp {
        correction_up: p.beta.iter().zip(&p.alpha_max).map(|(b, a)| b - a).collect(),
        correction_down: p.beta.iter().zip(&p.alpha_min).map(|(b, a)| b - a).collect(),
        slack_up: clf.t_plus() - p.baseline_max,
        slack_down: clf.t_minus() - p.baseline_min,
        tolerance: clf.tolerance(),
    })
}

/// Minimum-size explanation of a rejected instance. The explanation is
/// certified only if the solver proved optimality within `budget`.
pub fn explain_rejection(
    clf: &RejectClassifier,
    instance: &Instance,
    budget: &SolverBudget,
) -> Result<(Explanation, IlpSolution)> {
    let ilp = build_rejection_ilp(clf, instance)?;
    let solution = solve_rejection_ilp(&ilp, budget);
    let explanation = Explanation::new(
        solution.selected.clone(),
        ExplanationKind::Rejection,
        solution.optimal,
    );
    Ok((explanation, solution))
}

pub fn solve_rejection_ilp(ilp: &RejectionIlp, budget: &SolverBudget) -> IlpSolution {
    let start = Instant::now();
    let mut solver = Solver::new(ilp);
    let (selected, optimal, nodes) = solver.run(budget, start);
    let mut selected: Vec<usize> = selected.into_iter().map(|p| solver.vars[p]).collect();
    selected.sort_unstable();
    IlpSolution {
        objective: selected.len(),
        selected,
        optimal,
        nodes_explored: nodes,
        solve_time: start.elapsed(),
    }
}

const NO_TRAIL: u32 = u32::MAX;

#[derive(Debug)]
struct Node {
    bound: usize,
    count: usize,
    depth: usize,
    need_up: f64,
    need_down: f64,
    trail: u32,
    seq: u64,
}

// Max-heap order: smallest bound first, then deepest, then oldest.
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

/// Search state over the features with a non-zero gain, indexed by
/// branching position.
struct Solver {
    /// Original feature index of each branching position.
    vars: Vec<usize>,
    gain_up: Vec<f64>,
    gain_down: Vec<f64>,
    /// Branching positions sorted by descending `gain_up` / `gain_down`.
    by_up: Vec<usize>,
    by_down: Vec<usize>,
    need_up: f64,
    need_down: f64,
    /// Relaxation applied inside bounds only, so rounding in the partial
    /// sums can never make a bound exceed the true optimum.
    bound_slack: f64,
    /// (parent, position) pairs for every "fix" decision on the open list.
    trails: Vec<(u32, u32)>,
}

impl Solver {
    fn new(ilp: &RejectionIlp) -> Self {
        let mut vars: Vec<usize> = (0..ilp.n_vars())
            .filter(|&j| ilp.correction_up[j] != 0.0 || ilp.correction_down[j] != 0.0)
            .collect();
        let key = |j: usize| (-ilp.correction_up[j]).min(ilp.correction_down[j]);
        vars.sort_by(|&a, &b| key(b).total_cmp(&key(a)));

        let gain_up: Vec<f64> = vars.iter().map(|&j| (-ilp.correction_up[j]).max(0.0)).collect();
        let gain_down: Vec<f64> = vars.iter().map(|&j| ilp.correction_down[j].max(0.0)).collect();

        let mut by_up: Vec<usize> = (0..vars.len()).collect();
        by_up.sort_by(|&a, &b| gain_up[b].total_cmp(&gain_up[a]));
        let mut by_down: Vec<usize> = (0..vars.len()).collect();
        by_down.sort_by(|&a, &b| gain_down[b].total_cmp(&gain_down[a]));

        let total: f64 = gain_up.iter().chain(&gain_down).sum::<f64>()
            + ilp.slack_up.abs()
            + ilp.slack_down.abs();
        Self {
            need_up: -ilp.slack_up - ilp.tolerance,
            need_down: ilp.slack_down - ilp.tolerance,
            bound_slack: 1e-12 * (1.0 + total),
            vars,
            gain_up,
            gain_down,
            by_up,
            by_down,
            trails: Vec::new(),
        }
    }

    /// Fewest features at positions `>= from` whose gains cover `need`.
    fn cover_count(order: &[usize], gains: &[f64], from: usize, need: f64) -> Option<usize> {
        if need <= 0.0 {
            return Some(0);
        }
        let mut covered = 0.0;
        let mut count = 0;
        for &p in order {
            if p < from {
                continue;
            }
            covered += gains[p];
            count += 1;
            if covered >= need {
                return Some(count);
            }
        }
        None
    }

    fn lower_bound(&self, from: usize, need_up: f64, need_down: f64) -> Option<usize> {
        let up = Self::cover_count(&self.by_up, &self.gain_up, from, need_up - self.bound_slack)?;
        let down =
            Self::cover_count(&self.by_down, &self.gain_down, from, need_down - self.bound_slack)?;
        Some(up.max(down))
    }

    /// Feasible starting selection: repeatedly fix the feature making the
    /// most normalized progress on the unmet rows.
    fn greedy_incumbent(&self) -> Vec<usize> {
        let m = self.vars.len();
        let mut used = vec![false; m];
        let mut chosen = Vec::new();
        let (mut nu, mut nd) = (self.need_up, self.need_down);
        while nu > 0.0 || nd > 0.0 {
            let progress = |p: usize| {
                let a = if nu > 0.0 { self.gain_up[p].min(nu) / nu } else { 0.0 };
                let b = if nd > 0.0 { self.gain_down[p].min(nd) / nd } else { 0.0 };
                a + b
            };
            let best = (0..m)
                .filter(|&p| !used[p])
                .max_by(|&a, &b| progress(a).total_cmp(&progress(b)).then(b.cmp(&a)));
            let Some(p) = best else {
                // rounding left a sliver uncovered; everything is fixed
                break;
            };
            used[p] = true;
            chosen.push(p);
            nu -= self.gain_up[p];
            nd -= self.gain_down[p];
        }
        chosen
    }

    fn unwind(&self, mut trail: u32) -> Vec<usize> {
        let mut out = Vec::new();
        while trail != NO_TRAIL {
            let (parent, pos) = self.trails[trail as usize];
            out.push(pos as usize);
            trail = parent;
        }
        out
    }

    /// Returns (selected positions, proven optimal, nodes explored).
    fn run(&mut self, budget: &SolverBudget, start: Instant) -> (Vec<usize>, bool, u64) {
        if self.need_up <= 0.0 && self.need_down <= 0.0 {
            return (Vec::new(), true, 0);
        }
        let mut best = self.greedy_incumbent();
        let Some(root_bound) = self.lower_bound(0, self.need_up, self.need_down) else {
            // the full set is feasible in exact arithmetic, so this only
            // happens when rounding eats the last bit of slack
            return (best, false, 0);
        };
        if root_bound >= best.len() {
            return (best, true, 0);
        }

        let m = self.vars.len();
        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        heap.push(Node {
            bound: root_bound,
            count: 0,
            depth: 0,
            need_up: self.need_up,
            need_down: self.need_down,
            trail: NO_TRAIL,
            seq,
        });
        let mut nodes = 0u64;

        while let Some(node) = heap.pop() {
            if node.bound >= best.len() {
                return (best, true, nodes);
            }
            if nodes >= budget.node_limit
                || (nodes % 1024 == 0 && start.elapsed() >= budget.time_limit)
            {
                return (best, false, nodes);
            }
            nodes += 1;
            if node.depth == m {
                continue;
            }
            let pos = node.depth;
            let next = pos + 1;

            let nu = node.need_up - self.gain_up[pos];
            let nd = node.need_down - self.gain_down[pos];
            let count = node.count + 1;
            if nu <= 0.0 && nd <= 0.0 {
                if count < best.len() {
                    let mut sel = self.unwind(node.trail);
                    sel.push(pos);
                    best = sel;
                }
            } else if let Some(b) = self.lower_bound(next, nu, nd) {
                if count + b < best.len() {
                    self.trails.push((node.trail, pos as u32));
                    seq += 1;
                    heap.push(Node {
                        bound: count + b,
                        count,
                        depth: next,
                        need_up: nu,
                        need_down: nd,
                        trail: (self.trails.len() - 1) as u32,
                        seq,
                    });
                }
            }

            if let Some(b) = self.lower_bound(next, node.need_up, node.need_down) {
                if node.count + b < best.len() {
                    seq += 1;
                    heap.push(Node {
                        bound: node.count + b,
                        count: node.count,
                        depth: next,
                        need_up: node.need_up,
                        need_down: node.need_down,
                        trail: node.trail,
                        seq,
                    });
                }
            }
        }
        (best, true, nodes)
    }
}
