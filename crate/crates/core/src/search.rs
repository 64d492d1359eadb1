//! Depth-first and branch-and-bound search over copied spaces.
//!
//! Both engines branch binarily: the left child posts `x = v`, the right
//! child posts `x != v`, and the left child is explored first. Which `x` and
//! `v` are picked is controlled by [`VarHeuristic`] and [`ValHeuristic`].

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::domain::VarId;
use crate::space::{Space, SpaceStatus};

/// Which unassigned variable to branch on. Ties go to the lowest index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarHeuristic {
    InputOrder,
    SmallestDomain,
    LargestDomain,
    Random(u64),
}

/// Which value of the chosen variable goes on the left branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValHeuristic {
    Min,
    Max,
    /// The value at index `(size - 1) / 2` in ascending order.
    Median,
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub var_heuristic: VarHeuristic,
    pub val_heuristic: ValHeuristic,
    /// Checked before every node expansion.
    pub time_limit: Option<Duration>,
    pub max_solutions: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            var_heuristic: VarHeuristic::InputOrder,
            val_heuristic: ValHeuristic::Min,
            time_limit: None,
            max_solutions: None,
        }
    }
}

impl SearchOptions {
    pub fn first() -> Self {
        SearchOptions { max_solutions: Some(1), ..Default::default() }
    }

    pub fn with_heuristics(var_heuristic: VarHeuristic, val_heuristic: ValHeuristic) -> Self {
        SearchOptions { var_heuristic, val_heuristic, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Objective {
    pub var: VarId,
    pub direction: Direction,
}

impl Objective {
    pub fn minimize(var: VarId) -> Self {
        Objective { var, direction: Direction::Minimize }
    }

    pub fn maximize(var: VarId) -> Self {
        Objective { var, direction: Direction::Maximize }
    }
}

/// A value for every variable of the searched space, indexed by [`VarId`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution(pub Vec<i64>);

impl Solution {
    pub fn value(&self, v: VarId) -> i64 {
        self.0[v.0]
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    /// Values of `vars`, in order.
    pub fn project(&self, vars: &[VarId]) -> Vec<i64> {
        vars.iter().map(|&v| self.value(v)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub failures: u64,
    pub max_depth: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution>,
    /// The tree was not exhausted because the time limit or solution cap
    /// was reached first.
    pub stopped_by_limit: bool,
    pub stats: SearchStats,
}

/// Branching decisions under a fixed pair of heuristics. Random heuristics
/// draw from their own seeded generator, so a run is reproducible.
#[derive(Clone, Debug)]
pub struct Brancher {
    var: VarHeuristic,
    val: ValHeuristic,
    var_rng: Option<ChaCha8Rng>,
    val_rng: Option<ChaCha8Rng>,
}

impl Brancher {
    pub fn new(var: VarHeuristic, val: ValHeuristic) -> Brancher {
        let var_rng = match var {
            VarHeuristic::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let val_rng = match val {
            ValHeuristic::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Brancher { var, val, var_rng, val_rng }
    }

    pub fn from_options(opts: &SearchOptions) -> Brancher {
        Brancher::new(opts.var_heuristic, opts.val_heuristic)
    }

    /// The next `(variable, value)` decision, or `None` if every variable is
    /// assigned.
    ///
    /// # Panics
    ///
    /// If `space` is failed.
    pub fn choose(&mut self, space: &Space) -> Option<(VarId, i64)> {
        assert!(!space.is_failed(), "branching on a failed space");
        let candidates: Vec<VarId> = space.vars().filter(|&v| !space.domain(v).is_assigned()).collect();
        let first = *candidates.first()?;
        let size = |v: VarId| space.domain(v).size();
        let var = match self.var {
            VarHeuristic::InputOrder => first,
            VarHeuristic::SmallestDomain => {
                candidates.iter().copied().fold(first, |best, v| if size(v) < size(best) { v } else { best })
            }
            VarHeuristic::LargestDomain => {
                candidates.iter().copied().fold(first, |best, v| if size(v) > size(best) { v } else { best })
            }
            VarHeuristic::Random(_) => {
                let rng = self.var_rng.as_mut().expect("seeded at construction");
                candidates[rng.gen_range(0..candidates.len())]
            }
        };
        let dom = space.domain(var);
        let value = match self.val {
            ValHeuristic::Min => dom.min(),
            ValHeuristic::Max => dom.max(),
            ValHeuristic::Median => dom.nth((dom.size() - 1) / 2),
            ValHeuristic::Random(_) => {
                let rng = self.val_rng.as_mut().expect("seeded at construction");
                dom.nth(rng.gen_range(0..dom.size()))
            }
        }
        .expect("unassigned domain is non-empty");
        Some((var, value))
    }
}

/// Enumerates solutions depth-first.
pub fn dfs(root: Space, opts: &SearchOptions) -> SearchOutcome {
    explore(root, opts, None)
}

/// Depth-first search in which every solution found forces later ones to
/// strictly improve `objective`. The last solution is optimal when the
/// search was not stopped by a limit.
pub fn bab(root: Space, objective: Objective, opts: &SearchOptions) -> SearchOutcome {
    explore(root, opts, Some(objective))
}

fn explore(root: Space, opts: &SearchOptions, objective: Option<Objective>) -> SearchOutcome {
    let started = Instant::now();
    let mut brancher = Brancher::from_options(opts);
    let mut stats = SearchStats::default();
    let mut solutions = Vec::new();
    let mut stopped_by_limit = false;
    let mut incumbent: Option<i64> = None;
    let mut stack: Vec<(Space, usize)> = vec![(root, 0)];

    while let Some((mut space, depth)) = stack.pop() {
        if opts.time_limit.is_some_and(|limit| started.elapsed() >= limit) {
            stopped_by_limit = true;
            break;
        }
        stats.nodes += 1;
        stats.max_depth = stats.max_depth.max(depth);

        if let (Some(obj), Some(best)) = (objective, incumbent) {
            match obj.direction {
                Direction::Minimize => space.remove_above(obj.var, best - 1),
                Direction::Maximize => space.remove_below(obj.var, best + 1),
            };
        }

        match space.propagate() {
            SpaceStatus::Failed => stats.failures += 1,
            SpaceStatus::Solved => {
                let sol = Solution(space.assignment().expect("solved space is assigned"));
                if let Some(obj) = objective {
                    incumbent = Some(sol.value(obj.var));
                }
                solutions.push(sol);
                if opts.max_solutions.is_some_and(|cap| solutions.len() >= cap) {
                    stopped_by_limit = !stack.is_empty();
                    break;
                }
            }
            SpaceStatus::Stable => {
                let (var, value) = brancher.choose(&space).expect("stable space has an unassigned variable");
                let mut right = space.clone();
                right.remove_value(var, value);
                space.assign(var, value);
                stack.push((right, depth + 1));
                stack.push((space, depth + 1));
            }
        }
    }

    stats.elapsed = started.elapsed();
    SearchOutcome { solutions, stopped_by_limit, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;

    #[test]
    fn failed_root_counts_one_node() {
        let mut s = Space::new();
        let x = s.new_var_range(0, 1);
        s.post_all_distinct(&[x, x]).unwrap();
        let out = dfs(s, &SearchOptions::default());
        assert!(out.solutions.is_empty());
        assert_eq!(out.stats.nodes, 1);
        assert_eq!(out.stats.failures, 1);
        assert!(!out.stopped_by_limit);
    }

    #[test]
    fn two_distinct_vars_in_min_order() {
        let mut s = Space::new();
        let x = s.new_var_range(1, 2);
        let y = s.new_var_range(1, 2);
        s.post_all_distinct(&[x, y]).unwrap();
        let out = dfs(s, &SearchOptions::default());
        let sols: Vec<Vec<i64>> = out.solutions.iter().map(|s| s.0.clone()).collect();
        assert_eq!(sols, vec![vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn bab_single_variable() {
        let mut s = Space::new();
        let x = s.new_var_range(3, 7);
        let out = bab(s.clone(), Objective::minimize(x), &SearchOptions::default());
        assert_eq!(out.solutions.last().unwrap().value(x), 3);
        let out = bab(s, Objective::maximize(x), &SearchOptions::default());
        assert_eq!(out.solutions.last().unwrap().value(x), 7);
        let seq: Vec<i64> = out.solutions.iter().map(|s| s.value(x)).collect();
        assert_eq!(seq, vec![3, 4, 5, 6, 7]);
    }

    #[test]
    fn solution_cap() {
        let mut s = Space::new();
        s.new_var_range(0, 9);
        let out = dfs(s.clone(), &SearchOptions::first());
        assert_eq!(out.solutions.len(), 1);
        assert!(out.stopped_by_limit);

        let opts = SearchOptions { max_solutions: Some(10), ..Default::default() };
        let out = dfs(s, &opts);
        assert_eq!(out.solutions.len(), 10);
        assert!(!out.stopped_by_limit);
    }

    #[test]
    fn choose_examples() {
        let mut s = Space::new();
        s.new_var_range(5, 5);
        let y = s.new_var_range(1, 3);
        let mut b = Brancher::new(VarHeuristic::SmallestDomain, ValHeuristic::Min);
        assert_eq!(b.choose(&s), Some((y, 1)));

        let mut s = Space::new();
        let x = s.new_var_range(1, 2);
        s.new_var_range(3, 4);
        let mut b = Brancher::new(VarHeuristic::SmallestDomain, ValHeuristic::Min);
        assert_eq!(b.choose(&s), Some((x, 1)));
        let mut b = Brancher::new(VarHeuristic::LargestDomain, ValHeuristic::Max);
        assert_eq!(b.choose(&s), Some((x, 2)));

        let mut s = Space::new();
        let x = s.new_var(Domain::from_values([1, 2, 3, 4]));
        let mut b = Brancher::new(VarHeuristic::InputOrder, ValHeuristic::Median);
        assert_eq!(b.choose(&s), Some((x, 2)));

        let mut s = Space::new();
        s.new_var_range(1, 1);
        assert_eq!(b.choose(&s), None);
    }

    #[test]
    fn random_choices_stay_in_domain() {
        let mut s = Space::new();
        for _ in 0..5 {
            s.new_var(Domain::from_values([2, 3, 7, 11]));
        }
        let mut b = Brancher::new(VarHeuristic::Random(9), ValHeuristic::Random(4));
        for _ in 0..50 {
            let (v, val) = b.choose(&s).unwrap();
            assert!(s.domain(v).contains(val));
        }
    }

    #[test]
    #[should_panic(expected = "failed space")]
    fn choose_on_failed_space_panics() {
        let mut s = Space::new();
        s.new_var_range(1, 0);
        Brancher::new(VarHeuristic::InputOrder, ValHeuristic::Min).choose(&s);
    }
}
