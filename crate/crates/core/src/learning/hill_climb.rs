use std::collections::{HashMap, HashSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::score::family_score;
use super::{Criterion, LearnError};
use crate::dataset::Dataset;
use crate::network::Dag;
use crate::rng;

/// A move must improve the score by more than this to be accepted.
const MIN_IMPROVEMENT: f64 = 1e-9;

/// Deltas closer than this count as tied; the earlier move wins.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct HillClimbConfig {
    pub criterion: Criterion,
    pub max_parents: usize,
    /// Cap on accepted moves per climb.
    pub max_iterations: usize,
    pub restarts: usize,
    /// Random edge flips applied to the incumbent before each restart.
    pub perturb: usize,
    pub seed: u64,
    pub forbidden_edges: Vec<(String, String)>,
    pub required_edges: Vec<(String, String)>,
}

impl Default for HillClimbConfig {
    fn default() -> Self {
        HillClimbConfig {
            criterion: Criterion::Aic,
            max_parents: 4,
            max_iterations: usize::MAX,
            restarts: 0,
            perturb: 1,
            seed: 0,
            forbidden_edges: Vec::new(),
            required_edges: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HillClimbResult {
    pub dag: Dag,
    pub score: f64,
    /// Score after every accepted move, one trace per climb (the first climb
    /// followed by one per restart). Each trace starts with the climb's
    /// initial score.
    pub traces: Vec<Vec<f64>>,
}

pub fn hill_climb(dataset: &Dataset, config: &HillClimbConfig) -> Result<Dag, LearnError> {
    hill_climb_traced(dataset, config).map(|r| r.dag)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Add(usize, usize),
    Delete(usize, usize),
    Reverse(usize, usize),
}

struct Search<'a> {
    data: &'a Dataset,
    /// Dataset column of each search node.
    columns: Vec<usize>,
    criterion: Criterion,
    max_parents: usize,
    required: HashSet<(usize, usize)>,
    forbidden: HashSet<(usize, usize)>,
    cache: HashMap<(usize, Vec<usize>), f64>,
}

#[derive(Clone)]
struct State {
    parents: Vec<Vec<usize>>,
    family: Vec<f64>,
}

impl State {
    fn total(&self) -> f64 {
        self.family.iter().sum()
    }

    fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].contains(&from)
    }

    fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.parents.len()];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                out[p].push(c);
            }
        }
        out
    }

    /// `reach[a][b]`: a directed path from `a` to `b` exists (`a` reaches itself).
    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.parents.len();
        let children = self.children();
        let mut reach = vec![vec![false; n]; n];
        for (start, row) in reach.iter_mut().enumerate() {
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !row[v] {
                    row[v] = true;
                    stack.extend(children[v].iter().copied());
                }
            }
        }
        reach
    }
}

fn with(parents: &[usize], extra: usize) -> Vec<usize> {
    let mut out = parents.to_vec();
    out.push(extra);
    out.sort_unstable();
    out
}

fn without(parents: &[usize], gone: usize) -> Vec<usize> {
    parents.iter().copied().filter(|&p| p != gone).collect()
}

impl<'a> Search<'a> {
    fn family(&mut self, node: usize, parents: &[usize]) -> f64 {
        let key = (node, parents.to_vec());
        if let Some(&s) = self.cache.get(&key) {
            return s;
        }
        let cols: Vec<usize> = parents.iter().map(|&p| self.columns[p]).collect();
        let s = family_score(self.data, self.columns[node], &cols, self.criterion);
        self.cache.insert(key, s);
        s
    }

    fn state_from(&mut self, parents: Vec<Vec<usize>>) -> State {
        let family = parents
            .iter()
            .enumerate()
            .map(|(v, ps)| self.family(v, ps))
            .collect();
        State { parents, family }
    }

    fn legal(&self, state: &State, mv: Move, reach: &[Vec<bool>]) -> bool {
        match mv {
            Move::Add(u, v) => {
                !state.has_edge(u, v)
                    && !state.has_edge(v, u)
                    && !self.forbidden.contains(&(u, v))
                    && state.parents[v].len() < self.max_parents
                    && !reach[v][u]
            }
            Move::Delete(u, v) => state.has_edge(u, v) && !self.required.contains(&(u, v)),
            Move::Reverse(u, v) => {
                state.has_edge(u, v)
                    && !self.required.contains(&(u, v))
                    && !self.forbidden.contains(&(v, u))
                    && state.parents[u].len() < self.max_parents
                    // no other path u ~> v once u -> v is gone
                    && !state.parents.iter().enumerate().any(|(c, ps)| {
                        c != v && ps.contains(&u) && reach[c][v]
                    })
            }
        }
    }

    fn delta(&mut self, state: &State, mv: Move) -> f64 {
        match mv {
            Move::Add(u, v) => self.family(v, &with(&state.parents[v], u)) - state.family[v],
            Move::Delete(u, v) => self.family(v, &without(&state.parents[v], u)) - state.family[v],
            Move::Reverse(u, v) => {
                self.family(v, &without(&state.parents[v], u)) - state.family[v]
                    + self.family(u, &with(&state.parents[u], v))
                    - state.family[u]
            }
        }
    }

    fn apply(&mut self, state: &mut State, mv: Move) {
        let changes = match mv {
            Move::Add(u, v) => vec![(v, with(&state.parents[v], u))],
            Move::Delete(u, v) => vec![(v, without(&state.parents[v], u))],
            Move::Reverse(u, v) => vec![
                (v, without(&state.parents[v], u)),
                (u, with(&state.parents[u], v)),
            ],
        };
        for (node, ps) in changes {
            state.family[node] = self.family(node, &ps);
            state.parents[node] = ps;
        }
    }

    /// Enumerates moves in the fixed order: all additions, then deletions, then
    /// reversals; node pairs in node order within each kind.
    fn candidates(n: usize) -> impl Iterator<Item = Move> {
        let pairs =
            move || (0..n).flat_map(move |u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)));
        pairs()
            .map(|(u, v)| Move::Add(u, v))
            .chain(pairs().map(|(u, v)| Move::Delete(u, v)))
            .chain(pairs().map(|(u, v)| Move::Reverse(u, v)))
    }

    fn best_move(&mut self, state: &State) -> Option<(Move, f64)> {
        let reach = state.reachability();
        let mut best: Option<(Move, f64)> = None;
        for mv in Self::candidates(state.parents.len()) {
            if !self.legal(state, mv, &reach) {
                continue;
            }
            let d = self.delta(state, mv);
            if best.is_none_or(|(_, b)| d > b + TIE_TOLERANCE) {
                best = Some((mv, d));
            }
        }
        best
    }

    fn climb(&mut self, state: &mut State, max_iterations: usize) -> Vec<f64> {
        let mut trace = vec![state.total()];
        for _ in 0..max_iterations {
            match self.best_move(state) {
                Some((mv, d)) if d > MIN_IMPROVEMENT => {
                    self.apply(state, mv);
                    trace.push(state.total());
                }
                _ => break,
            }
        }
        trace
    }

    fn perturb(&mut self, state: &mut State, flips: usize, rng: &mut rng::Rng) {
        let n = state.parents.len();
        if n < 2 {
            return;
        }
        for _ in 0..flips {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            let reach = state.reachability();
            let mv = if state.has_edge(u, v) {
                if rng.gen_bool(0.5) {
                    Move::Delete(u, v)
                } else {
                    Move::Reverse(u, v)
                }
            } else if state.has_edge(v, u) {
                Move::Reverse(v, u)
            } else {
                Move::Add(u, v)
            };
            if self.legal(state, mv, &reach) {
                self.apply(state, mv);
            }
        }
    }
}

/// Greedy hill climbing from the empty graph (plus required edges) with the
/// single best add/delete/reverse move per step, followed by optional
/// perturbed restarts. Returns the best local optimum found.
pub fn hill_climb_traced(
    dataset: &Dataset,
    config: &HillClimbConfig,
) -> Result<HillClimbResult, LearnError> {
    if dataset.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    if config.max_parents == 0 {
        return Err(LearnError::InvalidConfig(
            "maxParents must be at least 1".into(),
        ));
    }
    let schema = dataset.schema();
    let columns = dataset.present_columns();
    let names: Vec<String> = columns
        .iter()
        .map(|&c| schema.question(c).abbr.clone())
        .collect();
    let local = |name: &str| {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| LearnError::InconsistentConstraints(format!("unknown node `{name}`")))
    };
    let resolve = |edges: &[(String, String)]| -> Result<Vec<(usize, usize)>, LearnError> {
        edges
            .iter()
            .map(|(a, b)| Ok((local(a)?, local(b)?)))
            .collect()
    };
    let required = resolve(&config.required_edges)?;
    let forbidden = resolve(&config.forbidden_edges)?;
    if let Some(&(a, b)) = required.iter().find(|e| forbidden.contains(e)) {
        return Err(LearnError::InconsistentConstraints(format!(
            "{} -> {} is both required and forbidden",
            names[a], names[b]
        )));
    }
    let start = Dag::from_indices(names.clone(), &required).map_err(|e| {
        LearnError::InconsistentConstraints(format!("required edges do not form a DAG: {e}"))
    })?;
    if (0..start.len()).any(|v| start.parents(v).len() > config.max_parents) {
        return Err(LearnError::InconsistentConstraints(
            "required edges exceed maxParents".into(),
        ));
    }

    let mut search = Search {
        data: dataset,
        columns,
        criterion: config.criterion,
        max_parents: config.max_parents,
        required: required.iter().copied().collect(),
        forbidden: forbidden.into_iter().collect(),
        cache: HashMap::new(),
    };
    let initial: Vec<Vec<usize>> = (0..start.len())
        .map(|v| {
            let mut ps = start.parents(v).to_vec();
            ps.sort_unstable();
            ps
        })
        .collect();
    let mut best = search.state_from(initial);
    let mut traces = vec![search.climb(&mut best, config.max_iterations)];

    let mut rng = rng::seeded(config.seed);
    for _ in 0..config.restarts {
        let mut state = best.clone();
        search.perturb(&mut state, config.perturb, &mut rng);
        traces.push(search.climb(&mut state, config.max_iterations));
        if state.total() > best.total() + MIN_IMPROVEMENT {
            best = state;
        }
    }

    let edges: Vec<(usize, usize)> = best
        .parents
        .iter()
        .enumerate()
        .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
        .collect();
    let score = best.total();
    let dag = Dag::from_indices(names, &edges)?;
    Ok(HillClimbResult { dag, score, traces })
}
