use std::collections::{BTreeSet, HashMap};

use super::NetworkError;

/// A validated directed acyclic graph over named nodes.
///
/// Parents of each node are kept in the order their edges were supplied; that
/// order is the parent order of the node's CPT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Validates `nodes` and `edges` (as `(parent, child)` pairs).
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self, NetworkError> {
        if nodes.is_empty() {
            return Err(NetworkError::NoNodes);
        }
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.as_ref(), i).is_some() {
                return Err(NetworkError::DuplicateNode(n.as_ref().to_string()));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| NetworkError::UnknownNode(name.to_string()))
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for (p, c) in edges {
            pairs.push((lookup(p.as_ref())?, lookup(c.as_ref())?));
        }
        let names = nodes.iter().map(|n| n.as_ref().to_string()).collect();
        Dag::from_indices(names, &pairs)
    }

    /// Same as [`Dag::new`] with edges given as node indices.
    pub fn from_indices(
        nodes: Vec<String>,
        edges: &[(usize, usize)],
    ) -> Result<Self, NetworkError> {
        if nodes.is_empty() {
            return Err(NetworkError::NoNodes);
        }
        let n = nodes.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(p, c) in edges {
            if p >= n {
                return Err(NetworkError::UnknownNode(format!("#{p}")));
            }
            if c >= n {
                return Err(NetworkError::UnknownNode(format!("#{c}")));
            }
            if p == c {
                return Err(NetworkError::SelfLoop(nodes[p].clone()));
            }
            if parents[c].contains(&p) {
                return Err(NetworkError::DuplicateEdge(
                    nodes[p].clone(),
                    nodes[c].clone(),
                ));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        let dag = Dag {
            nodes,
            parents,
            children,
        };
        if let Some(cycle) = dag.find_cycle() {
            return Err(NetworkError::CycleDetected(
                cycle.into_iter().map(|i| dag.nodes[i].clone()).collect(),
            ));
        }
        Ok(dag)
    }

    /// A graph with no edges.
    pub fn empty(nodes: Vec<String>) -> Result<Self, NetworkError> {
        Dag::from_indices(nodes, &[])
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].contains(&parent)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Edges as `(parent, child)` index pairs, grouped by child in node order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    pub fn named_edges(&self) -> Vec<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(p, c)| (self.nodes[p].clone(), self.nodes[c].clone()))
            .collect()
    }

    /// Kahn's algorithm; among ready nodes the earliest declared goes first.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(next) = ready.pop_first() {
            order.push(next);
            for &c in &self.children[next] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    pub fn topological_names(&self) -> Vec<String> {
        self.topological_order()
            .into_iter()
            .map(|i| self.nodes[i].clone())
            .collect()
    }

    /// Nodes that are ancestors of any node in `seeds`, seeds included.
    pub fn ancestral_set(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut keep = vec![false; self.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(v) = stack.pop() {
            if !keep[v] {
                keep[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        keep
    }

    /// Undirected skeleton as sorted `(min, max)` pairs.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect()
    }

    /// Unshielded colliders `(a, c, b)` with `a < b`: `a -> c <- b` and `a`, `b`
    /// non-adjacent.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for c in 0..self.len() {
            let ps = &self.parents[c];
            for (i, &a) in ps.iter().enumerate() {
                for &b in &ps[i + 1..] {
                    if !self.has_edge(a, b) && !self.has_edge(b, a) {
                        out.insert((a.min(b), c, a.max(b)));
                    }
                }
            }
        }
        out
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.len()];
        let mut path = Vec::new();
        for start in 0..self.len() {
            if state[start] == 0 {
                if let Some(c) = self.dfs_cycle(start, &mut state, &mut path) {
                    return Some(c);
                }
            }
        }
        None
    }

    fn dfs_cycle(&self, v: usize, state: &mut [u8], path: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[v] = 1;
        path.push(v);
        for &c in &self.children[v] {
            if state[c] == 1 {
                let start = path.iter().position(|&x| x == c).unwrap();
                let mut cycle = path[start..].to_vec();
                cycle.push(c);
                return Some(cycle);
            }
            if state[c] == 0 {
                if let Some(cycle) = self.dfs_cycle(c, state, path) {
                    return Some(cycle);
                }
            }
        }
        path.pop();
        state[v] = 2;
        None
    }
}
