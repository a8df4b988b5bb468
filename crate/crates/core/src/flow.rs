//! Integer feasible flows with lower and upper bounds on every arc.
//!
//! Lower bounds are removed by the usual circulation transform: return arcs
//! between sink and source, a super-source feeding every node's surplus of
//! mandatory inflow and a super-sink draining its mandatory outflow. A
//! feasible flow exists iff the max flow from super-source to super-sink
//! saturates all of that demand. Max flow is Dinic's algorithm.

use std::collections::VecDeque;
use std::fmt::Debug;

use num_traits::{PrimInt, Signed};

/// Integer type usable as a flow capacity.
pub trait Capacity: PrimInt + Signed + Debug {}

impl<T: PrimInt + Signed + Debug> Capacity for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc<C> {
    pub from: usize,
    pub to: usize,
    pub lower: C,
    pub upper: C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork<C> {
    node_count: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc<C>>,
}

/// One integral flow value per arc, in arc insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowAssignment<C> {
    pub flow: Vec<C>,
}

impl<C: Capacity> FlowNetwork<C> {
    /// A network with nodes `0..node_count`; panics if `source` or `sink` is out of range.
    pub fn new(node_count: usize, source: usize, sink: usize) -> Self {
        assert!(source < node_count && sink < node_count, "terminal out of range");
        FlowNetwork {
            node_count,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc<C>] {
        &self.arcs
    }

    pub fn add_node(&mut self) -> usize {
        self.node_count += 1;
        self.node_count - 1
    }

    /// Adds an arc and returns its index; panics on an out-of-range endpoint.
    pub fn add_arc(&mut self, from: usize, to: usize, lower: C, upper: C) -> usize {
        assert!(from < self.node_count && to < self.node_count, "arc endpoint out of range");
        self.arcs.push(Arc { from, to, lower, upper });
        self.arcs.len() - 1
    }

    fn trivially_infeasible(&self) -> bool {
        self.arcs
            .iter()
            .any(|a| a.upper < C::zero() || a.upper < a.lower)
    }

    fn return_capacity(&self) -> C {
        self.arcs
            .iter()
            .filter(|a| a.upper > C::zero())
            .fold(C::zero(), |acc, a| acc.checked_add(&a.upper).unwrap_or_else(C::max_value))
    }

    /// The lower-bound-free network, its mandatory demand and the ids of the original arcs.
    fn transform(&self) -> Option<(Dinic<C>, C, Vec<usize>)> {
        if self.trivially_infeasible() {
            return None;
        }
        let n = self.node_count;
        let (ss, tt) = (n, n + 1);
        let mut g = Dinic::new(n + 2);
        let mut balance = vec![C::zero(); n];
        let mut ids = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            let lower = a.lower.max(C::zero());
            balance[a.to] = balance[a.to] + lower;
            balance[a.from] = balance[a.from] - lower;
            ids.push(g.add_edge(a.from, a.to, a.upper - lower));
        }
        if self.source != self.sink {
            let cap = self.return_capacity();
            g.add_edge(self.sink, self.source, cap);
            g.add_edge(self.source, self.sink, cap);
        }
        let mut demand = C::zero();
        for (v, &b) in balance.iter().enumerate() {
            if b > C::zero() {
                g.add_edge(ss, v, b);
                demand = demand + b;
            } else if b < C::zero() {
                g.add_edge(v, tt, -b);
            }
        }
        Some((g, demand, ids))
    }

    /// `(max flow, mandatory demand)` of the lower-bound transform, or `None`
    /// when some arc has `upper < max(lower, 0)`.
    pub fn transformed_max_flow(&self) -> Option<(C, C)> {
        let (mut g, demand, _) = self.transform()?;
        let n = self.node_count;
        Some((g.max_flow(n, n + 1), demand))
    }

    /// A feasible integral flow, or `None` if there is none.
    pub fn feasible_flow(&self) -> Option<FlowAssignment<C>> {
        let (mut g, demand, ids) = self.transform()?;
        let n = self.node_count;
        if g.max_flow(n, n + 1) != demand {
            return None;
        }
        let flow = self
            .arcs
            .iter()
            .zip(ids)
            .map(|(a, id)| a.lower.max(C::zero()) + g.flow_on(id))
            .collect();
        let assignment = FlowAssignment { flow };
        debug_assert!(assignment.verify(self));
        Some(assignment)
    }
}

impl<C: Capacity> FlowAssignment<C> {
    /// Checks bounds, non-negativity and conservation away from the terminals.
    pub fn verify(&self, net: &FlowNetwork<C>) -> bool {
        if self.flow.len() != net.arcs.len() {
            return false;
        }
        let mut balance = vec![C::zero(); net.node_count];
        for (a, &f) in net.arcs.iter().zip(&self.flow) {
            if f < C::zero() || f < a.lower || f > a.upper {
                return false;
            }
            balance[a.to] = balance[a.to] + f;
            balance[a.from] = balance[a.from] - f;
        }
        balance
            .iter()
            .enumerate()
            .all(|(v, &b)| v == net.source || v == net.sink || b == C::zero())
    }

    pub fn value(&self, net: &FlowNetwork<C>) -> C {
        net.arcs
            .iter()
            .zip(&self.flow)
            .fold(C::zero(), |acc, (a, &f)| {
                let out = if a.from == net.source { f } else { C::zero() };
                let back = if a.to == net.source { f } else { C::zero() };
                acc + out - back
            })
    }
}

#[derive(Debug, Clone)]
struct Edge<C> {
    to: usize,
    cap: C,
    original: C,
}

/// Dinic max-flow over paired residual edges (`e` and `e ^ 1`).
#[derive(Debug, Clone)]
pub struct Dinic<C> {
    edges: Vec<Edge<C>>,
    adj: Vec<Vec<usize>>,
    level: Vec<i64>,
    cursor: Vec<usize>,
}

impl<C: Capacity> Dinic<C> {
    pub fn new(nodes: usize) -> Self {
        Dinic {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            cursor: vec![0; nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: C) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, original: cap });
        self.edges.push(Edge {
            to: from,
            cap: C::zero(),
            original: C::zero(),
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow_on(&self, id: usize) -> C {
        self.edges[id].original - self.edges[id].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let Edge { to, cap, .. } = self.edges[e];
                if cap > C::zero() && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, limit: C) -> C {
        if v == t {
            return limit;
        }
        while self.cursor[v] < self.adj[v].len() {
            let e = self.adj[v][self.cursor[v]];
            let Edge { to, cap, .. } = self.edges[e];
            if cap > C::zero() && self.level[to] == self.level[v] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > C::zero() {
                    self.edges[e].cap = self.edges[e].cap - pushed;
                    self.edges[e ^ 1].cap = self.edges[e ^ 1].cap + pushed;
                    return pushed;
                }
            }
            self.cursor[v] += 1;
        }
        C::zero()
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> C {
        let mut total = C::zero();
        if s == t {
            return total;
        }
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.dfs(s, t, C::max_value());
                if pushed == C::zero() {
                    break;
                }
                total = total + pushed;
            }
        }
        total
    }
}
