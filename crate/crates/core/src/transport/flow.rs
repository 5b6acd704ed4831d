//! Max-flow feasibility for transportation problems with forbidden arcs.

use std::collections::VecDeque;

const EPS: f64 = 1e-15;

struct Edge {
    to: usize,
    cap: f64,
}

struct Network {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.adj[from].push(id);
        self.edges.push(Edge { to: from, cap: 0.0 });
        self.adj[to].push(id + 1);
        id
    }

    /// Edmonds-Karp.
    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let mut parent = vec![usize::MAX; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            parent[s] = usize::MAX - 1;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.edges[e].to;
                    if parent[v] == usize::MAX && self.edges[e].cap > EPS {
                        parent[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if parent[t] == usize::MAX {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let e = parent[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = parent[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            total += push;
        }
    }
}

/// Maximum mass routable from `supply` to `demand` through allowed cells,
/// together with one flow achieving it (row-major).
pub(crate) fn max_transport(supply: &[f64], demand: &[f64], allowed: &[bool]) -> (f64, Vec<f64>) {
    let (m, n) = (supply.len(), demand.len());
    let (s, t) = (m + n, m + n + 1);
    let mut net = Network::new(m + n + 2);
    for (i, &a) in supply.iter().enumerate() {
        net.add(s, i, a);
    }
    for (j, &b) in demand.iter().enumerate() {
        net.add(m + j, t, b);
    }
    let mut cells = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if allowed[i * n + j] {
                cells.push((i * n + j, net.add(i, m + j, f64::INFINITY)));
            }
        }
    }
    let value = net.max_flow(s, t);
    let mut flow = vec![0.0; m * n];
    for (k, e) in cells {
        flow[k] = net.edges[e ^ 1].cap;
    }
    (value, flow)
}
