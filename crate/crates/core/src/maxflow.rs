//! Exact maximum flow over rational capacities (Edmonds–Karp).
//!
//! Augmenting paths are found by breadth-first search scanning arcs in
//! insertion order, so the resulting flow is fully determined by the order
//! in which arcs are added.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: BigRational,
    flow: BigRational,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    /// Adds an arc and returns its handle.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: BigRational) -> usize {
        assert!(!cap.is_negative(), "negative capacity");
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to,
            cap,
            flow: BigRational::zero(),
        });
        self.arcs.push(Arc {
            to: from,
            cap: BigRational::zero(),
            flow: BigRational::zero(),
        });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    pub fn flow(&self, arc: usize) -> &BigRational {
        &self.arcs[arc].flow
    }

    fn residual(&self, a: usize) -> BigRational {
        &self.arcs[a].cap - &self.arcs[a].flow
    }

    /// Saturates the network and returns the maximum flow value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> BigRational {
        let mut total = BigRational::zero();
        loop {
            let mut via = vec![usize::MAX; self.out.len()];
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            'bfs: while let Some(x) = queue.pop_front() {
                for &a in &self.out[x] {
                    let y = self.arcs[a].to;
                    if y != s && via[y] == usize::MAX && self.residual(a).is_positive() {
                        via[y] = a;
                        if y == t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                }
            }
            if !reached {
                return total;
            }
            let mut path = Vec::new();
            let mut y = t;
            while y != s {
                let a = via[y];
                path.push(a);
                y = self.arcs[a ^ 1].to;
            }
            let push = path
                .iter()
                .map(|&a| self.residual(a))
                .min()
                .expect("nonempty augmenting path");
            for &a in &path {
                self.arcs[a].flow += &push;
                self.arcs[a ^ 1].flow -= &push;
            }
            total += push;
        }
    }
}
