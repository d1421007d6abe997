//! Weighted directed multigraphs with exact arc weights and simple-cycle
//! enumeration.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{QVector, Rational};

/// Default cap on the number of simple cycles [`enumerate_cycles`] may emit.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub weight: Rational,
}

/// Directed multigraph on nodes `0..n`. Each node carries a list of labels
/// (several after nodes are merged); one arc may be marked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct WeightedDigraph {
    labels: Vec<Vec<String>>,
    arcs: Vec<Arc>,
    marked_arc: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<NodeRecord>,
    arcs: Vec<Arc>,
    #[serde(default)]
    marked_arc: Option<usize>,
}

impl TryFrom<GraphFile> for WeightedDigraph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        for (i, node) in f.nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::Unsupported(format!("node ids must be 0..n in order, found {} at {i}", node.id)));
            }
        }
        let mut g = WeightedDigraph {
            labels: f.nodes.into_iter().map(|n| n.labels).collect(),
            arcs: Vec::new(),
            marked_arc: None,
        };
        for a in f.arcs {
            g.add_arc(a.tail, a.head, a.weight)?;
        }
        if let Some(id) = f.marked_arc {
            g.set_marked_arc(id)?;
        }
        Ok(g)
    }
}

impl From<WeightedDigraph> for GraphFile {
    fn from(g: WeightedDigraph) -> Self {
        GraphFile {
            nodes: g
                .labels
                .into_iter()
                .enumerate()
                .map(|(id, labels)| NodeRecord { id, labels })
                .collect(),
            arcs: g.arcs,
            marked_arc: g.marked_arc,
        }
    }
}

impl WeightedDigraph {
    /// Graph with `n` unlabeled nodes and no arcs.
    pub fn with_nodes(n: usize) -> Self {
        WeightedDigraph {
            labels: vec![Vec::new(); n],
            arcs: Vec::new(),
            marked_arc: None,
        }
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> usize {
        self.labels.push(vec![label.into()]);
        self.labels.len() - 1
    }

    pub fn add_label(&mut self, node: usize, label: impl Into<String>) {
        self.labels[node].push(label.into());
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, weight: Rational) -> Result<usize> {
        let n = self.node_count();
        if tail >= n || head >= n {
            return Err(Error::Unsupported(format!("arc ({tail}, {head}) references a node outside 0..{n}")));
        }
        self.arcs.push(Arc { tail, head, weight });
        Ok(self.arcs.len() - 1)
    }

    pub fn set_marked_arc(&mut self, id: usize) -> Result<()> {
        if id >= self.arcs.len() {
            return Err(Error::Unsupported(format!("marked arc {id} does not exist")));
        }
        self.marked_arc = Some(id);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> &Arc {
        &self.arcs[id]
    }

    pub fn labels(&self, node: usize) -> &[String] {
        &self.labels[node]
    }

    pub fn find_node(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|ls| ls.iter().any(|l| l == label))
    }

    pub fn marked_arc(&self) -> Option<usize> {
        self.marked_arc
    }

    /// Outgoing arc ids per node, in arc-id order.
    pub fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count()];
        for (id, a) in self.arcs.iter().enumerate() {
            out[a.tail].push(id);
        }
        out
    }

    /// Merges the nodes of each class into one node; the merged node keeps
    /// all labels, arcs keep their ids. Classes must be disjoint.
    pub fn identify(&self, classes: &[Vec<usize>]) -> Result<WeightedDigraph> {
        let n = self.node_count();
        let mut rep: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for class in classes {
            let Some(&root) = class.iter().min() else { continue };
            for &v in class {
                if v >= n || seen[v] {
                    return Err(Error::Unsupported(format!("node {v} is invalid or in two classes")));
                }
                seen[v] = true;
                rep[v] = root;
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut labels: Vec<Vec<String>> = Vec::new();
        for v in 0..n {
            if rep[v] == v {
                new_id[v] = labels.len();
                labels.push(Vec::new());
            }
        }
        for v in 0..n {
            let id = new_id[rep[v]];
            new_id[v] = id;
            labels[id].extend(self.labels[v].iter().cloned());
        }
        Ok(WeightedDigraph {
            labels,
            arcs: self
                .arcs
                .iter()
                .map(|a| Arc {
                    tail: new_id[a.tail],
                    head: new_id[a.head],
                    weight: a.weight.clone(),
                })
                .collect(),
            marked_arc: self.marked_arc,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

/// Simple directed cycle given by its arcs in traversal order, starting at
/// the arc leaving the smallest node on the cycle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cycle {
    pub arcs: Vec<usize>,
    pub weight: Rational,
}

impl Cycle {
    /// Checks that `arcs` form a closed walk in `g` that repeats no node and
    /// computes its weight.
    pub fn from_arcs(g: &WeightedDigraph, arcs: Vec<usize>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::Unsupported("empty cycle".into()));
        }
        let mut nodes = BTreeSet::new();
        for (i, &id) in arcs.iter().enumerate() {
            if id >= g.arc_count() {
                return Err(Error::Unsupported(format!("arc {id} does not exist")));
            }
            let next = arcs[(i + 1) % arcs.len()];
            if g.arc(id).head != g.arc(next).tail {
                return Err(Error::Unsupported(format!("arcs {id} and {next} are not consecutive")));
            }
            if !nodes.insert(g.arc(id).tail) {
                return Err(Error::Unsupported("cycle repeats a node".into()));
            }
        }
        let weight = arcs.iter().map(|&id| g.arc(id).weight.clone()).sum();
        Ok(Cycle { arcs, weight })
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains_arc(&self, id: usize) -> bool {
        self.arcs.contains(&id)
    }

    /// Nodes in traversal order.
    pub fn nodes(&self, g: &WeightedDigraph) -> Vec<usize> {
        self.arcs.iter().map(|&id| g.arc(id).tail).collect()
    }

    /// 0/1 vector over the arcs of a graph with `arc_count` arcs.
    pub fn indicator(&self, arc_count: usize) -> QVector {
        let mut v = QVector::zeros(arc_count);
        for &id in &self.arcs {
            v[id] = Rational::one();
        }
        v
    }
}

struct Search<'a> {
    g: &'a WeightedDigraph,
    out: Vec<Vec<usize>>,
    start: usize,
    blocked: Vec<bool>,
    blocked_by: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    found: Vec<Cycle>,
    cap: usize,
}

impl Search<'_> {
    fn unblock(&mut self, v: usize) {
        let mut todo = vec![v];
        while let Some(u) = todo.pop() {
            if self.blocked[u] {
                self.blocked[u] = false;
                todo.extend(std::mem::take(&mut self.blocked_by[u]));
            }
        }
    }

    fn circuit(&mut self, v: usize) -> Result<bool> {
        let mut closed = false;
        self.blocked[v] = true;
        for i in 0..self.out[v].len() {
            let id = self.out[v][i];
            let w = self.g.arc(id).head;
            if w < self.start {
                continue;
            }
            if w == self.start {
                self.stack.push(id);
                self.record()?;
                self.stack.pop();
                closed = true;
            } else if !self.blocked[w] {
                self.stack.push(id);
                if self.circuit(w)? {
                    closed = true;
                }
                self.stack.pop();
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for i in 0..self.out[v].len() {
                let w = self.g.arc(self.out[v][i]).head;
                if w >= self.start {
                    self.blocked_by[w].insert(v);
                }
            }
        }
        Ok(closed)
    }

    fn record(&mut self) -> Result<()> {
        if self.found.len() >= self.cap {
            return Err(Error::Resource {
                cap: "max_cycles",
                limit: self.cap as u128,
                required: self.cap as u128 + 1,
            });
        }
        let weight = self.stack.iter().map(|&id| self.g.arc(id).weight.clone()).sum();
        self.found.push(Cycle {
            arcs: self.stack.clone(),
            weight,
        });
        Ok(())
    }
}

/// All simple directed cycles of `g` (loops and cycles through parallel arcs
/// included), using Johnson's blocking search from each start node over the
/// nodes not smaller than it. Fails once more than `cap` cycles are found.
pub fn enumerate_cycles(g: &WeightedDigraph, cap: usize) -> Result<Vec<Cycle>> {
    let n = g.node_count();
    let mut s = Search {
        g,
        out: g.out_arcs(),
        start: 0,
        blocked: vec![false; n],
        blocked_by: vec![BTreeSet::new(); n],
        stack: Vec::new(),
        found: Vec::new(),
        cap,
    };
    for start in 0..n {
        s.start = start;
        for v in start..n {
            s.blocked[v] = false;
            s.blocked_by[v].clear();
        }
        s.circuit(start)?;
    }
    Ok(s.found)
}
