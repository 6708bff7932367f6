use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{contract, QhamError, Result};
use crate::simcore::{Circuit, Gate, Instruction, RusBlock};

const MELBOURNE_JSON: &str = include_str!("../../data/melbourne.json");

/// Undirected hardware connectivity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingMap {
    pub qubits: usize,
    pub edges: Vec<[usize; 2]>,
}

impl CouplingMap {
    pub fn new(qubits: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let map = CouplingMap { qubits, edges };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<()> {
        for &[a, b] in &self.edges {
            if a >= self.qubits || b >= self.qubits {
                return Err(contract(format!("edge [{a}, {b}] outside a {}-qubit map", self.qubits)));
            }
            if a == b {
                return Err(contract(format!("self-loop on qubit {a}")));
            }
        }
        Ok(())
    }

    /// Qubits `0 - 1 - … - (k−1)`.
    pub fn line(k: usize) -> Self {
        CouplingMap { qubits: k, edges: (1..k).map(|i| [i - 1, i]).collect() }
    }

    pub fn full(k: usize) -> Self {
        let edges = (0..k).flat_map(|a| (a + 1..k).map(move |b| [a, b])).collect();
        CouplingMap { qubits: k, edges }
    }

    /// The bundled 15-qubit Melbourne layout.
    pub fn melbourne() -> Self {
        Self::from_json(MELBOURNE_JSON).expect("bundled coupling map is valid")
    }

    /// Parses `{"qubits": k, "edges": [[a, b], …]}`; other keys are ignored.
    pub fn from_json(json: &str) -> Result<Self> {
        let map: CouplingMap = serde_json::from_str(json)
            .map_err(|e| QhamError::Config { path: "coupling_map".into(), message: e.to_string() })?;
        map.validate()?;
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QhamError::Config { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|&[x, y]| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// Neighbours of `q` in ascending order.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&[a, b]| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn max_degree(&self) -> usize {
        (0..self.qubits).map(|q| self.neighbors(q).len()).max().unwrap_or(0)
    }

    /// A breadth-first shortest path from `from` to `to`, both included.
    /// Ties go to the lowest-numbered neighbour.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let adj: Vec<Vec<usize>> = (0..self.qubits).map(|q| self.neighbors(q)).collect();
        let mut prev = vec![usize::MAX; self.qubits];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(q) = queue.pop_front() {
            if q == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &nb in &adj[q] {
                if prev[nb] == usize::MAX {
                    prev[nb] = q;
                    queue.push_back(nb);
                }
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        self.qubits <= 1 || (1..self.qubits).all(|q| self.shortest_path(0, q).is_some())
    }
}

/// A routed circuit on the map's qubits. `permutation[l]` is the physical
/// qubit holding logical qubit `l` at the end of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    pub permutation: Vec<usize>,
}

fn swap_cnots(a: usize, b: usize, out: &mut Vec<Gate>) {
    out.push(Gate::cnot(a, b));
    out.push(Gate::cnot(b, a));
    out.push(Gate::cnot(a, b));
}

fn route_gates(gates: &[Gate], map: &CouplingMap) -> Result<Vec<Gate>> {
    let mut out = Vec::with_capacity(gates.len());
    for g in gates {
        match *g {
            Gate::Cnot { control, target } if !map.has_edge(control, target) => {
                let path = map
                    .shortest_path(control, target)
                    .ok_or_else(|| QhamError::Routing(format!("no path between {control} and {target}")))?;
                // walk the control along the path until it sits next to the target
                let hops = &path[..path.len() - 1];
                for w in hops.windows(2) {
                    swap_cnots(w[0], w[1], &mut out);
                }
                out.push(Gate::cnot(hops[hops.len() - 1], target));
                for w in hops.windows(2).rev() {
                    swap_cnots(w[0], w[1], &mut out);
                }
            }
            Gate::Cnot { .. } => out.push(*g),
            _ if g.arity() == 2 => {
                return Err(contract(format!("route expects a basis circuit, found {g}")));
            }
            _ => out.push(*g),
        }
    }
    Ok(out)
}

/// Naive shortest-path SWAP insertion. Every non-adjacent CNOT is wrapped in
/// SWAP chains (as CNOT triples) that are undone right after it, so the
/// layout after each gate is the identity again.
pub fn route(circuit: &Circuit, map: &CouplingMap) -> Result<RoutedCircuit> {
    map.validate()?;
    if circuit.qubit_count() > map.qubits {
        return Err(QhamError::Routing(format!(
            "circuit needs {} qubits, map has {}",
            circuit.qubit_count(),
            map.qubits
        )));
    }
    if !map.is_connected() {
        return Err(QhamError::Routing("coupling map is disconnected".into()));
    }
    let mut out = Circuit::new(map.qubits, circuit.cbit_count());
    for ins in circuit.instructions() {
        match ins {
            Instruction::Gate(g) => {
                out.extend(route_gates(std::slice::from_ref(g), map)?)?;
            }
            Instruction::RepeatUntilSuccess(b) => {
                out.push_rus(RusBlock {
                    body: route_gates(&b.body, map)?,
                    flag: b.flag,
                    recovery: route_gates(&b.recovery, map)?,
                    max_attempts: b.max_attempts,
                })?;
            }
        }
    }
    Ok(RoutedCircuit { circuit: out, permutation: (0..map.qubits).collect() })
}
