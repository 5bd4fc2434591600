//! Quantum-dot cellular automata cell model and majority-gate circuits.
//!
//! A cell holds two double dots. The controlled pair carries the electron
//! amplitudes `a_T` (top) and `a_B` (bottom); the second pair tunnels freely.
//! `eta ∈ [0, 1]` couples the pairs: at `eta = 0` the state factorizes, at
//! `eta = 1` only the diagonal configurations `|TB>` (bit 0) and `|BT>`
//! (bit 1) survive.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::real::Real;

/// Dead zone around `P = 0` inside which no bit is read out.
pub const DEFAULT_P_THRESHOLD: f64 = 0.05;

pub const DEFAULT_TAU_D: f64 = 1.0;

/// The configurable AND/OR circuit: a majority gate whose third input `c`
/// is the control cell.
pub const FIG9_NETLIST: &str = "\
# configurable AND (c = 0) / OR (c = 1) gate
input a
input b
input c
maj m a b c
probe out m
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    /// Saturated polarization: `+1` for bit 0, `-1` for bit 1.
    pub fn polarization<T: Real>(self) -> T {
        match self {
            Bit::Zero => T::one(),
            Bit::One => -T::one(),
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcaCellState<T> {
    /// Top amplitude, the right dot of the driven pair.
    pub top: Complex<T>,
    /// Bottom amplitude, the left dot of the driven pair.
    pub bottom: Complex<T>,
    pub eta: T,
    pub tau_d: T,
}

impl<T: Real> QcaCellState<T> {
    pub fn new(top: Complex<T>, bottom: Complex<T>, eta: T, tau_d: T) -> Result<Self> {
        let cell = Self { top, bottom, eta, tau_d };
        cell.validate()?;
        Ok(cell)
    }

    /// Cell whose controlled electron sits fully in the dot encoding `bit`.
    pub fn localized(bit: Bit, eta: T, tau_d: T) -> Result<Self> {
        let (one, zero) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        match bit {
            Bit::Zero => Self::new(one, zero, eta, tau_d),
            Bit::One => Self::new(zero, one, eta, tau_d),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.top.norm_sqr() + self.bottom.norm_sqr();
        if !((norm - T::one()).abs() <= T::lit(1e-9)) {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        if !(self.eta >= T::zero() && self.eta <= T::one()) {
            return Err(Error::InvalidParameter("eta must lie in [0, 1]".into()));
        }
        if !(self.tau_d > T::zero() && self.tau_d.is_finite()) {
            return Err(Error::InvalidParameter("tau_d must be > 0".into()));
        }
        Ok(())
    }

    /// `exp(-tau_d eta / (1 - eta))`, taken as its limit 0 at `eta = 1`.
    pub fn decay(&self) -> T {
        if self.eta >= T::one() {
            T::zero()
        } else {
            (-self.tau_d * self.eta / (T::one() - self.eta)).exp()
        }
    }
}

/// Cell state on the basis `(|TT>, |TB>, |BT>, |BB>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKet<T> {
    pub tt: Complex<T>,
    pub tb: Complex<T>,
    pub bt: Complex<T>,
    pub bb: Complex<T>,
}

impl<T: Real> CellKet<T> {
    pub fn components(&self) -> [Complex<T>; 4] {
        [self.tt, self.tb, self.bt, self.bb]
    }

    pub fn norm_sqr(&self) -> T {
        self.components().iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }
}

/// With `w = exp(-tau_d eta / (1 - eta)) / 2` the coefficients are
/// `(sqrt(w) a_T, sqrt(1 - w) a_T, sqrt(1 - w) a_B, sqrt(w) a_B)`.
pub fn cell_ket<T: Real>(cell: &QcaCellState<T>) -> CellKet<T> {
    let w = T::lit(0.5) * cell.decay();
    let (same, cross) = (w.sqrt(), (T::one() - w).sqrt());
    CellKet { tt: cell.top * same, tb: cell.top * cross, bt: cell.bottom * cross, bb: cell.bottom * same }
}

/// `P = (|a_T|^2 - |a_B|^2) (1 - exp(-tau_d eta / (1 - eta)))`.
pub fn polarization<T: Real>(cell: &QcaCellState<T>) -> T {
    (cell.top.norm_sqr() - cell.bottom.norm_sqr()) * (T::one() - cell.decay())
}

/// Builds a cell from the last sample of a trajectory (`a_T = a_R`,
/// `a_B = a_L`), normalizing away any integrator drift.
pub fn cell_from_trajectory<T: Real>(traj: &Trajectory<T>, eta: T, tau_d: T) -> Result<QcaCellState<T>> {
    let amps = traj.last_amplitudes().ok_or(Error::EmptyTrajectory)?;
    let norm = amps.norm_sqr().sqrt();
    QcaCellState::new(amps.right / norm, amps.left / norm, eta, tau_d)
}

/// `P > threshold` reads bit 0, `P < -threshold` reads bit 1.
pub fn bit_from_polarization<T: Real>(p: T, threshold: T) -> Result<Bit> {
    if p > threshold {
        Ok(Bit::Zero)
    } else if p < -threshold {
        Ok(Bit::One)
    } else {
        Err(Error::IndeterminatePolarization { p: p.as_f64(), threshold: threshold.as_f64() })
    }
}

/// Majority vote of three cells, returned as a saturated polarization.
pub fn majority<T: Real>(a: T, b: T, c: T, threshold: T) -> Result<T> {
    let ones = [a, b, c]
        .into_iter()
        .map(|p| bit_from_polarization(p, threshold))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&b| b == Bit::One)
        .count();
    Ok(Bit::from(ones >= 2).polarization())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    InputCell,
    FixedCell(Bit),
    MajorityGate,
    OutputProbe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub inputs: Vec<String>,
}

/// Acyclic majority-gate circuit, kept in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl Netlist {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.as_str(), i).is_some() {
                return Err(Error::InvalidNetlist(format!("duplicate node id `{}`", node.id)));
            }
        }
        let mut graph = DiGraph::<usize, ()>::with_capacity(nodes.len(), nodes.len() * 3);
        let ix: Vec<NodeIndex> = (0..nodes.len()).map(|i| graph.add_node(i)).collect();
        for (i, node) in nodes.iter().enumerate() {
            let arity = match node.kind {
                NodeKind::InputCell | NodeKind::FixedCell(_) => 0,
                NodeKind::MajorityGate => 3,
                NodeKind::OutputProbe => 1,
            };
            if node.inputs.len() != arity {
                return Err(Error::InvalidNetlist(format!(
                    "node `{}` takes {arity} inputs, got {}",
                    node.id,
                    node.inputs.len()
                )));
            }
            for src in &node.inputs {
                let &j = index
                    .get(src.as_str())
                    .ok_or_else(|| Error::InvalidNetlist(format!("node `{}` reads unknown node `{src}`", node.id)))?;
                if nodes[j].kind == NodeKind::OutputProbe {
                    return Err(Error::InvalidNetlist(format!("node `{}` reads probe `{src}`", node.id)));
                }
                graph.add_edge(ix[j], ix[i], ());
            }
        }
        let order = toposort(&graph, None)
            .map_err(|cycle| Error::CycleDetected(nodes[graph[cycle.node_id()]].id.clone()))?
            .into_iter()
            .map(|n| graph[n])
            .collect();
        Ok(Self { nodes, order })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn input_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::InputCell).map(|n| n.id.as_str())
    }

    pub fn probe_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::OutputProbe).map(|n| n.id.as_str())
    }

    /// Evaluates every probe. Input cells and fixed cells are saturated; the
    /// input named by `control` takes the polarization of its cell instead.
    pub fn evaluate<T: Real>(
        &self,
        inputs: &HashMap<String, Bit>,
        control: Option<(&str, &QcaCellState<T>)>,
        threshold: T,
    ) -> Result<Vec<(String, Bit)>> {
        if let Some((id, _)) = control {
            if !self.input_ids().any(|i| i == id) {
                return Err(Error::InvalidNetlist(format!("control node `{id}` is not an input cell")));
            }
        }
        let mut value: HashMap<&str, T> = HashMap::with_capacity(self.nodes.len());
        let mut probes = BTreeMap::new();
        for &i in &self.order {
            let node = &self.nodes[i];
            let read = |k: usize| value[node.inputs[k].as_str()];
            let p = match node.kind {
                NodeKind::InputCell => match control {
                    Some((id, cell)) if id == node.id => polarization(cell),
                    _ => inputs.get(&node.id).ok_or_else(|| Error::UnassignedInput(node.id.clone()))?.polarization(),
                },
                NodeKind::FixedCell(bit) => bit.polarization(),
                NodeKind::MajorityGate => majority(read(0), read(1), read(2), threshold)?,
                NodeKind::OutputProbe => {
                    let p = read(0);
                    probes.insert(i, (node.id.clone(), bit_from_polarization(p, threshold)?));
                    p
                }
            };
            value.insert(node.id.as_str(), p);
        }
        Ok(probes.into_values().collect())
    }
}

impl FromStr for Netlist {
    type Err = Error;

    /// One node per line: `input <id>`, `fixed <id> <0|1>`,
    /// `maj <id> <in1> <in2> <in3>` or `probe <id> <in>`; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::NetlistSyntax { line: lineno + 1, msg };
            let words: Vec<&str> = line.split_whitespace().collect();
            let (kind, id, rest) = match words.as_slice() {
                [kind, id, rest @ ..] => (*kind, id.to_string(), rest),
                _ => return Err(err(format!("expected `<kind> <id> ...`, got `{line}`"))),
            };
            let expect = |n: usize| {
                if rest.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("`{kind}` expects {n} argument(s) after the id")))
                }
            };
            let node = match kind {
                "input" => {
                    expect(0)?;
                    Node { id, kind: NodeKind::InputCell, inputs: vec![] }
                }
                "fixed" => {
                    expect(1)?;
                    let bit = match rest[0] {
                        "0" => Bit::Zero,
                        "1" => Bit::One,
                        other => return Err(err(format!("fixed cell value must be 0 or 1, got `{other}`"))),
                    };
                    Node { id, kind: NodeKind::FixedCell(bit), inputs: vec![] }
                }
                "maj" => {
                    expect(3)?;
                    Node { id, kind: NodeKind::MajorityGate, inputs: rest.iter().map(|s| s.to_string()).collect() }
                }
                "probe" => {
                    expect(1)?;
                    Node { id, kind: NodeKind::OutputProbe, inputs: vec![rest[0].to_string()] }
                }
                other => return Err(err(format!("unknown node kind `{other}`"))),
            };
            nodes.push(node);
        }
        Netlist::new(nodes)
    }
}

/// One row of a truth table: the free input assignment and the probe bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRow {
    pub inputs: Vec<(String, Bit)>,
    pub outputs: Vec<(String, Bit)>,
}

/// Evaluates the circuit for every assignment of the inputs other than the
/// control node, in binary counting order of the declared inputs.
pub fn truth_table<T: Real>(
    netlist: &Netlist,
    control: Option<(&str, &QcaCellState<T>)>,
    threshold: T,
) -> Result<Vec<TruthRow>> {
    let free: Vec<&str> = netlist.input_ids().filter(|id| control.is_none_or(|(c, _)| c != *id)).collect();
    if free.len() > 20 {
        return Err(Error::InvalidNetlist(format!("{} free inputs is too many to enumerate", free.len())));
    }
    (0..1u32 << free.len())
        .map(|mask| {
            let assignment: Vec<(String, Bit)> = free
                .iter()
                .enumerate()
                .map(|(k, id)| (id.to_string(), Bit::from(mask >> (free.len() - 1 - k) & 1 == 1)))
                .collect();
            let inputs: HashMap<String, Bit> = assignment.iter().cloned().collect();
            let outputs = netlist.evaluate(&inputs, control, threshold)?;
            Ok(TruthRow { inputs: assignment, outputs })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    const T: f64 = DEFAULT_P_THRESHOLD;

    #[test]
    fn ket_at_decoupled_limit_factorizes() {
        let cell = QcaCellState::new(c(0.6), Complex::new(0.0, 0.8), 0.0, 3.0).unwrap();
        let ket = cell_ket(&cell);
        let s = FRAC_1_SQRT_2;
        let expected = [cell.top * s, cell.top * s, cell.bottom * s, cell.bottom * s];
        for (got, want) in ket.components().iter().zip(expected) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn ket_at_maximal_coupling_is_diagonal() {
        let cell = QcaCellState::new(c(0.6), c(0.8), 1.0, 1.0).unwrap();
        let ket = cell_ket(&cell);
        assert_eq!(ket.tt, c(0.0));
        assert_eq!(ket.bb, c(0.0));
        assert_eq!(ket.tb, c(0.6));
        assert_eq!(ket.bt, c(0.8));
    }

    #[test]
    fn ket_weight_at_half_coupling() {
        let cell = QcaCellState::new(c(1.0), c(0.0), 0.5, 1.0).unwrap();
        let ket = cell_ket(&cell);
        let w = 0.5 * (-1.0f64).exp();
        assert!((w - 0.183_939_720_585_721_2).abs() < 1e-15);
        assert!((ket.tt.re - w.sqrt()).abs() < 1e-15);
        assert!((ket.tb.re - (1.0 - w).sqrt()).abs() < 1e-15);
        assert_eq!(ket.bt, c(0.0));
        assert_eq!(ket.bb, c(0.0));
    }

    #[test]
    fn polarization_examples() {
        let up = QcaCellState::new(c(1.0), c(0.0), 1.0, 1.0).unwrap();
        assert_eq!(polarization(&up), 1.0);
        let decoupled = QcaCellState::new(c(0.6), c(0.8), 0.0, 1.0).unwrap();
        assert_eq!(polarization(&decoupled), 0.0);
        let half = QcaCellState::new(c(1.0), c(0.0), 0.5, 1.0).unwrap();
        assert!((polarization(&half) - 0.632_120_558_828_557_7).abs() < 1e-15);
    }

    #[test]
    fn cell_validation() {
        assert!(QcaCellState::new(c(1.0), c(1.0), 0.5, 1.0).is_err());
        assert!(QcaCellState::new(c(1.0), c(0.0), 1.5, 1.0).is_err());
        assert!(QcaCellState::new(c(1.0), c(0.0), 0.5, 0.0).is_err());
    }

    #[test]
    fn bit_readout() {
        assert_eq!(bit_from_polarization(1.0, T).unwrap(), Bit::Zero);
        assert_eq!(bit_from_polarization(-0.7, T).unwrap(), Bit::One);
        assert!(matches!(bit_from_polarization(0.0, T), Err(Error::IndeterminatePolarization { .. })));
        assert!(bit_from_polarization(0.05, T).is_err());
    }

    #[test]
    fn majority_examples() {
        let p = |b: u8| if b == 0 { 1.0 } else { -1.0 };
        assert_eq!(majority(p(0), p(0), p(1), T).unwrap(), 1.0);
        assert_eq!(majority(p(1), p(0), p(0), T).unwrap(), 1.0);
        assert_eq!(majority(p(1), p(0), p(1), T).unwrap(), -1.0);
        assert!(majority(p(1), 0.0, p(1), T).is_err());
    }

    #[test]
    fn netlist_parsing() {
        let net: Netlist = FIG9_NETLIST.parse().unwrap();
        assert_eq!(net.input_ids().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(net.probe_ids().collect::<Vec<_>>(), ["out"]);

        let forward: Netlist = "probe o m\nmaj m x y z # gate\ninput x\nfixed y 1\ninput z\n".parse().unwrap();
        assert_eq!(forward.nodes().len(), 5);

        let cases = [
            ("maj m a b\ninput a\ninput b", "arity"),
            ("input a\ninput a", "duplicate"),
            ("probe o q", "unknown"),
            ("fixed f 2", "bad bit"),
            ("gate g", "kind"),
            ("input a\nprobe p a\nprobe q p", "probe input"),
        ];
        for (text, why) in cases {
            assert!(text.parse::<Netlist>().is_err(), "{why}");
        }
        assert!(matches!("input x\nmaj m x n x\nmaj n x m x\n".parse::<Netlist>(), Err(Error::CycleDetected(_))));
        assert!(matches!("input\n".parse::<Netlist>(), Err(Error::NetlistSyntax { line: 1, .. })));
    }

    #[test]
    fn unassigned_input_detected() {
        let net: Netlist = FIG9_NETLIST.parse().unwrap();
        let inputs = HashMap::from([("a".to_string(), Bit::One)]);
        let cell = QcaCellState::localized(Bit::Zero, 1.0, 1.0).unwrap();
        assert!(matches!(
            net.evaluate(&inputs, Some(("c", &cell)), T),
            Err(Error::UnassignedInput(id)) if id == "b"
        ));
    }

    #[test]
    fn fixed_cells_pin_the_gate() {
        let net: Netlist = "input a\ninput b\nfixed c 0\nmaj m a b c\nprobe out m\n".parse().unwrap();
        let rows = truth_table::<f64>(&net, None, T).unwrap();
        let outs: Vec<u8> = rows.iter().map(|r| r.outputs[0].1.as_u8()).collect();
        assert_eq!(outs, [0, 0, 0, 1]);
    }
}
