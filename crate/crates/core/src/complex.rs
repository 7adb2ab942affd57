//! The two discrete carriers of the geometry: the energy side
//! ([`SteklovNetwork`]) and the measure side ([`BoundaryComplex`]),
//! together with validation, metric scaling, and the ambient dimension
//! used by the scaling laws.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weighted graph carrying the Dirichlet energy (edge conductances) and
/// the boundary mass pairing (per boundary vertex).
///
/// Conductances discretize the interior density times the metric; boundary
/// masses discretize the boundary density. Units: conductance carries
/// gamma * length^(n-2), boundary mass carries rho * length^(n-1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteklovNetwork {
    boundary: Vec<bool>,
    /// Mass per vertex; zero on interior vertices.
    boundary_mass: Vec<f64>,
    edges: Vec<NetworkEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
}

impl SteklovNetwork {
    /// `boundary_mass[v]` must be zero exactly where `boundary[v]` is false.
    pub fn new(boundary: Vec<bool>, boundary_mass: Vec<f64>, edges: Vec<NetworkEdge>) -> Self {
        assert_eq!(boundary.len(), boundary_mass.len());
        Self { boundary, boundary_mass, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    /// Boundary vertex ids in ascending order.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.boundary[v]).collect()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.boundary[v]).collect()
    }

    pub fn boundary_mass(&self, v: usize) -> f64 {
        self.boundary_mass[v]
    }

    pub fn edges(&self) -> &[NetworkEdge] {
        &self.edges
    }

    /// Dirichlet energy sum of conductance * (f_a - f_b)^2, in edge order.
    pub fn energy(&self, f: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let d = f[e.a] - f[e.b];
                e.conductance * d * d
            })
            .sum()
    }

    /// Boundary mass form: sum of mass_b * f_b^2 over boundary vertices.
    pub fn boundary_form(&self, f: &[f64]) -> f64 {
        (0..self.vertex_count())
            .filter(|&v| self.boundary[v])
            .map(|v| self.boundary_mass[v] * f[v] * f[v])
            .sum()
    }
}

/// Cell complex carrying the measures: cell volumes, interface perimeter
/// weights, and exterior boundary faces with their rho weights.
///
/// Units: volume carries gamma * length^n, perimeter carries
/// gamma * length^(n-1), rho weight carries rho * length^(n-1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComplex {
    cell_volumes: Vec<f64>,
    interfaces: Vec<Interface>,
    boundary_faces: Vec<BoundaryFace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFace {
    pub cell: usize,
    pub weight: f64,
}

impl BoundaryComplex {
    pub fn new(
        cell_volumes: Vec<f64>,
        interfaces: Vec<Interface>,
        boundary_faces: Vec<BoundaryFace>,
    ) -> Self {
        Self { cell_volumes, interfaces, boundary_faces }
    }

    pub fn cell_count(&self) -> usize {
        self.cell_volumes.len()
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.cell_volumes[c]
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    pub fn total_volume(&self) -> f64 {
        self.cell_volumes.iter().sum()
    }

    pub fn total_boundary(&self) -> f64 {
        self.boundary_faces.iter().map(|f| f.weight).sum()
    }

    /// Per-cell adjacency as (interface index, other cell) lists.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.cell_count()];
        for (i, f) in self.interfaces.iter().enumerate() {
            adj[f.a].push((i, f.b));
            adj[f.b].push((i, f.a));
        }
        adj
    }

    /// Per-cell total rho weight (a cell may carry several faces).
    pub fn cell_boundary_weight(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.cell_count()];
        for f in &self.boundary_faces {
            w[f.cell] += f.weight;
        }
        w
    }
}

/// Ambient dimension for the scaling laws of the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::GraphInput("dimension must be at least 1".into()));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// A single validation failure, naming the offending element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    NoVertices,
    NoBoundaryVertex,
    NonpositiveConductance { a: usize, b: usize, value: f64 },
    NonpositiveMass { vertex: usize, value: f64 },
    MassOnInteriorVertex { vertex: usize },
    SelfLoop { vertex: usize },
    DuplicateEdge { a: usize, b: usize },
    EdgeOutOfRange { a: usize, b: usize },
    Disconnected { components: usize },
    NoCells,
    NonpositiveTotalVolume { total: f64 },
    NegativeVolume { cell: usize, value: f64 },
    NegativeInterfaceWeight { a: usize, b: usize, value: f64 },
    NegativeFaceWeight { cell: usize, value: f64 },
    NoExteriorBoundary { total: f64 },
    DanglingInterface { a: usize, b: usize },
    DanglingFace { cell: usize },
    DuplicateInterface { a: usize, b: usize },
    InterfaceSelfLoop { cell: usize },
    NonFiniteWeight { what: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoVertices => write!(f, "network has no vertices"),
            NoBoundaryVertex => write!(f, "no boundary vertex"),
            NonpositiveConductance { a, b, value } => {
                write!(f, "nonpositive conductance {value} on edge ({a},{b})")
            }
            NonpositiveMass { vertex, value } => {
                write!(f, "nonpositive boundary mass {value} on vertex {vertex}")
            }
            MassOnInteriorVertex { vertex } => {
                write!(f, "interior vertex {vertex} carries a boundary mass")
            }
            SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            DuplicateEdge { a, b } => write!(f, "duplicate edge ({a},{b})"),
            EdgeOutOfRange { a, b } => write!(f, "edge ({a},{b}) references a missing vertex"),
            Disconnected { components } => {
                write!(f, "disconnected: {components} components")
            }
            NoCells => write!(f, "complex has no cells"),
            NonpositiveTotalVolume { total } => {
                write!(f, "nonpositive total volume {total}")
            }
            NegativeVolume { cell, value } => {
                write!(f, "negative volume {value} on cell {cell}")
            }
            NegativeInterfaceWeight { a, b, value } => {
                write!(f, "negative perimeter weight {value} on interface ({a},{b})")
            }
            NegativeFaceWeight { cell, value } => {
                write!(f, "negative rho weight {value} on a face of cell {cell}")
            }
            NoExteriorBoundary { total } => {
                write!(f, "no exterior boundary: total rho weight {total}")
            }
            DanglingInterface { a, b } => {
                write!(f, "interface ({a},{b}) references a missing cell")
            }
            DanglingFace { cell } => write!(f, "boundary face references missing cell {cell}"),
            DuplicateInterface { a, b } => write!(f, "duplicate interface ({a},{b})"),
            InterfaceSelfLoop { cell } => write!(f, "interface from cell {cell} to itself"),
            NonFiniteWeight { what } => write!(f, "non-finite weight: {what}"),
        }
    }
}

/// List of violations; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics(pub Vec<Violation>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_result(self, kind: DiagnosticKind) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(match kind {
                DiagnosticKind::Network => Error::InvalidNetwork(self),
                DiagnosticKind::Complex => Error::InvalidComplex(self),
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum DiagnosticKind {
    Network,
    Complex,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn connected_components(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> usize {
    // union-find
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in pairs {
        if a < n && b < n {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}

/// Checks every network invariant; an empty list means the network is valid.
pub fn validate_network(net: &SteklovNetwork) -> Diagnostics {
    let mut out = Vec::new();
    let n = net.vertex_count();
    if n == 0 {
        out.push(Violation::NoVertices);
        return Diagnostics(out);
    }
    if !net.boundary.iter().any(|&b| b) {
        out.push(Violation::NoBoundaryVertex);
    }
    for v in 0..n {
        let m = net.boundary_mass[v];
        if net.boundary[v] {
            if !(m > 0.0) {
                out.push(Violation::NonpositiveMass { vertex: v, value: m });
            }
            if !m.is_finite() {
                out.push(Violation::NonFiniteWeight { what: format!("mass on vertex {v}") });
            }
        } else if m != 0.0 {
            out.push(Violation::MassOnInteriorVertex { vertex: v });
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for e in &net.edges {
        if e.a >= n || e.b >= n {
            out.push(Violation::EdgeOutOfRange { a: e.a, b: e.b });
            continue;
        }
        if e.a == e.b {
            out.push(Violation::SelfLoop { vertex: e.a });
            continue;
        }
        let key = (e.a.min(e.b), e.a.max(e.b));
        if !seen.insert(key) {
            out.push(Violation::DuplicateEdge { a: key.0, b: key.1 });
        }
        if !(e.conductance > 0.0) {
            out.push(Violation::NonpositiveConductance { a: e.a, b: e.b, value: e.conductance });
        }
        if !e.conductance.is_finite() {
            out.push(Violation::NonFiniteWeight { what: format!("conductance on edge ({},{})", e.a, e.b) });
        }
    }
    let comps = connected_components(
        n,
        net.edges.iter().filter(|e| e.a < n && e.b < n).map(|e| (e.a, e.b)),
    );
    if comps > 1 {
        out.push(Violation::Disconnected { components: comps });
    }
    Diagnostics(out)
}

/// Checks every complex invariant; an empty list means the complex is valid.
pub fn validate_complex(c: &BoundaryComplex) -> Diagnostics {
    let mut out = Vec::new();
    let n = c.cell_count();
    if n == 0 {
        out.push(Violation::NoCells);
        return Diagnostics(out);
    }
    for (cell, &v) in c.cell_volumes.iter().enumerate() {
        if v < 0.0 {
            out.push(Violation::NegativeVolume { cell, value: v });
        }
        if !v.is_finite() {
            out.push(Violation::NonFiniteWeight { what: format!("volume of cell {cell}") });
        }
    }
    let total = c.total_volume();
    if !(total > 0.0) {
        out.push(Violation::NonpositiveTotalVolume { total });
    }
    let mut seen = std::collections::BTreeSet::new();
    for f in &c.interfaces {
        if f.a >= n || f.b >= n {
            out.push(Violation::DanglingInterface { a: f.a, b: f.b });
            continue;
        }
        if f.a == f.b {
            out.push(Violation::InterfaceSelfLoop { cell: f.a });
            continue;
        }
        let key = (f.a.min(f.b), f.a.max(f.b));
        if !seen.insert(key) {
            out.push(Violation::DuplicateInterface { a: key.0, b: key.1 });
        }
        if f.weight < 0.0 {
            out.push(Violation::NegativeInterfaceWeight { a: f.a, b: f.b, value: f.weight });
        }
        if !f.weight.is_finite() {
            out.push(Violation::NonFiniteWeight { what: format!("interface ({},{})", f.a, f.b) });
        }
    }
    for f in &c.boundary_faces {
        if f.cell >= n {
            out.push(Violation::DanglingFace { cell: f.cell });
            continue;
        }
        if f.weight < 0.0 {
            out.push(Violation::NegativeFaceWeight { cell: f.cell, value: f.weight });
        }
        if !f.weight.is_finite() {
            out.push(Violation::NonFiniteWeight { what: format!("face on cell {}", f.cell) });
        }
    }
    let bnd_total = c.total_boundary();
    if !(bnd_total > 0.0) {
        out.push(Violation::NoExteriorBoundary { total: bnd_total });
    }
    let comps = connected_components(
        n,
        c.interfaces.iter().filter(|f| f.a < n && f.b < n).map(|f| (f.a, f.b)),
    );
    if comps > 1 {
        out.push(Violation::Disconnected { components: comps });
    }
    Diagnostics(out)
}

/// Multiplies the metric by lambda^2 in dimension n: conductances scale by
/// lambda^(n-2), boundary masses and all (n-1)-dimensional weights by
/// lambda^(n-1), volumes by lambda^n. Downstream, sigma_1 and h are divided
/// by lambda and h' is unchanged.
pub fn scale_metric(
    net: &SteklovNetwork,
    c: &BoundaryComplex,
    lambda: f64,
    dim: Dimension,
) -> Result<(SteklovNetwork, BoundaryComplex)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonpositiveScale(lambda));
    }
    let n = dim.get() as i32;
    let f_cond = lambda.powi(n - 2);
    let f_area = lambda.powi(n - 1);
    let f_vol = lambda.powi(n);

    let net2 = SteklovNetwork {
        boundary: net.boundary.clone(),
        boundary_mass: net.boundary_mass.iter().map(|&m| m * f_area).collect(),
        edges: net
            .edges
            .iter()
            .map(|e| NetworkEdge { a: e.a, b: e.b, conductance: e.conductance * f_cond })
            .collect(),
    };
    let c2 = BoundaryComplex {
        cell_volumes: c.cell_volumes.iter().map(|&v| v * f_vol).collect(),
        interfaces: c
            .interfaces
            .iter()
            .map(|f| Interface { a: f.a, b: f.b, weight: f.weight * f_area })
            .collect(),
        boundary_faces: c
            .boundary_faces
            .iter()
            .map(|f| BoundaryFace { cell: f.cell, weight: f.weight * f_area })
            .collect(),
    };
    Ok((net2, c2))
}
