//! JSON graph input: abstract instances supply both weight families
//! directly; cells coincide with vertices and interfaces with edges.
//!
//! Field names are fixed in docs/FORMATS.md; unknown fields are rejected.

use serde::{Deserialize, Serialize};

use crate::complex::{BoundaryComplex, BoundaryFace, Interface, NetworkEdge, SteklovNetwork};
use crate::complex::{validate_complex, validate_network, DiagnosticKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphInput {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphVertex {
    pub id: usize,
    pub boundary: bool,
    pub volume_weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_weight: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
    pub perimeter_weight: f64,
}

pub fn parse_graph(text: &str) -> Result<GraphInput> {
    serde_json::from_str(text).map_err(|e| Error::GraphInput(e.to_string()))
}

/// Repackages an annotated graph into the two carriers over a shared index
/// space: cell i is vertex i, interface j is edge j.
pub fn graph_to_pair(g: &GraphInput) -> Result<(SteklovNetwork, BoundaryComplex)> {
    let n = g.vertices.len();
    if n == 0 {
        return Err(Error::GraphInput("no vertices".into()));
    }
    let mut seen = vec![false; n];
    for v in &g.vertices {
        if v.id >= n {
            return Err(Error::GraphInput(format!(
                "vertex id {} out of range: ids must cover 0..{}",
                v.id,
                n - 1
            )));
        }
        if seen[v.id] {
            return Err(Error::GraphInput(format!("duplicate vertex id {}", v.id)));
        }
        seen[v.id] = true;
    }

    let mut boundary = vec![false; n];
    let mut mass = vec![0.0; n];
    let mut volumes = vec![0.0; n];
    let mut faces = Vec::new();
    let mut order: Vec<&GraphVertex> = g.vertices.iter().collect();
    order.sort_by_key(|v| v.id);
    for v in order {
        boundary[v.id] = v.boundary;
        volumes[v.id] = v.volume_weight;
        if v.boundary {
            match v.boundary_mass {
                Some(m) => mass[v.id] = m,
                None => {
                    return Err(Error::GraphInput(format!(
                        "boundary vertex {} is missing field boundary_mass",
                        v.id
                    )))
                }
            }
            match v.rho_weight {
                Some(w) => faces.push(BoundaryFace { cell: v.id, weight: w }),
                None => {
                    return Err(Error::GraphInput(format!(
                        "boundary vertex {} is missing field rho_weight",
                        v.id
                    )))
                }
            }
        } else {
            if v.boundary_mass.is_some() {
                return Err(Error::GraphInput(format!(
                    "interior vertex {} must not carry boundary_mass",
                    v.id
                )));
            }
            if v.rho_weight.is_some() {
                return Err(Error::GraphInput(format!(
                    "interior vertex {} must not carry rho_weight",
                    v.id
                )));
            }
        }
    }

    let mut edges = Vec::with_capacity(g.edges.len());
    let mut interfaces = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        edges.push(NetworkEdge { a: e.a, b: e.b, conductance: e.conductance });
        interfaces.push(Interface { a: e.a, b: e.b, weight: e.perimeter_weight });
    }

    let net = SteklovNetwork::new(boundary, mass, edges);
    let c = BoundaryComplex::new(volumes, interfaces, faces);
    validate_network(&net).into_result(DiagnosticKind::Network)?;
    validate_complex(&c).into_result(DiagnosticKind::Complex)?;
    Ok((net, c))
}

/// The P3 instance as a graph document (unit weights everywhere).
pub fn p3_document() -> GraphInput {
    GraphInput {
        vertices: vec![
            GraphVertex {
                id: 0,
                boundary: true,
                volume_weight: 1.0,
                boundary_mass: Some(1.0),
                rho_weight: Some(1.0),
            },
            GraphVertex {
                id: 1,
                boundary: false,
                volume_weight: 1.0,
                boundary_mass: None,
                rho_weight: None,
            },
            GraphVertex {
                id: 2,
                boundary: true,
                volume_weight: 1.0,
                boundary_mass: Some(1.0),
                rho_weight: Some(1.0),
            },
        ],
        edges: vec![
            GraphEdge { a: 0, b: 1, conductance: 1.0, perimeter_weight: 1.0 },
            GraphEdge { a: 1, b: 2, conductance: 1.0, perimeter_weight: 1.0 },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn p3_document_round_trips_to_the_p3_pair() {
        let (net, c) = graph_to_pair(&p3_document()).unwrap();
        let (net_ref, c_ref) = instances::p3();
        assert_eq!(net, net_ref);
        assert_eq!(c, c_ref);
    }

    #[test]
    fn p2_document_builds_two_cells_one_interface() {
        let g = GraphInput {
            vertices: vec![
                GraphVertex {
                    id: 0,
                    boundary: true,
                    volume_weight: 1.0,
                    boundary_mass: Some(1.0),
                    rho_weight: Some(1.0),
                },
                GraphVertex {
                    id: 1,
                    boundary: true,
                    volume_weight: 1.0,
                    boundary_mass: Some(1.0),
                    rho_weight: Some(1.0),
                },
            ],
            edges: vec![GraphEdge { a: 0, b: 1, conductance: 1.0, perimeter_weight: 1.0 }],
        };
        let (net, c) = graph_to_pair(&g).unwrap();
        assert_eq!(net.vertex_count(), c.cell_count());
        assert_eq!(net.edges().len(), c.interfaces().len());
        assert_eq!(c.interfaces().len(), 1);
    }

    #[test]
    fn missing_rho_weight_is_rejected_by_name() {
        let mut g = p3_document();
        g.vertices[2].rho_weight = None;
        let err = graph_to_pair(&g).unwrap_err().to_string();
        assert!(err.contains("rho_weight"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"vertices": [{"id": 0, "boundary": true, "volume_weight": 1.0,
            "boundary_mass": 1.0, "rho_weight": 1.0, "color": "red"}], "edges": []}"#;
        assert!(parse_graph(text).is_err());
    }

    #[test]
    fn index_spaces_match() {
        let mut rng = instances::rng(3);
        for _ in 0..10 {
            use rand::Rng;
            let n = rng.gen_range(2..=12);
            let net = instances::random_connected_network(&mut rng, n);
            // round-trip through a document
            let g = GraphInput {
                vertices: (0..n)
                    .map(|v| GraphVertex {
                        id: v,
                        boundary: net.is_boundary(v),
                        volume_weight: 1.0,
                        boundary_mass: net.is_boundary(v).then(|| net.boundary_mass(v)),
                        rho_weight: net.is_boundary(v).then_some(1.0),
                    })
                    .collect(),
                edges: net
                    .edges()
                    .iter()
                    .map(|e| GraphEdge {
                        a: e.a,
                        b: e.b,
                        conductance: e.conductance,
                        perimeter_weight: 1.0,
                    })
                    .collect(),
            };
            let (net2, c2) = graph_to_pair(&g).unwrap();
            assert_eq!(net2.vertex_count(), c2.cell_count());
            assert_eq!(net2.edges().len(), c2.interfaces().len());
            assert_eq!(net, net2);
        }
    }
}
