//! Named test instances and seeded random families.
//!
//! Every random generator takes an explicit RNG so callers stay
//! reproducible end to end.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{BoundaryComplex, BoundaryFace, Interface, NetworkEdge, SteklovNetwork};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two boundary vertices joined by a unit edge, unit masses.
pub fn p2() -> (SteklovNetwork, BoundaryComplex) {
    let net = SteklovNetwork::new(
        vec![true, true],
        vec![1.0, 1.0],
        vec![NetworkEdge { a: 0, b: 1, conductance: 1.0 }],
    );
    let c = BoundaryComplex::new(
        vec![1.0, 1.0],
        vec![Interface { a: 0, b: 1, weight: 1.0 }],
        vec![BoundaryFace { cell: 0, weight: 1.0 }, BoundaryFace { cell: 1, weight: 1.0 }],
    );
    (net, c)
}

/// Path u - m - v with unit conductances, boundary at the two ends,
/// and the matching three-cell complex with unit weights.
pub fn p3() -> (SteklovNetwork, BoundaryComplex) {
    let net = SteklovNetwork::new(
        vec![true, false, true],
        vec![1.0, 0.0, 1.0],
        vec![
            NetworkEdge { a: 0, b: 1, conductance: 1.0 },
            NetworkEdge { a: 1, b: 2, conductance: 1.0 },
        ],
    );
    let c = BoundaryComplex::new(
        vec![1.0, 1.0, 1.0],
        vec![
            Interface { a: 0, b: 1, weight: 1.0 },
            Interface { a: 1, b: 2, weight: 1.0 },
        ],
        vec![BoundaryFace { cell: 0, weight: 1.0 }, BoundaryFace { cell: 2, weight: 1.0 }],
    );
    (net, c)
}

/// Star with an interior hub (vertex 3) and three boundary leaves,
/// unit conductances and masses.
pub fn k13() -> SteklovNetwork {
    SteklovNetwork::new(
        vec![true, true, true, false],
        vec![1.0, 1.0, 1.0, 0.0],
        vec![
            NetworkEdge { a: 0, b: 3, conductance: 1.0 },
            NetworkEdge { a: 1, b: 3, conductance: 1.0 },
            NetworkEdge { a: 2, b: 3, conductance: 1.0 },
        ],
    )
}

/// Discrete interval of `edges` elements spanning `length`, boundary at the
/// two ends with unit masses. Element conductance is gamma / element_length
/// with unit gamma, so the first eigenvalue is 2 / length exactly (the first
/// eigenfunction is linear and piecewise-linear elements represent it
/// exactly).
pub fn path_network(edges: usize, length: f64) -> SteklovNetwork {
    assert!(edges >= 1 && length > 0.0);
    let n = edges + 1;
    let cond = edges as f64 / length;
    let mut boundary = vec![false; n];
    let mut mass = vec![0.0; n];
    boundary[0] = true;
    boundary[n - 1] = true;
    mass[0] = 1.0;
    mass[n - 1] = 1.0;
    let es = (0..edges)
        .map(|i| NetworkEdge { a: i, b: i + 1, conductance: cond })
        .collect();
    SteklovNetwork::new(boundary, mass, es)
}

/// Random connected network with `n` vertices: a random attachment tree plus
/// extra edges, weights in [0.1, 10], at least two boundary vertices.
pub fn random_connected_network(rng: &mut ChaCha8Rng, n: usize) -> SteklovNetwork {
    assert!(n >= 2);
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push(NetworkEdge { a: u, b: v, conductance: rng.gen_range(0.1..10.0) });
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            edges.push(NetworkEdge { a: key.0, b: key.1, conductance: rng.gen_range(0.1..10.0) });
        }
    }
    let mut boundary = vec![false; n];
    for b in boundary.iter_mut() {
        *b = rng.gen_bool(0.4);
    }
    // need at least two boundary vertices for a nontrivial spectrum
    let count = boundary.iter().filter(|&&b| b).count();
    if count < 2 {
        boundary[0] = true;
        boundary[n - 1] = true;
    }
    let mass = boundary
        .iter()
        .map(|&b| if b { rng.gen_range(0.1..10.0) } else { 0.0 })
        .collect();
    SteklovNetwork::new(boundary, mass, edges)
}

/// Random connected complex with `n` cells, positive weights in [0.1, 10],
/// at least one boundary face.
pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> BoundaryComplex {
    assert!(n >= 1);
    let volumes = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
    let mut interfaces = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        interfaces.push(Interface { a: u, b: v, weight: rng.gen_range(0.1..10.0) });
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            interfaces.push(Interface { a: key.0, b: key.1, weight: rng.gen_range(0.1..10.0) });
        }
    }
    let mut faces: Vec<BoundaryFace> = Vec::new();
    for cell in 0..n {
        if rng.gen_bool(0.5) {
            faces.push(BoundaryFace { cell, weight: rng.gen_range(0.1..10.0) });
        }
    }
    if faces.is_empty() {
        faces.push(BoundaryFace { cell: rng.gen_range(0..n), weight: rng.gen_range(0.1..10.0) });
    }
    BoundaryComplex::new(volumes, interfaces, faces)
}

/// Random network plus a complex over the same index space (cells are
/// vertices, interfaces are edges) with independently drawn measure weights;
/// boundary faces sit exactly at the boundary vertices.
pub fn random_graph_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (SteklovNetwork, BoundaryComplex) {
    let net = random_connected_network(rng, n);
    let volumes = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
    let interfaces = net
        .edges()
        .iter()
        .map(|e| Interface { a: e.a, b: e.b, weight: rng.gen_range(0.1..10.0) })
        .collect();
    let faces = (0..n)
        .filter(|&v| net.is_boundary(v))
        .map(|cell| BoundaryFace { cell, weight: rng.gen_range(0.1..10.0) })
        .collect();
    (net, BoundaryComplex::new(volumes, interfaces, faces))
}

/// Random nonnegative cell field with deliberate exact zeros and repeated
/// values, for exercising threshold deduplication.
pub fn random_nonnegative_field(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let pool: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..5.0)).collect();
    (0..n)
        .map(|_| match rng.gen_range(0..5u8) {
            0 => 0.0,
            1 => pool[rng.gen_range(0..pool.len())],
            _ => rng.gen_range(0.0..5.0),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{validate_complex, validate_network};

    #[test]
    fn named_instances_are_valid() {
        let (n2, c2) = p2();
        assert!(validate_network(&n2).is_empty());
        assert!(validate_complex(&c2).is_empty());
        let (n3, c3) = p3();
        assert!(validate_network(&n3).is_empty());
        assert!(validate_complex(&c3).is_empty());
        assert!(validate_network(&k13()).is_empty());
        assert!(validate_network(&path_network(10, 2.0)).is_empty());
    }

    #[test]
    fn random_families_are_valid_and_reproducible() {
        let mut r1 = rng(7);
        let mut r2 = rng(7);
        for _ in 0..20 {
            let n = r1.gen_range(3..=40);
            let net1 = random_connected_network(&mut r1, n);
            let m = r2.gen_range(3..=40);
            assert_eq!(n, m);
            let net2 = random_connected_network(&mut r2, m);
            assert_eq!(net1, net2);
            assert!(validate_network(&net1).is_empty(), "{}", validate_network(&net1));
        }
        let mut r = rng(11);
        for _ in 0..30 {
            let n = r.gen_range(1..=14);
            let c = random_complex(&mut r, n);
            assert!(validate_complex(&c).is_empty(), "{}", validate_complex(&c));
        }
    }
}
