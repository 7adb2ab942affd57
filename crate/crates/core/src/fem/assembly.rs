//! P1 assembly of a mesh into the two carriers: the stiffness form as a
//! network (cotangent conductances, lumped boundary mass) and the measure
//! complex (cells are triangles, interfaces are interior edges, boundary
//! faces are boundary edges).

use std::collections::BTreeMap;

use crate::complex::{BoundaryComplex, BoundaryFace, Interface, NetworkEdge, SteklovNetwork};
use crate::error::{Error, Result};
use crate::fem::mesh::{Topology, TriangleMesh};

/// Cotangent stiffness with per-triangle gamma, boundary mass lumped per
/// boundary edge (rho * length / 2 onto each endpoint).
///
/// Edges whose accumulated conductance is zero up to rounding (right-angle
/// cancellation) are dropped; they contribute nothing to the quadratic form.
/// A genuinely negative accumulation signals an obtuse mesh and is an error,
/// since the network abstraction requires positive conductances. The
/// generators in this crate only emit meshes that pass.
pub fn assemble_p1(mesh: &TriangleMesh) -> Result<SteklovNetwork> {
    let topo = mesh.topology()?;
    assemble_p1_with(mesh, &topo)
}

pub fn assemble_p1_with(mesh: &TriangleMesh, topo: &Topology) -> Result<SteklovNetwork> {
    let mut conductance: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        let g = mesh.gamma()[t];
        for e in 0..3 {
            // edge (j, k) opposite vertex i: contribution gamma cot(i) / 2
            let i = tri[e];
            let j = tri[(e + 1) % 3];
            let k = tri[(e + 2) % 3];
            let pi = mesh.coords()[i];
            let pj = mesh.coords()[j];
            let pk = mesh.coords()[k];
            let dot = (pj[0] - pi[0]) * (pk[0] - pi[0]) + (pj[1] - pi[1]) * (pk[1] - pi[1]);
            let w = g * dot / (4.0 * area);
            let (cj, ck) = (topo.canon[j], topo.canon[k]);
            *conductance.entry((cj.min(ck), cj.max(ck))).or_insert(0.0) += w;
        }
    }
    let max_abs = conductance.values().fold(0.0f64, |acc, &c| acc.max(c.abs()));
    let drop_tol = 1e-12 * max_abs;
    let mut edges = Vec::with_capacity(conductance.len());
    for (&(a, b), &c) in &conductance {
        if c.abs() <= drop_tol {
            continue;
        }
        if c < 0.0 {
            return Err(Error::Mesh(format!(
                "negative accumulated conductance {c} on edge ({a},{b}): obtuse triangles"
            )));
        }
        edges.push(NetworkEdge { a, b, conductance: c });
    }

    let n = topo.canon_count;
    let mut boundary = vec![false; n];
    let mut mass = vec![0.0; n];
    for be in &topo.boundary_edges {
        let half = be.rho * be.length / 2.0;
        boundary[be.canon.0] = true;
        boundary[be.canon.1] = true;
        mass[be.canon.0] += half;
        mass[be.canon.1] += half;
    }
    Ok(SteklovNetwork::new(boundary, mass, edges))
}

/// Measure side of a mesh: volume is area times gamma, interfaces carry
/// length times the mean of the adjacent gammas, boundary faces carry
/// length times rho.
pub fn mesh_to_complex(mesh: &TriangleMesh) -> Result<BoundaryComplex> {
    let topo = mesh.topology()?;
    mesh_to_complex_with(mesh, &topo)
}

pub fn mesh_to_complex_with(mesh: &TriangleMesh, topo: &Topology) -> Result<BoundaryComplex> {
    let volumes: Vec<f64> = (0..mesh.triangle_count())
        .map(|t| mesh.triangle_area(t) * mesh.gamma()[t])
        .collect();
    let mut interfaces = Vec::new();
    for (key, ts) in &topo.edge_triangles {
        if ts.len() == 2 {
            let (i, j) = topo.edge_source[key];
            let len = mesh.edge_length(i, j);
            let g = 0.5 * (mesh.gamma()[ts[0]] + mesh.gamma()[ts[1]]);
            interfaces.push(Interface { a: ts[0].min(ts[1]), b: ts[0].max(ts[1]), weight: len * g });
        }
    }
    let faces = topo
        .boundary_edges
        .iter()
        .map(|be| BoundaryFace { cell: be.triangle, weight: be.length * be.rho })
        .collect();
    Ok(BoundaryComplex::new(volumes, interfaces, faces))
}

/// Transfers a canonical vertex field to cells by averaging the three vertex
/// values of each triangle.
pub fn cell_average_field(mesh: &TriangleMesh, topo: &Topology, vertex_field: &[f64]) -> Vec<f64> {
    mesh.triangles()
        .iter()
        .map(|tri| {
            tri.iter().map(|&v| vertex_field[topo.canon[v]]).sum::<f64>() / 3.0
        })
        .collect()
}

/// Assigns each triangle to a block of an `nbx` by `nby` grid over the
/// bounding box of the centroids, then densifies block ids (empty blocks
/// vanish). Block boundaries follow mesh lines on the structured generators.
pub fn grid_blocks(mesh: &TriangleMesh, nbx: usize, nby: usize) -> Vec<usize> {
    assert!(nbx >= 1 && nby >= 1);
    let centroids: Vec<[f64; 2]> =
        (0..mesh.triangle_count()).map(|t| mesh.triangle_centroid(t)).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for c in &centroids {
        x0 = x0.min(c[0]);
        x1 = x1.max(c[0]);
        y0 = y0.min(c[1]);
        y1 = y1.max(c[1]);
    }
    let wx = (x1 - x0).max(f64::MIN_POSITIVE);
    let wy = (y1 - y0).max(f64::MIN_POSITIVE);
    let raw: Vec<usize> = centroids
        .iter()
        .map(|c| {
            let bx = (((c[0] - x0) / wx * nbx as f64) as usize).min(nbx - 1);
            let by = (((c[1] - y0) / wy * nby as f64) as usize).min(nby - 1);
            by * nbx + bx
        })
        .collect();
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    for &b in &raw {
        let next = remap.len();
        remap.entry(b).or_insert(next);
    }
    raw.iter().map(|b| remap[b]).collect()
}

/// Aggregates a complex along a cell-to-block map: volumes and face weights
/// add up per block, interfaces between distinct blocks add up, interfaces
/// inside a block vanish.
pub fn coarsen_complex(fine: &BoundaryComplex, block_of_cell: &[usize]) -> BoundaryComplex {
    assert_eq!(block_of_cell.len(), fine.cell_count());
    let blocks = block_of_cell.iter().copied().max().map_or(0, |m| m + 1);
    let mut volumes = vec![0.0; blocks];
    for cell in 0..fine.cell_count() {
        volumes[block_of_cell[cell]] += fine.cell_volume(cell);
    }
    let mut interfaces: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for f in fine.interfaces() {
        let (a, b) = (block_of_cell[f.a], block_of_cell[f.b]);
        if a != b {
            *interfaces.entry((a.min(b), a.max(b))).or_insert(0.0) += f.weight;
        }
    }
    let mut face_weight = vec![0.0; blocks];
    for f in fine.boundary_faces() {
        face_weight[block_of_cell[f.cell]] += f.weight;
    }
    BoundaryComplex::new(
        volumes,
        interfaces
            .into_iter()
            .map(|((a, b), weight)| Interface { a, b, weight })
            .collect(),
        face_weight
            .into_iter()
            .enumerate()
            .filter(|&(_, w)| w > 0.0)
            .map(|(cell, weight)| BoundaryFace { cell, weight })
            .collect(),
    )
}

/// CSV of a vertex field over the original vertices: vertex_id,x,y,value.
pub fn vertex_field_csv(mesh: &TriangleMesh, topo: &Topology, field: &[f64]) -> String {
    let mut out = String::from("vertex_id,x,y,value\n");
    for (v, p) in mesh.coords().iter().enumerate() {
        out.push_str(&format!("{},{},{},{}\n", v, p[0], p[1], field[topo.canon[v]]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{validate_complex, validate_network};
    use crate::fem::generators::*;

    fn unit_square_mesh() -> TriangleMesh {
        make_rectangle(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn single_right_triangle_stiffness() {
        let coords = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut mesh = TriangleMesh::new(
            coords,
            vec![[0, 1, 2]],
            vec![1.0],
            BTreeMap::new(),
            vec![],
        );
        mesh.fill_default_rho().unwrap();
        let net = assemble_p1(&mesh).unwrap();
        // the hypotenuse cancels; the two legs carry 1/2 each
        assert_eq!(net.edges().len(), 2);
        for e in net.edges() {
            assert!((e.conductance - 0.5).abs() < 1e-15);
        }
        // row sums vanish: energy of constants is zero
        assert_eq!(net.energy(&[3.0, 3.0, 3.0]), 0.0);
    }

    #[test]
    fn unit_square_masses_and_complex() {
        let mesh = unit_square_mesh();
        let net = assemble_p1(&mesh).unwrap();
        // every corner sees two unit boundary edges: mass 1/2 + 1/2
        for v in 0..4 {
            assert!((net.boundary_mass(v) - 1.0).abs() < 1e-15);
        }
        let c = mesh_to_complex(&mesh).unwrap();
        assert_eq!(c.cell_count(), 2);
        assert!((c.cell_volume(0) - 0.5).abs() < 1e-15);
        assert!((c.cell_volume(1) - 0.5).abs() < 1e-15);
        assert_eq!(c.interfaces().len(), 1);
        assert!((c.interfaces()[0].weight - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.boundary_faces().len(), 4);
        for f in c.boundary_faces() {
            assert!((f.weight - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn mixed_gamma_uses_the_arithmetic_mean_on_interfaces() {
        let coords = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![[0, 1, 2], [0, 2, 3]];
        let mut mesh =
            TriangleMesh::new(coords, triangles, vec![2.0, 1.0], BTreeMap::new(), vec![]);
        mesh.fill_default_rho().unwrap();
        let c = mesh_to_complex(&mesh).unwrap();
        assert!((c.interfaces()[0].weight - 2.0f64.sqrt() * 1.5).abs() < 1e-15);
        assert!((c.cell_volume(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn obtuse_mesh_is_refused() {
        let coords = vec![[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]];
        let mut mesh =
            TriangleMesh::new(coords, vec![[0, 1, 2]], vec![1.0], BTreeMap::new(), vec![]);
        mesh.fill_default_rho().unwrap();
        let err = assemble_p1(&mesh).unwrap_err().to_string();
        assert!(err.contains("obtuse"), "{err}");
    }

    #[test]
    fn generated_meshes_assemble_to_valid_pairs() {
        for mesh in [
            make_disk(0.25).unwrap(),
            make_annulus(0.5, 1.0, 0.25).unwrap(),
            make_rectangle(1.0, 1.0, 0.25).unwrap(),
            make_cylinder(std::f64::consts::TAU, 0.4, 0.25).unwrap(),
            make_dumbbell(1.0, 0.5, 0.5, 0.15).unwrap(),
        ] {
            let net = assemble_p1(&mesh).unwrap();
            assert!(validate_network(&net).is_empty(), "{}", validate_network(&net));
            let c = mesh_to_complex(&mesh).unwrap();
            assert!(validate_complex(&c).is_empty(), "{}", validate_complex(&c));
            // stiffness kernel contains constants
            let ones = vec![1.0; net.vertex_count()];
            assert!(net.energy(&ones).abs() < 1e-12);
        }
    }

    #[test]
    fn lumping_preserves_total_mass() {
        let mesh = make_disk(0.2).unwrap();
        let topo = mesh.topology().unwrap();
        let net = assemble_p1(&mesh).unwrap();
        let total_mass: f64 =
            (0..net.vertex_count()).filter(|&v| net.is_boundary(v)).map(|v| net.boundary_mass(v)).sum();
        let total_rho_len: f64 = topo.boundary_edges.iter().map(|be| be.rho * be.length).sum();
        assert!((total_mass - total_rho_len).abs() <= 1e-12 * total_rho_len);
    }

    #[test]
    fn complex_totals_match_mesh_totals() {
        let mesh = make_annulus(0.5, 1.0, 0.2).unwrap();
        let topo = mesh.topology().unwrap();
        let c = mesh_to_complex(&mesh).unwrap();
        let area_gamma: f64 = (0..mesh.triangle_count())
            .map(|t| mesh.triangle_area(t) * mesh.gamma()[t])
            .sum();
        assert!((c.total_volume() - area_gamma).abs() <= 1e-12 * area_gamma);
        let rho_len: f64 = topo.boundary_edges.iter().map(|be| be.rho * be.length).sum();
        assert!((c.total_boundary() - rho_len).abs() <= 1e-12 * rho_len);
    }

    #[test]
    fn coordinate_scaling_matches_scale_metric_in_2d() {
        let lambda = 3.0;
        let base = make_rectangle(1.0, 1.0, 0.5).unwrap();
        let scaled_coords: Vec<[f64; 2]> =
            base.coords().iter().map(|p| [p[0] * lambda, p[1] * lambda]).collect();
        let mut scaled = TriangleMesh::new(
            scaled_coords,
            base.triangles().to_vec(),
            base.gamma().to_vec(),
            BTreeMap::new(),
            vec![],
        );
        scaled.fill_default_rho().unwrap();

        let net_a = assemble_p1(&scaled).unwrap();
        let ca = mesh_to_complex(&scaled).unwrap();
        let dim = crate::complex::Dimension::new(2).unwrap();
        let (net_b, cb) = crate::complex::scale_metric(
            &assemble_p1(&base).unwrap(),
            &mesh_to_complex(&base).unwrap(),
            lambda,
            dim,
        )
        .unwrap();

        for (ea, eb) in net_a.edges().iter().zip(net_b.edges()) {
            assert_eq!((ea.a, ea.b), (eb.a, eb.b));
            assert!((ea.conductance - eb.conductance).abs() <= 1e-12 * eb.conductance.abs());
        }
        for v in 0..net_a.vertex_count() {
            assert!(
                (net_a.boundary_mass(v) - net_b.boundary_mass(v)).abs()
                    <= 1e-12 * net_b.boundary_mass(v).abs()
            );
        }
        for t in 0..ca.cell_count() {
            assert!((ca.cell_volume(t) - cb.cell_volume(t)).abs() <= 1e-12 * cb.cell_volume(t));
        }
        for (ia, ib) in ca.interfaces().iter().zip(cb.interfaces()) {
            assert!((ia.weight - ib.weight).abs() <= 1e-12 * ib.weight.abs());
        }
        for (fa, fb) in ca.boundary_faces().iter().zip(cb.boundary_faces()) {
            assert!((fa.weight - fb.weight).abs() <= 1e-12 * fb.weight.abs());
        }
    }

    #[test]
    fn coarsening_is_conservative() {
        let mesh = make_disk(0.3).unwrap();
        let fine = mesh_to_complex(&mesh).unwrap();
        let blocks = grid_blocks(&mesh, 4, 4);
        let coarse = coarsen_complex(&fine, &blocks);
        assert!(validate_complex(&coarse).is_empty(), "{}", validate_complex(&coarse));
        assert!((coarse.total_volume() - fine.total_volume()).abs() <= 1e-12 * fine.total_volume());
        assert!(
            (coarse.total_boundary() - fine.total_boundary()).abs()
                <= 1e-12 * fine.total_boundary()
        );
        assert!(coarse.cell_count() <= 16);
    }

    #[test]
    fn cell_average_field_on_the_square() {
        let mesh = unit_square_mesh();
        let topo = mesh.topology().unwrap();
        // vertex order is row-major: (0,0),(1,0),(0,1),(1,1);
        // triangles are (0,1,3) and (0,3,2)
        let field = vec![0.0, 1.0, 2.0, 3.0];
        let cells = cell_average_field(&mesh, &topo, &field);
        assert_eq!(cells, vec![4.0 / 3.0, 5.0 / 3.0]);
    }
}
