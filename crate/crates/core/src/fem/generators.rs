//! Structured mesh generators for the test geometries. All of them emit
//! meshes whose accumulated edge conductances are nonnegative: right-angle
//! pairs cancel exactly and are dropped at assembly.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fem::mesh::TriangleMesh;

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::MeshGenerator(format!("target edge length must be positive, got {h}")));
    }
    Ok(())
}

/// Structured rectangle mesh of about `w x ht / h^2` squares, each split
/// along its up-right diagonal.
pub fn make_rectangle(w: f64, ht: f64, h: f64) -> Result<TriangleMesh> {
    check_h(h)?;
    if !(w > 0.0 && ht > 0.0) {
        return Err(Error::MeshGenerator(format!("rectangle sides must be positive, got {w} x {ht}")));
    }
    let nx = ((w / h).round() as usize).max(1);
    let ny = ((ht / h).round() as usize).max(1);
    let dx = w / nx as f64;
    let dy = ht / ny as f64;
    let v = |i: usize, j: usize| j * (nx + 1) + i;
    let mut coords = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            coords.push([i as f64 * dx, j as f64 * dy]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            triangles.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    let gamma = vec![1.0; triangles.len()];
    let mut mesh = TriangleMesh::new(coords, triangles, gamma, BTreeMap::new(), vec![]);
    mesh.fill_default_rho()?;
    Ok(mesh)
}

/// Polar mesh of the unit disk: a center vertex, `nr` rings, constant
/// angular resolution. Ring quads are split so the two diagonal cotangent
/// contributions cancel exactly.
pub fn make_disk(h: f64) -> Result<TriangleMesh> {
    check_h(h)?;
    let nr = ((1.0 / h).round() as usize).max(2);
    let ntheta = ((2.0 * PI / h).ceil() as usize).max(12);
    polar_mesh(0.0, 1.0, nr, ntheta)
}

/// Polar mesh of an annulus; both circles are boundary.
pub fn make_annulus(r_in: f64, r_out: f64, h: f64) -> Result<TriangleMesh> {
    check_h(h)?;
    if !(r_in > 0.0 && r_out > r_in) {
        return Err(Error::MeshGenerator(format!(
            "annulus radii must satisfy 0 < r_in < r_out, got {r_in}, {r_out}"
        )));
    }
    let nr = (((r_out - r_in) / h).round() as usize).max(1);
    let ntheta = ((2.0 * PI * r_out / h).ceil() as usize).max(12);
    polar_mesh(r_in, r_out, nr, ntheta)
}

fn polar_mesh(r_in: f64, r_out: f64, nr: usize, ntheta: usize) -> Result<TriangleMesh> {
    let with_center = r_in == 0.0;
    let rings = if with_center { nr } else { nr + 1 };
    let dr = (r_out - r_in) / nr as f64;
    let mut coords = Vec::new();
    if with_center {
        coords.push([0.0, 0.0]);
    }
    let ring_vertex = |ring: usize, t: usize| {
        let offset = if with_center { 1 } else { 0 };
        offset + ring * ntheta + (t % ntheta)
    };
    for ring in 0..rings {
        let r = if with_center { (ring + 1) as f64 * dr } else { r_in + ring as f64 * dr };
        for t in 0..ntheta {
            let theta = 2.0 * PI * t as f64 / ntheta as f64;
            coords.push([r * theta.cos(), r * theta.sin()]);
        }
    }
    let mut triangles = Vec::new();
    if with_center {
        for t in 0..ntheta {
            triangles.push([0, ring_vertex(0, t), ring_vertex(0, t + 1)]);
        }
    }
    for ring in 0..rings.saturating_sub(1) {
        for t in 0..ntheta {
            let a = ring_vertex(ring, t);
            let b = ring_vertex(ring + 1, t);
            let b2 = ring_vertex(ring + 1, t + 1);
            let a2 = ring_vertex(ring, t + 1);
            triangles.push([a, b, b2]);
            triangles.push([a, b2, a2]);
        }
    }
    let gamma = vec![1.0; triangles.len()];
    let mut mesh = TriangleMesh::new(coords, triangles, gamma, BTreeMap::new(), vec![]);
    mesh.fill_default_rho()?;
    Ok(mesh)
}

/// Flat cylinder: a structured rectangle of the given circumference and
/// height whose vertical seam is closed by periodic identifications, so the
/// boundary is exactly the two horizontal circles.
pub fn make_cylinder(circumference: f64, a: f64, h: f64) -> Result<TriangleMesh> {
    check_h(h)?;
    if !(circumference > 0.0 && a > 0.0) {
        return Err(Error::MeshGenerator(format!(
            "cylinder dimensions must be positive, got circumference {circumference}, height {a}"
        )));
    }
    let nx = ((circumference / h).round() as usize).max(3);
    let ny = ((a / h).round() as usize).max(1);
    let dx = circumference / nx as f64;
    let dy = a / ny as f64;
    let v = |i: usize, j: usize| j * (nx + 1) + i;
    let mut coords = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            coords.push([i as f64 * dx, j as f64 * dy]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            triangles.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    let gamma = vec![1.0; triangles.len()];
    let periodic = (0..=ny).map(|j| (v(nx, j), v(0, j))).collect();
    let mut mesh = TriangleMesh::new(coords, triangles, gamma, BTreeMap::new(), periodic);
    mesh.fill_default_rho()?;
    Ok(mesh)
}

/// Two disks of radius `r` joined by a neck of width `w`, realized as the
/// axis-aligned staircase region of the union on a square grid of pitch `h`.
/// The disk centers sit at +-(l/2 + sqrt(r^2 - w^2/4)) so the visible neck
/// between the circles has length about `l` at height +-w/2.
pub fn make_dumbbell(r: f64, w: f64, l: f64, h: f64) -> Result<TriangleMesh> {
    check_h(h)?;
    if !(r > 0.0 && l > 0.0) {
        return Err(Error::MeshGenerator(format!(
            "dumbbell radius and neck length must be positive, got r {r}, l {l}"
        )));
    }
    if !(w > 0.0 && w < 2.0 * r) {
        return Err(Error::MeshGenerator(format!(
            "neck width must satisfy 0 < w < 2r, got w {w}, r {r}"
        )));
    }
    let cx = l / 2.0 + (r * r - w * w / 4.0).sqrt();
    let inside = |x: f64, y: f64| {
        let in_disk =
            |cx0: f64| (x - cx0) * (x - cx0) + y * y < r * r;
        in_disk(cx) || in_disk(-cx) || (x.abs() <= cx && y.abs() < w / 2.0)
    };
    let imax = ((cx + r) / h).ceil() as i64 + 1;
    let jmax = (r / h).ceil() as i64 + 1;

    let mut vertex_ids: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut coords = Vec::new();
    let mut triangles = Vec::new();
    let mut id_of = |coords: &mut Vec<[f64; 2]>, key: (i64, i64)| -> usize {
        *vertex_ids.entry(key).or_insert_with(|| {
            coords.push([key.0 as f64 * h, key.1 as f64 * h]);
            coords.len() - 1
        })
    };
    for j in -jmax..jmax {
        for i in -imax..imax {
            let center = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            if !inside(center.0, center.1) {
                continue;
            }
            let p00 = id_of(&mut coords, (i, j));
            let p10 = id_of(&mut coords, (i + 1, j));
            let p11 = id_of(&mut coords, (i + 1, j + 1));
            let p01 = id_of(&mut coords, (i, j + 1));
            triangles.push([p00, p10, p11]);
            triangles.push([p00, p11, p01]);
        }
    }
    if triangles.is_empty() {
        return Err(Error::MeshGenerator(format!(
            "dumbbell mesh is empty at edge length {h}"
        )));
    }
    let gamma = vec![1.0; triangles.len()];
    let mut mesh = TriangleMesh::new(coords, triangles, gamma, BTreeMap::new(), vec![]);
    // topology() inside rejects a neck too thin for this grid (disconnected)
    mesh.fill_default_rho().map_err(|e| {
        Error::MeshGenerator(format!("edge length {h} cannot resolve neck width {w}: {e}"))
    })?;
    Ok(mesh)
}
