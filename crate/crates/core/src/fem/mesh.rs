//! 2D triangle meshes with piecewise densities and the line-oriented
//! "SMESH 1" text format.
//!
//! A mesh may carry periodic identifications (for cylinders); identified
//! vertices are merged before any topology or assembly step, while geometry
//! is always taken from the original coordinates.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    coords: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    triangles: Vec<[usize; 3]>,
    /// Interior density per triangle.
    gamma: Vec<f64>,
    /// Boundary density per boundary edge, keyed by the original vertex
    /// pair (min, max). Boundary edges without an entry default to 1.
    rho: BTreeMap<(usize, usize), f64>,
    /// Identified vertex pairs.
    periodic: Vec<(usize, usize)>,
}

/// Merged-index view of a mesh: canonical vertex ids, edge incidence, and
/// the derived boundary (edges with exactly one incident triangle).
#[derive(Debug, Clone)]
pub struct Topology {
    /// Original vertex id -> canonical vertex id (dense).
    pub canon: Vec<usize>,
    pub canon_count: usize,
    /// Canonical edge -> incident triangle ids (one or two).
    pub edge_triangles: BTreeMap<(usize, usize), Vec<usize>>,
    /// Canonical edge -> one original vertex pair realizing it, used for
    /// geometry and density lookups.
    pub edge_source: BTreeMap<(usize, usize), (usize, usize)>,
    /// Canonical boundary edges in ascending order, with their rho value
    /// and incident triangle.
    pub boundary_edges: Vec<BoundaryEdge>,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub canon: (usize, usize),
    pub source: (usize, usize),
    pub triangle: usize,
    pub rho: f64,
    pub length: f64,
}

impl TriangleMesh {
    pub fn new(
        coords: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        gamma: Vec<f64>,
        rho: BTreeMap<(usize, usize), f64>,
        periodic: Vec<(usize, usize)>,
    ) -> Self {
        assert_eq!(triangles.len(), gamma.len());
        Self { coords, triangles, gamma, rho, periodic }
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn rho_map(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.rho
    }

    pub fn periodic(&self) -> &[(usize, usize)] {
        &self.periodic
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        let a = self.coords[i];
        let b = self.coords[j];
        let c = self.coords[k];
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    pub fn triangle_centroid(&self, t: usize) -> [f64; 2] {
        let [i, j, k] = self.triangles[t];
        [
            (self.coords[i][0] + self.coords[j][0] + self.coords[k][0]) / 3.0,
            (self.coords[i][1] + self.coords[j][1] + self.coords[k][1]) / 3.0,
        ]
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        let p = self.coords[a];
        let q = self.coords[b];
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
    }

    /// After the generators fill coordinates and triangles, give every
    /// derived boundary edge the unit boundary density.
    pub(crate) fn fill_default_rho(&mut self) -> Result<()> {
        let topo = self.topology()?;
        for be in &topo.boundary_edges {
            self.rho.insert(be.source, 1.0);
        }
        Ok(())
    }

    /// Merges periodic identifications, derives edge incidence and the
    /// boundary, and checks every mesh invariant.
    pub fn topology(&self) -> Result<Topology> {
        let nv = self.vertex_count();
        if nv == 0 || self.triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::Mesh(format!(
                        "triangle {t} references missing vertex {v}"
                    )));
                }
            }
            let area = self.triangle_area(t);
            if !(area > 0.0) {
                return Err(Error::Mesh(format!(
                    "triangle {t} has nonpositive area {area}; vertices must be counterclockwise"
                )));
            }
        }
        for (t, &g) in self.gamma.iter().enumerate() {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::Mesh(format!("triangle {t} has nonpositive gamma {g}")));
            }
        }

        // union-find over periodic pairs
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in &self.periodic {
            if a >= nv || b >= nv {
                return Err(Error::Mesh(format!("periodic pair ({a},{b}) out of range")));
            }
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut rep_of = vec![usize::MAX; nv];
        let mut canon = vec![0usize; nv];
        let mut canon_count = 0;
        for (v, slot) in canon.iter_mut().enumerate() {
            let r = find(&mut parent, v);
            if rep_of[r] == usize::MAX {
                rep_of[r] = canon_count;
                canon_count += 1;
            }
            *slot = rep_of[r];
        }

        let mut edge_triangles: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut edge_source: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for e in 0..3 {
                let (i, j) = (tri[e], tri[(e + 1) % 3]);
                let (ci, cj) = (canon[i], canon[j]);
                if ci == cj {
                    return Err(Error::Mesh(format!(
                        "triangle {t} degenerates under periodic identification"
                    )));
                }
                let key = (ci.min(cj), ci.max(cj));
                edge_triangles.entry(key).or_default().push(t);
                edge_source.entry(key).or_insert((i.min(j), i.max(j)));
            }
        }
        for (key, ts) in &edge_triangles {
            if ts.len() > 2 {
                return Err(Error::Mesh(format!(
                    "non-manifold edge {key:?}: {} incident triangles",
                    ts.len()
                )));
            }
        }

        // rho entries must reference actual boundary edges
        let mut rho_by_canon: BTreeMap<(usize, usize), (usize, usize, f64)> = BTreeMap::new();
        for (&(i, j), &r) in &self.rho {
            if i >= nv || j >= nv {
                return Err(Error::Mesh(format!("rho entry ({i},{j}) out of range")));
            }
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Mesh(format!("nonpositive rho {r} on edge ({i},{j})")));
            }
            let key = (canon[i].min(canon[j]), canon[i].max(canon[j]));
            match edge_triangles.get(&key) {
                None => {
                    return Err(Error::Mesh(format!(
                        "rho entry ({i},{j}) does not reference a mesh edge"
                    )))
                }
                Some(ts) if ts.len() != 1 => {
                    return Err(Error::Mesh(format!(
                        "rho entry ({i},{j}) references an interior edge"
                    )))
                }
                Some(_) => {
                    if let Some(&(pi, pj, pr)) = rho_by_canon.get(&key) {
                        if pr != r {
                            return Err(Error::Mesh(format!(
                                "conflicting rho on the same boundary edge: ({pi},{pj}) and ({i},{j})"
                            )));
                        }
                    }
                    rho_by_canon.insert(key, (i, j, r));
                }
            }
        }

        let mut boundary_edges = Vec::new();
        for (&key, ts) in &edge_triangles {
            if ts.len() == 1 {
                let source = edge_source[&key];
                let rho = rho_by_canon.get(&key).map(|&(_, _, r)| r).unwrap_or(1.0);
                boundary_edges.push(BoundaryEdge {
                    canon: key,
                    source,
                    triangle: ts[0],
                    rho,
                    length: self.edge_length(source.0, source.1),
                });
            }
        }
        if boundary_edges.is_empty() {
            return Err(Error::Mesh("mesh has no boundary edges".into()));
        }

        // edge-connectivity of triangles
        let mut tparent: Vec<usize> = (0..self.triangles.len()).collect();
        for ts in edge_triangles.values() {
            if ts.len() == 2 {
                let ra = find(&mut tparent, ts[0]);
                let rb = find(&mut tparent, ts[1]);
                if ra != rb {
                    tparent[ra] = rb;
                }
            }
        }
        let comps = (0..self.triangles.len())
            .filter(|&t| find(&mut tparent, t) == t)
            .count();
        if comps > 1 {
            return Err(Error::Mesh(format!(
                "mesh is not edge-connected: {comps} components"
            )));
        }

        Ok(Topology { canon, canon_count, edge_triangles, edge_source, boundary_edges })
    }
}

fn fmt_f64(x: f64) -> String {
    // 17 significant digits round-trip any double exactly
    format!("{x:.16e}")
}

/// Writes the SMESH 1 document for a mesh; `load_mesh` of the result gives
/// back the identical mesh, and saving again gives the identical bytes.
pub fn save_mesh(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    out.push_str("SMESH 1\n");
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.vertex_count(),
        mesh.triangle_count(),
        mesh.rho.len()
    );
    for p in &mesh.coords {
        let _ = writeln!(out, "{} {}", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", tri[0], tri[1], tri[2], fmt_f64(mesh.gamma[t]));
    }
    for (&(i, j), &r) in &mesh.rho {
        let _ = writeln!(out, "{} {} {}", i, j, fmt_f64(r));
    }
    for &(a, b) in &mesh.periodic {
        let _ = writeln!(out, "PERIODIC {a} {b}");
    }
    out
}

pub fn save_mesh_to(mesh: &TriangleMesh, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, save_mesh(mesh))?;
    Ok(())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, line) in self.inner.by_ref() {
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                return Some((idx + 1, trimmed));
            }
        }
        None
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::MeshParse { line, msg: msg.into() }
}

/// Parses an SMESH 1 document and validates every mesh invariant.
pub fn load_mesh(text: &str) -> Result<TriangleMesh> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let (ln, header) = lines.next_content().ok_or_else(|| parse_err(1, "empty document"))?;
    if header != "SMESH 1" {
        return Err(parse_err(ln, format!("expected header 'SMESH 1', got '{header}'")));
    }
    let (ln, counts) = lines
        .next_content()
        .ok_or_else(|| parse_err(ln, "missing counts line"))?;
    let parts: Vec<&str> = counts.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(parse_err(ln, "counts line must be 'nv nt nrho'"));
    }
    let nv: usize = parts[0].parse().map_err(|_| parse_err(ln, "bad vertex count"))?;
    let nt: usize = parts[1].parse().map_err(|_| parse_err(ln, "bad triangle count"))?;
    let nrho: usize = parts[2].parse().map_err(|_| parse_err(ln, "bad rho count"))?;

    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = lines.next_content().ok_or_else(|| parse_err(ln, "missing vertex line"))?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 2 {
            return Err(parse_err(ln, "vertex line must be 'x y'"));
        }
        let x: f64 = p[0].parse().map_err(|_| parse_err(ln, "bad x coordinate"))?;
        let y: f64 = p[1].parse().map_err(|_| parse_err(ln, "bad y coordinate"))?;
        coords.push([x, y]);
    }
    let mut triangles = Vec::with_capacity(nt);
    let mut gamma = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (lnn, line) =
            lines.next_content().ok_or_else(|| parse_err(ln, "missing triangle line"))?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 4 {
            return Err(parse_err(lnn, "triangle line must be 'i j k gamma'"));
        }
        let mut tri = [0usize; 3];
        for (slot, tok) in tri.iter_mut().zip(&p[..3]) {
            let v: usize = tok.parse().map_err(|_| parse_err(lnn, "bad vertex index"))?;
            if v >= nv {
                return Err(parse_err(lnn, format!("vertex index {v} out of range (nv = {nv})")));
            }
            *slot = v;
        }
        let g: f64 = p[3].parse().map_err(|_| parse_err(lnn, "bad gamma"))?;
        triangles.push(tri);
        gamma.push(g);
    }
    let mut rho = BTreeMap::new();
    for _ in 0..nrho {
        let (lnn, line) = lines.next_content().ok_or_else(|| parse_err(ln, "missing rho line"))?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 3 {
            return Err(parse_err(lnn, "boundary density line must be 'i j rho'"));
        }
        let i: usize = p[0].parse().map_err(|_| parse_err(lnn, "bad vertex index"))?;
        let j: usize = p[1].parse().map_err(|_| parse_err(lnn, "bad vertex index"))?;
        if i >= nv || j >= nv {
            return Err(parse_err(lnn, "rho vertex index out of range"));
        }
        let r: f64 = p[2].parse().map_err(|_| parse_err(lnn, "bad rho"))?;
        if rho.insert((i.min(j), i.max(j)), r).is_some() {
            return Err(parse_err(lnn, format!("duplicate rho entry for edge ({i},{j})")));
        }
    }
    let mut periodic = Vec::new();
    while let Some((lnn, line)) = lines.next_content() {
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 3 || p[0] != "PERIODIC" {
            return Err(parse_err(lnn, "expected 'PERIODIC i j' or end of file"));
        }
        let a: usize = p[1].parse().map_err(|_| parse_err(lnn, "bad vertex index"))?;
        let b: usize = p[2].parse().map_err(|_| parse_err(lnn, "bad vertex index"))?;
        if a >= nv || b >= nv {
            return Err(parse_err(lnn, "periodic vertex index out of range"));
        }
        periodic.push((a, b));
    }

    let mesh = TriangleMesh::new(coords, triangles, gamma, rho, periodic);
    mesh.topology()?;
    Ok(mesh)
}

pub fn load_mesh_from(path: &std::path::Path) -> Result<TriangleMesh> {
    let text = std::fs::read_to_string(path)?;
    load_mesh(&text)
}
