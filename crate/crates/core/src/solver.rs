//! Steklov spectrum of a network via the boundary reduction of the weighted
//! graph Laplacian: harmonic extension, Schur complement, and the
//! generalized symmetric eigenproblem against the boundary mass.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::eigen::symmetric_eigen;

use crate::complex::{validate_network, DiagnosticKind, SteklovNetwork};
use crate::error::{Error, Result};

/// Relative cutoff under which computed eigenvalues are reported as exact
/// zeros (the kernel of the boundary operator is the constants).
pub const KERNEL_TOLERANCE: f64 = 1e-10;

/// Relative spectral gap under which eigenvalues are treated as one
/// degenerate cluster when canonicalizing eigenvectors.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Vertex count cap for the dense full-pencil oracle.
pub const PENCIL_CAP: usize = 2000;

/// Sorted Steklov eigenvalues with boundary eigenvectors (orthonormal under
/// the boundary mass pairing) and their harmonic extensions to all vertices.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// One vector per eigenvalue, indexed like `boundary_ids`.
    pub boundary_vectors: Vec<Vec<f64>>,
    /// One full-vertex vector per eigenvalue.
    pub extensions: Vec<Vec<f64>>,
    /// Boundary vertex ids in ascending order; row i of a boundary vector
    /// is the value at `boundary_ids[i]`.
    pub boundary_ids: Vec<usize>,
}

impl Spectrum {
    pub fn eigenpair(&self, i: usize) -> Eigenpair {
        Eigenpair { value: self.eigenvalues[i], field: self.extensions[i].clone() }
    }
}

/// One eigenvalue with its full-vertex eigenfield.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub field: Vec<f64>,
}

/// Dense weighted graph Laplacian: f' L f = sum of conductance (f_a - f_b)^2.
pub fn assemble_laplacian(net: &SteklovNetwork) -> Result<DMatrix<f64>> {
    validate_network(net).into_result(DiagnosticKind::Network)?;
    Ok(assemble_laplacian_unchecked(net))
}

fn assemble_laplacian_unchecked(net: &SteklovNetwork) -> DMatrix<f64> {
    let n = net.vertex_count();
    let mut l = DMatrix::zeros(n, n);
    for e in net.edges() {
        let c = e.conductance;
        l[(e.a, e.a)] += c;
        l[(e.b, e.b)] += c;
        l[(e.a, e.b)] -= c;
        l[(e.b, e.a)] -= c;
    }
    l
}

/// Interior/boundary split of the Laplacian with a factorization of the
/// interior block, reused by the extension and the boundary reduction.
struct BoundaryReduction {
    boundary_ids: Vec<usize>,
    interior_ids: Vec<usize>,
    l_bb: DMatrix<f64>,
    l_ib: DMatrix<f64>,
    /// None when there are no interior vertices.
    interior: Option<Cholesky<f64, nalgebra::Dyn>>,
}

impl BoundaryReduction {
    fn build(net: &SteklovNetwork) -> Result<Self> {
        let l = assemble_laplacian_unchecked(net);
        let boundary_ids = net.boundary_vertices();
        let interior_ids = net.interior_vertices();
        let m = boundary_ids.len();
        let k = interior_ids.len();
        let l_bb = DMatrix::from_fn(m, m, |i, j| l[(boundary_ids[i], boundary_ids[j])]);
        let l_ib = DMatrix::from_fn(k, m, |i, j| l[(interior_ids[i], boundary_ids[j])]);
        let interior = if k == 0 {
            None
        } else {
            let l_ii = DMatrix::from_fn(k, k, |i, j| l[(interior_ids[i], interior_ids[j])]);
            Some(Cholesky::new(l_ii).ok_or(Error::SingularInterior)?)
        };
        Ok(Self { boundary_ids, interior_ids, l_bb, l_ib, interior })
    }

    /// Interior values solving the interior rows: L_II f_I = -L_IB u.
    fn interior_values(&self, u: &DVector<f64>) -> DVector<f64> {
        match &self.interior {
            None => DVector::zeros(0),
            Some(chol) => {
                let rhs = -(&self.l_ib * u);
                chol.solve(&rhs)
            }
        }
    }

    fn extend(&self, u: &DVector<f64>, n: usize) -> Vec<f64> {
        let fi = self.interior_values(u);
        let mut f = vec![0.0; n];
        for (row, &v) in self.boundary_ids.iter().enumerate() {
            f[v] = u[row];
        }
        for (row, &v) in self.interior_ids.iter().enumerate() {
            f[v] = fi[row];
        }
        f
    }

    /// Schur complement L_BB - L_BI L_II^{-1} L_IB, symmetrized to remove
    /// rounding asymmetry.
    fn schur(&self) -> DMatrix<f64> {
        let mut s = self.l_bb.clone();
        if let Some(chol) = &self.interior {
            let x = chol.solve(&self.l_ib);
            s -= self.l_ib.transpose() * x;
        }
        symmetrize(&mut s);
        s
    }
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Extends boundary data harmonically: the result agrees with `u` on the
/// boundary (ascending boundary id order) and the interior rows of the
/// Laplacian annihilate it.
pub fn harmonic_extension(net: &SteklovNetwork, u: &[f64]) -> Result<Vec<f64>> {
    validate_network(net).into_result(DiagnosticKind::Network)?;
    let red = BoundaryReduction::build(net)?;
    if u.len() != red.boundary_ids.len() {
        return Err(Error::GraphInput(format!(
            "boundary vector has {} entries, network has {} boundary vertices",
            u.len(),
            red.boundary_ids.len()
        )));
    }
    Ok(red.extend(&DVector::from_column_slice(u), net.vertex_count()))
}

/// Dense boundary operator over the boundary vertices (ascending id order):
/// the Schur complement of the Laplacian onto the boundary. Symmetric
/// positive semidefinite with the constants in its kernel; u' A u equals the
/// Dirichlet energy of the harmonic extension of u.
pub fn dtn_operator(net: &SteklovNetwork) -> Result<(DMatrix<f64>, Vec<usize>)> {
    validate_network(net).into_result(DiagnosticKind::Network)?;
    let red = BoundaryReduction::build(net)?;
    let s = red.schur();
    Ok((s, red.boundary_ids))
}

/// First `k` eigenvalues of the boundary operator against the boundary mass,
/// sorted ascending, with mass-orthonormal eigenvectors and their harmonic
/// extensions. Eigenvectors are canonicalized: degenerate clusters are
/// re-orthonormalized against the coordinate directions in ascending
/// boundary id order, and each vector's first nonzero coordinate is positive.
pub fn steklov_spectrum(net: &SteklovNetwork, k: usize) -> Result<Spectrum> {
    validate_network(net).into_result(DiagnosticKind::Network)?;
    let red = BoundaryReduction::build(net)?;
    let m = red.boundary_ids.len();
    if k > m {
        return Err(Error::TooManyEigenvalues { k, boundary: m });
    }
    let s = red.schur();

    // reduce (S, M) to standard form with M = diag(mass): A = M^-1/2 S M^-1/2
    let inv_sqrt: Vec<f64> =
        red.boundary_ids.iter().map(|&v| 1.0 / net.boundary_mass(v).sqrt()).collect();
    let mut a = DMatrix::from_fn(m, m, |i, j| s[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    symmetrize(&mut a);
    let eig = symmetric_eigen(&a)?;

    let max_abs = eig.values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let zero_cut = KERNEL_TOLERANCE * if max_abs > 0.0 { max_abs.max(1.0) } else { 1.0 };

    let mut values = Vec::with_capacity(m);
    let mut vectors: Vec<DVector<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let lam = eig.values[i];
        values.push(if lam.abs() < zero_cut { 0.0 } else { lam });
        // map back: u = M^-1/2 y, automatically mass-orthonormal
        let mut u = DVector::zeros(m);
        for r in 0..m {
            u[r] = eig.vectors[(r, i)] * inv_sqrt[r];
        }
        vectors.push(u);
    }

    let mass: Vec<f64> = red.boundary_ids.iter().map(|&v| net.boundary_mass(v)).collect();
    canonicalize_clusters(&values, &mut vectors, &mass);
    for u in vectors.iter_mut() {
        fix_sign(u);
    }

    let n = net.vertex_count();
    let mut boundary_vectors = Vec::with_capacity(k);
    let mut extensions = Vec::with_capacity(k);
    for u in vectors.iter().take(k) {
        boundary_vectors.push(u.iter().copied().collect::<Vec<f64>>());
        extensions.push(red.extend(u, n));
    }
    values.truncate(k);
    Ok(Spectrum { eigenvalues: values, boundary_vectors, extensions, boundary_ids: red.boundary_ids })
}

fn mass_dot(a: &DVector<f64>, b: &DVector<f64>, mass: &[f64]) -> f64 {
    (0..a.len()).map(|i| mass[i] * a[i] * b[i]).sum()
}

/// Within each degenerate cluster the eigensolver's basis is arbitrary;
/// replace it by the mass-orthonormalized projections of the coordinate
/// directions taken in ascending boundary position, so equal inputs give
/// equal outputs whatever basis the solver returned.
fn canonicalize_clusters(values: &[f64], vectors: &mut [DVector<f64>], mass: &[f64]) {
    let m = values.len();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m {
            let gap = values[end] - values[end - 1];
            let scale = values[end].abs().max(values[end - 1].abs()).max(1e-300);
            if gap <= CLUSTER_GAP * scale {
                end += 1;
            } else {
                break;
            }
        }
        if end - start > 1 {
            let dim = end - start;
            let basis: Vec<DVector<f64>> = vectors[start..end].to_vec();
            let mut replacement: Vec<DVector<f64>> = Vec::with_capacity(dim);
            let len = basis[0].len();
            for coord in 0..len {
                if replacement.len() == dim {
                    break;
                }
                // project e_coord onto the eigenspace (mass inner product)
                let mut v = DVector::zeros(len);
                for b in &basis {
                    let w = mass[coord] * b[coord];
                    v += b * w;
                }
                // orthogonalize against already accepted vectors, twice for
                // numerical orthogonality
                for _ in 0..2 {
                    for r in &replacement {
                        let w = mass_dot(&v, r, mass);
                        v -= r * w;
                    }
                }
                let norm = mass_dot(&v, &v, mass).sqrt();
                if norm > 1e-8 {
                    v /= norm;
                    replacement.push(v);
                }
            }
            // fall back to the solver basis if the projections were deficient
            if replacement.len() == dim {
                vectors[start..end].clone_from_slice(&replacement);
            }
        }
        start = end;
    }
}

fn fix_sign(u: &mut DVector<f64>) {
    let max_abs = u.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    if max_abs == 0.0 {
        return;
    }
    for i in 0..u.len() {
        if u[i].abs() > 1e-12 * max_abs {
            if u[i] < 0.0 {
                *u = -u.clone();
            }
            return;
        }
    }
}

/// Dirichlet energy over boundary mass: sum c (f_a - f_b)^2 / sum m_b f_b^2.
/// The mean-zero constraint of the variational characterization is the
/// caller's responsibility; no constraint is applied here.
pub fn rayleigh_quotient(net: &SteklovNetwork, f: &[f64]) -> Result<f64> {
    let denom = net.boundary_form(f);
    if denom == 0.0 {
        return Err(Error::ZeroBoundaryDenominator);
    }
    Ok(net.energy(f) / denom)
}

/// Independent oracle for the first positive eigenvalue: solves the full
/// singular pencil L f = sigma B f (B carries the boundary masses and is
/// zero on interior vertices) by the shifted dense reduction
/// B f = mu (L + B) f with mu = 1/(1 + sigma). Interior-supported modes land
/// at mu = 0 and are deflated; the constants land at mu = 1 (sigma = 0).
///
/// No interior/boundary elimination is performed, so the arithmetic path is
/// disjoint from the Schur reduction.
pub fn full_pencil_sigma1_oracle(net: &SteklovNetwork) -> Result<f64> {
    validate_network(net).into_result(DiagnosticKind::Network)?;
    let n = net.vertex_count();
    if n > PENCIL_CAP {
        return Err(Error::PencilTooLarge { n, cap: PENCIL_CAP });
    }
    let mut lb = assemble_laplacian_unchecked(net);
    let mut b = DMatrix::zeros(n, n);
    for v in 0..n {
        if net.is_boundary(v) {
            let m = net.boundary_mass(v);
            b[(v, v)] = m;
            lb[(v, v)] += m;
        }
    }
    let chol = Cholesky::new(lb).ok_or(Error::SingularInterior)?;
    // A = C^-1 B C^-T where L + B = C C^T
    let lower = chol.l();
    let mut x = b;
    lower.solve_lower_triangular_mut(&mut x);
    let mut xt = x.transpose();
    lower.solve_lower_triangular_mut(&mut xt);
    let mut a = xt;
    symmetrize(&mut a);
    let eig = symmetric_eigen(&a)?;
    let mut mus: Vec<f64> = eig.values;
    mus.reverse();
    let mu_max = mus.first().copied().unwrap_or(0.0);
    let cut = (1e-10 * mu_max.max(1.0)).max(1e-12);
    let finite: Vec<f64> = mus.iter().copied().filter(|&mu| mu > cut).collect();
    if finite.len() < 2 {
        return Err(Error::PencilDeficient);
    }
    // mus descending => sigmas ascending; sigma_0 ~ 0, sigma_1 next
    Ok((1.0 - finite[1]) / finite[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{k13, p2, p3, path_network};

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn laplacian_of_p2_and_p3() {
        let (net, _) = p2();
        let l = assemble_laplacian(&net).unwrap();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let (net, _) = p3();
        let l = assemble_laplacian(&net).unwrap();
        assert_eq!(
            l,
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0])
        );
    }

    #[test]
    fn laplacian_kills_constants() {
        let mut rng = crate::instances::rng(5);
        for _ in 0..5 {
            let net = crate::instances::random_connected_network(&mut rng, 17);
            let l = assemble_laplacian(&net).unwrap();
            let ones = DVector::from_element(17, 1.0);
            assert!((&l * &ones).amax() < 1e-12);
        }
    }

    #[test]
    fn harmonic_extension_on_p3() {
        let (net, _) = p3();
        // boundary ids ascending: [0, 2]
        let f = harmonic_extension(&net, &[1.0, -1.0]).unwrap();
        assert_eq!(f[0], 1.0);
        assert_eq!(f[2], -1.0);
        assert!(f[1].abs() < 1e-15);
        let f = harmonic_extension(&net, &[1.0, 0.0]).unwrap();
        assert!((f[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constants_are_harmonic_on_the_star() {
        let net = k13();
        let f = harmonic_extension(&net, &[1.0, 1.0, 1.0]).unwrap();
        for v in f {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dtn_on_p2_p3_star() {
        let (net, _) = p2();
        let (s, ids) = dtn_operator(&net).unwrap();
        assert_eq!(ids, vec![0, 1]);
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));

        let (net, _) = p3();
        let (s, ids) = dtn_operator(&net).unwrap();
        assert_eq!(ids, vec![0, 2]);
        for (got, want) in s.iter().zip([0.5, -0.5, -0.5, 0.5]) {
            approx(*got, want, 1e-14);
        }

        let net = k13();
        let (s, _) = dtn_operator(&net).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 - 1.0 / 3.0 } else { -1.0 / 3.0 };
                approx(s[(i, j)], want, 1e-14);
            }
        }
    }

    #[test]
    fn spectra_of_the_named_networks() {
        let (net, _) = p2();
        let sp = steklov_spectrum(&net, 2).unwrap();
        assert_eq!(sp.eigenvalues[0], 0.0);
        approx(sp.eigenvalues[1], 2.0, 1e-12);

        let (net, _) = p3();
        let sp = steklov_spectrum(&net, 2).unwrap();
        assert_eq!(sp.eigenvalues[0], 0.0);
        approx(sp.eigenvalues[1], 1.0, 1e-12);

        let net = k13();
        let sp = steklov_spectrum(&net, 3).unwrap();
        assert_eq!(sp.eigenvalues[0], 0.0);
        approx(sp.eigenvalues[1], 1.0, 1e-12);
        approx(sp.eigenvalues[2], 1.0, 1e-12);
    }

    #[test]
    fn path_sigma1_is_two_over_length() {
        // 1D discretization is exact for the linear first eigenfunction
        for (edges, length) in [(2usize, 2.0f64), (10, 2.0), (7, 3.5)] {
            let net = path_network(edges, length);
            let sp = steklov_spectrum(&net, 2).unwrap();
            approx(sp.eigenvalues[1], 2.0 / length, 1e-10);
        }
    }

    #[test]
    fn eigenvectors_are_mass_orthonormal_and_extensions_match() {
        let mut rng = crate::instances::rng(9);
        let net = crate::instances::random_connected_network(&mut rng, 23);
        let m = net.boundary_vertices().len();
        let sp = steklov_spectrum(&net, m).unwrap();
        for i in 0..m {
            for j in 0..m {
                let dot: f64 = sp
                    .boundary_ids
                    .iter()
                    .enumerate()
                    .map(|(r, &v)| {
                        net.boundary_mass(v) * sp.boundary_vectors[i][r] * sp.boundary_vectors[j][r]
                    })
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-9, "({i},{j}) -> {dot}");
            }
        }
        for i in 0..m {
            for (r, &v) in sp.boundary_ids.iter().enumerate() {
                assert_eq!(sp.extensions[i][v], sp.boundary_vectors[i][r]);
            }
        }
    }

    #[test]
    fn energy_identity_dtn_vs_extension() {
        let mut rng = crate::instances::rng(13);
        use rand::Rng;
        for _ in 0..10 {
            let n = rng.gen_range(4..=30);
            let net = crate::instances::random_connected_network(&mut rng, n);
            let (s, ids) = dtn_operator(&net).unwrap();
            let u: Vec<f64> = (0..ids.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let uv = DVector::from_column_slice(&u);
            let quad = (uv.transpose() * &s * &uv)[(0, 0)];
            let f = harmonic_extension(&net, &u).unwrap();
            let energy = net.energy(&f);
            assert!(
                (quad - energy).abs() <= 1e-12 * (1.0 + energy.abs()),
                "{quad} vs {energy}"
            );
        }
    }

    #[test]
    fn rayleigh_quotient_examples() {
        let (net, _) = p3();
        assert_eq!(rayleigh_quotient(&net, &[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(rayleigh_quotient(&net, &[1.0, 0.0, -1.0]).unwrap(), 1.0);
        // no mean-zero constraint applied: this quotient is below sigma_1
        assert_eq!(rayleigh_quotient(&net, &[1.0, 0.5, 0.0]).unwrap(), 0.5);
        assert!(matches!(
            rayleigh_quotient(&net, &[0.0, 5.0, 0.0]),
            Err(Error::ZeroBoundaryDenominator)
        ));
    }

    #[test]
    fn eigenpair_field_attains_its_eigenvalue() {
        let mut rng = crate::instances::rng(17);
        for _ in 0..5 {
            use rand::Rng;
            let n = rng.gen_range(4..=25);
            let net = crate::instances::random_connected_network(&mut rng, n);
            let m = net.boundary_vertices().len();
            let sp = steklov_spectrum(&net, m).unwrap();
            for i in 1..m {
                let pair = sp.eigenpair(i);
                let q = rayleigh_quotient(&net, &pair.field).unwrap();
                assert!(
                    (q - pair.value).abs() <= 1e-9 * (1.0 + pair.value),
                    "quotient {q} vs eigenvalue {}",
                    pair.value
                );
            }
        }
    }

    #[test]
    fn oracle_matches_named_values() {
        let (net, _) = p2();
        approx(full_pencil_sigma1_oracle(&net).unwrap(), 2.0, 1e-12);
        let (net, _) = p3();
        approx(full_pencil_sigma1_oracle(&net).unwrap(), 1.0, 1e-12);
        approx(full_pencil_sigma1_oracle(&k13()).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn spectrum_is_permutation_invariant() {
        let mut rng = crate::instances::rng(21);
        let net = crate::instances::random_connected_network(&mut rng, 19);
        // relabel v -> (v * 7 + 3) mod 19, a permutation since gcd(7,19)=1
        let perm: Vec<usize> = (0..19).map(|v| (v * 7 + 3) % 19).collect();
        let mut boundary = vec![false; 19];
        let mut mass = vec![0.0; 19];
        for v in 0..19 {
            boundary[perm[v]] = net.is_boundary(v);
            mass[perm[v]] = net.boundary_mass(v);
        }
        let edges = net
            .edges()
            .iter()
            .map(|e| crate::complex::NetworkEdge {
                a: perm[e.a],
                b: perm[e.b],
                conductance: e.conductance,
            })
            .collect();
        let permuted = SteklovNetwork::new(boundary, mass, edges);
        let m = net.boundary_vertices().len();
        let s1 = steklov_spectrum(&net, m).unwrap();
        let s2 = steklov_spectrum(&permuted, m).unwrap();
        for (a, b) in s1.eigenvalues.iter().zip(&s2.eigenvalues) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn deterministic_repeat() {
        let net = k13();
        let a = steklov_spectrum(&net, 3).unwrap();
        let b = steklov_spectrum(&net, 3).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.boundary_vectors, b.boundary_vectors);
        assert_eq!(a.extensions, b.extensions);
    }

    #[test]
    fn k_above_boundary_count_is_rejected() {
        let (net, _) = p2();
        assert!(matches!(
            steklov_spectrum(&net, 3),
            Err(Error::TooManyEigenvalues { k: 3, boundary: 2 })
        ));
    }
}
