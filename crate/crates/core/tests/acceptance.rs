//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `cargo test --test acceptance -- --nocapture` to see
//! them on success).

use std::time::Instant;

use rand::Rng;

use steklov::certificate::certify_mesh;
use steklov::cheeger::{
    enumerate_constants_naive_oracle, enumerate_constants_with_cap, sweep_cuts, ConstraintVariant,
};
use steklov::complex::Dimension;
use steklov::experiments::{
    convergence_study, dumbbell_study, scaling_study, thin_product_study, ConvergenceShape,
    StudyReport,
};
use steklov::fem::{
    assemble_p1_with, coarsen_complex, grid_blocks, make_annulus, make_cylinder, make_disk,
    make_dumbbell, make_rectangle, mesh_to_complex_with, TriangleMesh,
};
use steklov::instances;
use steklov::solver::{full_pencil_sigma1_oracle, steklov_spectrum};

const VOLUME: ConstraintVariant = ConstraintVariant::VolumeHalf;
const BOUNDARY: ConstraintVariant = ConstraintVariant::BoundaryHalf;

fn line(criterion: &str, pass: bool) {
    println!("ACCEPTANCE {criterion}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance criterion failed: {criterion}");
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_01_sigma1_oracle_equivalence() {
    let start = Instant::now();
    let mut cases: Vec<steklov::complex::SteklovNetwork> = vec![
        instances::p2().0,
        instances::p3().0,
        instances::k13(),
    ];
    let mut rng = instances::rng(1);
    for _ in 0..20 {
        let n = rng.gen_range(4..=40);
        cases.push(instances::random_connected_network(&mut rng, n));
    }
    let mut ok = true;
    for net in &cases {
        let schur = steklov_spectrum(net, 2).unwrap().eigenvalues[1];
        let pencil = full_pencil_sigma1_oracle(net).unwrap();
        if !rel_close(schur, pencil, 1e-10) {
            eprintln!("mismatch: schur {schur} pencil {pencil}");
            ok = false;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 5.0;
    line(
        &format!("01 sigma1 Schur = full pencil on 23 networks in {elapsed:?} (< 5 s)"),
        ok,
    );
}

#[test]
fn criterion_02_cheeger_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = instances::rng(2);
    let mut ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(1..=14);
        let c = instances::random_complex(&mut rng, n);
        for variant in [VOLUME, BOUNDARY] {
            let gray = enumerate_constants_with_cap(&c, variant, 22).unwrap();
            let naive = enumerate_constants_naive_oracle(&c, variant, 22).unwrap();
            ok &= gray.h.to_bits() == naive.h.to_bits();
            ok &= gray.hprime.to_bits() == naive.hprime.to_bits();
            ok &= gray.h_witness.as_ref().map(|w| w.subset.clone())
                == naive.h_witness.as_ref().map(|w| w.subset.clone());
            ok &= gray.hprime_witness.as_ref().map(|w| w.subset.clone())
                == naive.hprime_witness.as_ref().map(|w| w.subset.clone());
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 30.0;
    line(
        &format!("02 Gray-code enumeration = naive oracle, bit for bit, 50 complexes x 2 variants in {elapsed:?} (< 30 s)"),
        ok,
    );
}

/// The five FEM shapes at two refinement levels each, with their coarsening
/// grids.
fn fem_instances() -> Vec<(String, TriangleMesh, (usize, usize))> {
    let tau = std::f64::consts::TAU;
    let mut out: Vec<(String, TriangleMesh, (usize, usize))> = Vec::new();
    for h in [0.2, 0.1] {
        out.push((format!("disk h={h}"), make_disk(h).unwrap(), (5, 4)));
        out.push((format!("annulus h={h}"), make_annulus(0.5, 1.0, h).unwrap(), (5, 4)));
        out.push((format!("square h={h}"), make_rectangle(1.0, 1.0, h).unwrap(), (4, 5)));
    }
    for h in [0.1, 0.05] {
        out.push((format!("cylinder a=0.2 h={h}"), make_cylinder(tau, 0.2, h).unwrap(), (18, 1)));
        out.push((
            format!("dumbbell w=0.25 h={h}"),
            make_dumbbell(1.0, 0.25, 0.5, h).unwrap(),
            (10, 2),
        ));
    }
    out
}

#[test]
fn criterion_03_theorem_on_fem_instances() {
    let mut ok = true;
    let mut coarse_hprimes = Vec::new();
    for (name, mesh, blocks) in fem_instances() {
        let topo = mesh.topology().unwrap();
        let net = assemble_p1_with(&mesh, &topo).unwrap();
        let spectrum = steklov_spectrum(&net, 2).unwrap();
        let pair = spectrum.eigenpair(1);
        let fine = mesh_to_complex_with(&mesh, &topo).unwrap();
        let cert = certify_mesh(&mesh, &topo, &fine, &pair, VOLUME).unwrap();
        let cert_ok = cert.verdict.hard_pass && cert.bound <= pair.value * (1.0 + 1e-8);
        let block_map = grid_blocks(&mesh, blocks.0, blocks.1);
        let coarse = coarsen_complex(&fine, &block_map);
        let k = enumerate_constants_with_cap(&coarse, VOLUME, 22).unwrap();
        let exact_bound = 0.25 * k.h * k.hprime;
        let exact_ok = exact_bound <= pair.value * (1.0 + 1e-8);
        if !(cert_ok && exact_ok) {
            eprintln!(
                "{name}: sigma1 {} cert bound {} exact bound {exact_bound} cert_ok {cert_ok}",
                pair.value, cert.bound
            );
            ok = false;
        }
        coarse_hprimes.push(k.hprime);
    }
    // stash positivity data for criterion 9's wording: checked here directly
    ok &= coarse_hprimes.iter().all(|&hp| hp > 0.0);
    line("03 certificate and exact coarse bounds below sigma1 on 10 FEM instances", ok);
}

#[test]
fn criterion_04_coarea_identities() {
    let mut rng = instances::rng(4);
    let mut ok = true;
    let mut tested = 0;
    while tested < 200 {
        let n = rng.gen_range(2..=14);
        let c = instances::random_complex(&mut rng, n);
        let field = instances::random_nonnegative_field(&mut rng, n);
        if field.iter().all(|&x| x == 0.0) {
            continue;
        }
        tested += 1;
        // replay the identity by hand: direct sums against threshold sums
        let u = &field;
        let mut thresholds: Vec<f64> = u.iter().copied().filter(|&v| v > 0.0).collect();
        thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        thresholds.dedup();
        let mut tv_coarea = 0.0;
        let mut vol_coarea = 0.0;
        let mut bnd_coarea = 0.0;
        let mut prev = 0.0;
        for &t in &thresholds {
            let in_set: Vec<bool> = u.iter().map(|&v| v >= t).collect();
            let m = steklov::cheeger::subset_measures(&c, &in_set);
            tv_coarea += (t - prev) * m.cut;
            vol_coarea += (t - prev) * m.volume;
            bnd_coarea += (t - prev) * m.boundary;
            prev = t;
        }
        let mut tv = 0.0;
        for f in c.interfaces() {
            tv += f.weight * (u[f.a] - u[f.b]).abs();
        }
        let mut vol = 0.0;
        for (cell, &uc) in u.iter().enumerate() {
            vol += c.cell_volume(cell) * uc;
        }
        let mut bnd = 0.0;
        for f in c.boundary_faces() {
            bnd += f.weight * u[f.cell];
        }
        ok &= rel_close(tv, tv_coarea, 1e-12) || (tv == 0.0 && tv_coarea.abs() < 1e-300);
        ok &= rel_close(vol, vol_coarea, 1e-12);
        ok &= rel_close(bnd, bnd_coarea, 1e-12) || (bnd == 0.0 && bnd_coarea == 0.0);
    }
    line("04 three discrete co-area identities on 200 random fields at 1e-12", ok);
}

#[test]
fn criterion_05_scaling_laws() {
    let mut ok = true;

    // P3 under its natural 1D scaling semantics
    let (net, c) = instances::p3();
    let dim1 = Dimension::new(1).unwrap();
    let base_sigma = steklov_spectrum(&net, 2).unwrap().eigenvalues[1];
    let base_k = enumerate_constants_with_cap(&c, VOLUME, 22).unwrap();
    for lambda in [2.0, 5.0] {
        let (snet, sc) = steklov::complex::scale_metric(&net, &c, lambda, dim1).unwrap();
        let sigma = steklov_spectrum(&snet, 2).unwrap().eigenvalues[1];
        let k = enumerate_constants_with_cap(&sc, VOLUME, 22).unwrap();
        ok &= rel_close(sigma * lambda, base_sigma, 1e-10);
        ok &= rel_close(k.h * lambda, base_k.h, 1e-10);
        // unit weights scale exactly for these lambdas
        ok &= k.hprime.to_bits() == base_k.hprime.to_bits();
        ok &= k.h_witness.as_ref().unwrap().subset == base_k.h_witness.as_ref().unwrap().subset;
        ok &= k.hprime_witness.as_ref().unwrap().subset
            == base_k.hprime_witness.as_ref().unwrap().subset;
    }

    // disk mesh in 2D, constants on the block-coarsened complex
    let mesh = make_disk(0.15).unwrap();
    let topo = mesh.topology().unwrap();
    let dnet = assemble_p1_with(&mesh, &topo).unwrap();
    let fine = mesh_to_complex_with(&mesh, &topo).unwrap();
    let blocks = grid_blocks(&mesh, 5, 4);
    let dim2 = Dimension::new(2).unwrap();
    let base_sigma = steklov_spectrum(&dnet, 2).unwrap().eigenvalues[1];
    let base_k = enumerate_constants_with_cap(&coarsen_complex(&fine, &blocks), VOLUME, 22).unwrap();
    for lambda in [2.0f64, 5.0] {
        let (snet, sc) = steklov::complex::scale_metric(&dnet, &fine, lambda, dim2).unwrap();
        let sigma = steklov_spectrum(&snet, 2).unwrap().eigenvalues[1];
        let k = enumerate_constants_with_cap(&coarsen_complex(&sc, &blocks), VOLUME, 22).unwrap();
        ok &= rel_close(sigma * lambda, base_sigma, 1e-10);
        ok &= rel_close(k.h * lambda, base_k.h, 1e-10);
        if lambda == 2.0 {
            // powers of two scale weights exactly, so h' is bitwise equal
            ok &= k.hprime.to_bits() == base_k.hprime.to_bits();
        } else {
            ok &= rel_close(k.hprime, base_k.hprime, 1e-13);
        }
        ok &= k.h_witness.as_ref().unwrap().subset == base_k.h_witness.as_ref().unwrap().subset;
        ok &= k.hprime_witness.as_ref().unwrap().subset
            == base_k.hprime_witness.as_ref().unwrap().subset;
    }
    line("05 scaling laws on P3 and the disk: sigma1*lambda, h*lambda, h' and argmins", ok);
}

#[test]
fn criterion_06_disk_spectrum_convergence() {
    let report = convergence_study(ConvergenceShape::Disk, &[0.2, 0.1, 0.05]).unwrap();
    let finest = report.records.last().unwrap();
    let within_1pct = (finest.sigma1 - 1.0).abs() <= 0.01;
    let order = report.fits["error_vs_h"].slope;
    let ok = within_1pct && order >= 1.7;
    line(
        &format!(
            "06 disk sigma1 = {:.6} at h=0.05 (within 1%), observed order {order:.3} >= 1.7",
            finest.sigma1
        ),
        ok,
    );
}

#[test]
fn criterion_07_thin_product_asymptotics() {
    let a_list = [0.4, 0.2, 0.1, 0.05];
    let report = thin_product_study(std::f64::consts::TAU, &a_list, 0.05).unwrap();
    let sig = &report.fits["sigma1_vs_a"];
    let hp = &report.fits["hprime_vs_a"];
    let mut ok = sig.slope >= 0.9 && sig.slope <= 1.1 && sig.r2 >= 0.99;
    ok &= hp.slope >= 0.85 && hp.slope <= 1.15;
    for r in &report.records {
        let ratio = r.sigma1 / (r.param / 2.0).tanh();
        ok &= (ratio - 1.0).abs() <= 0.03;
    }
    let hs: Vec<f64> = report.records.iter().map(|r| r.h).collect();
    let hmax = hs.iter().cloned().fold(f64::MIN, f64::max);
    let hmin = hs.iter().cloned().fold(f64::MAX, f64::min);
    ok &= hmax / hmin <= 4.0;
    line(
        &format!(
            "07 thin product: sigma1 slope {:.4} (r2 {:.6}), h' slope {:.4}, tanh ratios within 3%, h range {:.3}",
            sig.slope, sig.r2, hp.slope, hmax / hmin
        ),
        ok,
    );
}

#[test]
fn criterion_08_dumbbell_degeneration() {
    let report = dumbbell_study(1.0, &[0.5, 0.25, 0.1], 0.5, 0.05).unwrap();
    let ok = report.checks["sigma1_strictly_decreasing"]
        && report.checks["h_strictly_decreasing"]
        && report.checks["hprime_strictly_decreasing"]
        && report.checks["volume_band_1_2"]
        && report.checks["bound_below_sigma1"];
    line("08 dumbbell: sigma1, h, h' strictly decreasing, volume band <= 1.2", ok);
}

#[test]
fn criterion_09_hprime_positivity() {
    let mut ok = true;
    // named complexes
    for c in [instances::p2().1, instances::p3().1] {
        let k = enumerate_constants_with_cap(&c, VOLUME, 22).unwrap();
        ok &= k.hprime > 0.0;
    }
    // the random family of criterion 2
    let mut rng = instances::rng(9);
    for _ in 0..50 {
        let n = rng.gen_range(2..=14);
        let c = instances::random_complex(&mut rng, n);
        let k = enumerate_constants_with_cap(&c, VOLUME, 22).unwrap();
        ok &= k.hprime > 0.0;
    }
    // coarsened FEM complexes
    for (_, mesh, blocks) in fem_instances() {
        let fine = steklov::fem::mesh_to_complex(&mesh).unwrap();
        let coarse = coarsen_complex(&fine, &grid_blocks(&mesh, blocks.0, blocks.1));
        let k = enumerate_constants_with_cap(&coarse, VOLUME, 22).unwrap();
        ok &= k.hprime > 0.0;
    }
    line("09 enumerated h' > 0 on every connected complex with a boundary face", ok);
}

#[test]
fn criterion_10_sweep_dominance() {
    let mut rng = instances::rng(10);
    let mut ok = true;
    // random complexes with random fields
    for _ in 0..40 {
        let n = rng.gen_range(2..=12);
        let c = instances::random_complex(&mut rng, n);
        let field = instances::random_nonnegative_field(&mut rng, n);
        for variant in [VOLUME, BOUNDARY] {
            let exact = enumerate_constants_with_cap(&c, variant, 22).unwrap();
            let sweep = sweep_cuts(&c, &field, variant);
            for cut in &sweep.cuts {
                ok &= cut.h_ratio >= exact.h;
                if cut.hprime_ratio.is_finite() {
                    ok &= cut.hprime_ratio >= exact.hprime;
                }
            }
        }
    }
    // graph eigenfield sweeps
    for _ in 0..15 {
        let n = rng.gen_range(3..=12);
        let (net, c) = instances::random_graph_pair(&mut rng, n);
        let spectrum = steklov_spectrum(&net, 2).unwrap();
        let field: Vec<f64> =
            spectrum.extensions[1].iter().map(|&x| if x > 0.0 { x * x } else { 0.0 }).collect();
        let exact = enumerate_constants_with_cap(&c, VOLUME, 22).unwrap();
        let sweep = sweep_cuts(&c, &field, VOLUME);
        for cut in &sweep.cuts {
            ok &= cut.h_ratio >= exact.h;
            if cut.hprime_ratio.is_finite() {
                ok &= cut.hprime_ratio >= exact.hprime;
            }
        }
    }
    line("10 sweep ratios dominate exact minima on every enumerable instance", ok);
}

#[test]
fn criterion_11_study_determinism() {
    let run_all = |dir: &std::path::Path| -> Vec<(String, Vec<u8>)> {
        let studies: Vec<StudyReport> = vec![
            thin_product_study(std::f64::consts::TAU, &[0.4, 0.2], 0.1).unwrap(),
            {
                let (net, c) = instances::p3();
                scaling_study(&net, &c, None, Dimension::new(1).unwrap(), &[1.0, 2.0, 5.0], VOLUME)
                    .unwrap()
            },
            dumbbell_study(1.0, &[0.5, 0.25], 0.5, 0.1).unwrap(),
            convergence_study(ConvergenceShape::Disk, &[0.3, 0.2, 0.15]).unwrap(),
            convergence_study(ConvergenceShape::IntervalChain, &[2.0, 4.0, 10.0]).unwrap(),
            steklov::experiments::bound_violation_survey(0, 10).unwrap(),
        ];
        let mut files = Vec::new();
        for s in studies {
            let (j, c) = s.emit(dir).unwrap();
            for p in [j, c] {
                files.push((
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
        files.sort();
        files
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let a = run_all(d1.path());
    let b = run_all(d2.path());
    let ok = a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| x.0 == y.0 && x.1 == y.1);
    line("11 every study emits byte-identical CSV and JSON across repeated runs", ok);
}
