//! Per-instance certificate for the lower bound sigma_1 >= h h' / 4:
//! sign normalization of the eigenfield, the superlevel-set threshold
//! table, the discrete co-area identities, and the chain of inequalities,
//! all replayable from the serialized certificate alone.

use serde::{Deserialize, Serialize};

use crate::cheeger::{admissible, subset_measures, CheegerConstants, ConstraintVariant};
use crate::complex::{BoundaryComplex, SteklovNetwork};
use crate::error::{Error, Result};
use crate::fem::{cell_average_field, Topology, TriangleMesh};
use crate::solver::Eigenpair;

/// Identity tolerance used when replaying a certificate: discrete co-area
/// and the table minima are identities up to roundoff.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Whether the instance came from a 2D mesh discretization or from an
/// abstract graph with independently chosen energy and measure weights.
/// The final inequality is asserted hard only on mesh instances; abstract
/// graphs record it as data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceKind {
    FemMesh,
    AbstractGraph,
}

mod maybe_infinite {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(E::custom(format!("bad float {other}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// One superlevel set D_t = {u >= t} of u = (positive part of the field)
/// squared, with its canonical measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub t: f64,
    pub cut: f64,
    pub volume: f64,
    pub boundary: f64,
    pub admissible: bool,
}

/// The three co-area quantities computed both ways: directly on the field
/// and as threshold-weighted sums over the table. Discretely these are
/// identities, not approximations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoareaIdentities {
    pub tv_direct: f64,
    pub tv_coarea: f64,
    pub volume_direct: f64,
    pub volume_coarea: f64,
    pub boundary_direct: f64,
    pub boundary_coarea: f64,
}

/// Evaluated expressions of the inequality chain on the discrete data.
/// The restricted Dirichlet quantities are available on graph instances
/// only, where cells and vertices share an index space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainValues {
    /// Energy over edges with both endpoints in the positivity set.
    pub dirichlet_m_plus: Option<f64>,
    /// Boundary mass of the squared field over boundary vertices in the
    /// positivity set.
    pub boundary_mass_m_plus: Option<f64>,
    /// Ratio of the two; close to sigma_1 in the continuum limit.
    pub restricted_rayleigh: Option<f64>,
    /// Total variation of u across interfaces; the gradient integral of the
    /// squared eigenfunction.
    pub tv: f64,
    /// tv / 2; the mixed term bounded by Cauchy-Schwarz.
    pub grad_half: f64,
    /// Volume integral of u.
    pub volume_integral: f64,
    /// Exterior boundary integral of u.
    pub boundary_integral: f64,
    /// tv^2 / (4 volume_integral boundary_integral); dominates the bound.
    #[serde(with = "maybe_infinite")]
    pub ratio_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub name: String,
    pub pass: bool,
    /// Hard steps must pass for the certificate to verify; soft steps are
    /// recorded as data.
    pub hard: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub steps: Vec<StepResult>,
    pub hard_pass: bool,
    pub all_pass: bool,
}

impl VerdictSummary {
    pub fn step(&self, name: &str) -> Option<&StepResult> {
        self.steps.iter().find(|s| s.name == name)
    }
}

/// The replayed proof chain for one eigenpair on one complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub sigma1: f64,
    pub variant: ConstraintVariant,
    pub instance_kind: InstanceKind,
    /// True when the field sign was flipped to make the positivity set small.
    pub sign_flipped: bool,
    /// Sorted cell ids of the strict positivity set.
    pub m_plus: Vec<usize>,
    pub threshold_table: Vec<ThresholdRow>,
    pub coarea: CoareaIdentities,
    pub chain: ChainValues,
    #[serde(with = "maybe_infinite")]
    pub h_eff: f64,
    #[serde(with = "maybe_infinite")]
    pub hprime_eff: f64,
    #[serde(with = "maybe_infinite")]
    pub bound: f64,
    /// Exact constants of this same complex, when enumeration was feasible.
    pub exact_h: Option<f64>,
    pub exact_hprime: Option<f64>,
    /// Inequality tolerance the verdict was built with.
    pub tolerance: f64,
    pub verdict: VerdictSummary,
}

/// Values below this relative size count as lying on the zero set: solver
/// eigenfields carry roundoff noise where the exact field vanishes, and the
/// strict positivity set must not depend on its sign.
pub const FIELD_ZERO_SNAP: f64 = 1e-12;

/// Chooses the sign of a cell field so the strict positivity set satisfies
/// the variant's smallness constraint. Entries within `FIELD_ZERO_SNAP`
/// (relative) of zero are snapped to exact zero first. If both signs
/// qualify the smaller volume wins, and on a volume tie the sign making the
/// first nonzero cell positive. Returns the snapped signed field and the
/// sorted positivity set.
pub fn extract_m_plus(
    c: &BoundaryComplex,
    cell_field: &[f64],
    variant: ConstraintVariant,
) -> Result<(Vec<f64>, Vec<usize>, bool)> {
    assert_eq!(cell_field.len(), c.cell_count());
    let max_abs = cell_field.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let cell_field: Vec<f64> = cell_field
        .iter()
        .map(|&x| if x.abs() <= FIELD_ZERO_SNAP * max_abs { 0.0 } else { x })
        .collect();
    if cell_field.iter().all(|&x| x == 0.0) {
        return Err(Error::Certificate("field is identically zero".into()));
    }
    let n = c.cell_count();
    let totals = subset_measures(c, &vec![true; n]);
    let plus: Vec<bool> = cell_field.iter().map(|&x| x > 0.0).collect();
    let minus: Vec<bool> = cell_field.iter().map(|&x| x < 0.0).collect();
    let measure = |set: &[bool]| subset_measures(c, set);
    let ok = |set: &[bool]| {
        set.iter().any(|&b| b) && admissible(&measure(set), variant, &totals)
    };
    let plus_ok = ok(&plus);
    let minus_ok = ok(&minus);
    let flip = match (plus_ok, minus_ok) {
        (false, false) => {
            let mp = measure(&plus);
            let mm = measure(&minus);
            return Err(Error::NoAdmissibleSign {
                reason: format!(
                    "positive side volume {} boundary {}, negative side volume {} boundary {}, totals volume {} boundary {}",
                    mp.volume, mp.boundary, mm.volume, mm.boundary, totals.volume, totals.boundary
                ),
            });
        }
        (true, false) => false,
        (false, true) => true,
        (true, true) => {
            let vp = measure(&plus).volume;
            let vm = measure(&minus).volume;
            if vp != vm {
                vm < vp
            } else {
                // tie: make the first nonzero cell positive
                let first = cell_field.iter().find(|&&x| x != 0.0).copied().unwrap();
                first < 0.0
            }
        }
    };
    let signed: Vec<f64> = if flip {
        cell_field.iter().map(|&x| -x).collect()
    } else {
        cell_field.to_vec()
    };
    let m_plus: Vec<usize> = (0..n).filter(|&i| signed[i] > 0.0).collect();
    Ok((signed, m_plus, flip))
}

/// Options for building a certificate around `build_certificate`.
pub struct CertificateOptions {
    pub variant: ConstraintVariant,
    pub instance_kind: InstanceKind,
    /// Exact constants of the same complex, when available.
    pub exact: Option<(f64, f64)>,
    /// Inequality tolerance for the verdict.
    pub tolerance: f64,
}

impl CertificateOptions {
    pub fn new(variant: ConstraintVariant, instance_kind: InstanceKind) -> Self {
        Self { variant, instance_kind, exact: None, tolerance: 1e-8 }
    }

    pub fn with_exact(mut self, exact: &CheegerConstants) -> Self {
        self.exact = Some((exact.h, exact.hprime));
        self
    }
}

/// Builds the certificate for one eigenvalue and its cell field. The chain's
/// restricted Dirichlet entries stay empty here; the graph and mesh wrappers
/// fill what their instance supports.
pub fn build_certificate(
    c: &BoundaryComplex,
    cell_field: &[f64],
    sigma1: f64,
    opts: &CertificateOptions,
) -> Result<Certificate> {
    let (signed, m_plus, sign_flipped) = extract_m_plus(c, cell_field, opts.variant)?;
    let mut cert = certificate_from_signed(c, &signed, m_plus, sign_flipped, sigma1, opts)?;
    cert.verdict = verify_chain(&cert, opts.tolerance);
    Ok(cert)
}

fn certificate_from_signed(
    c: &BoundaryComplex,
    signed: &[f64],
    m_plus: Vec<usize>,
    sign_flipped: bool,
    sigma1: f64,
    opts: &CertificateOptions,
) -> Result<Certificate> {
    let n = c.cell_count();
    let u: Vec<f64> = signed.iter().map(|&x| if x > 0.0 { x * x } else { 0.0 }).collect();
    let mut thresholds: Vec<f64> = u.iter().copied().filter(|&v| v > 0.0).collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();
    if thresholds.is_empty() {
        return Err(Error::EmptyThresholdTable);
    }

    let totals = subset_measures(c, &vec![true; n]);
    let mut table = Vec::with_capacity(thresholds.len());
    for &t in &thresholds {
        let in_set: Vec<bool> = u.iter().map(|&v| v >= t).collect();
        let m = subset_measures(c, &in_set);
        table.push(ThresholdRow {
            t,
            cut: m.cut,
            volume: m.volume,
            boundary: m.boundary,
            admissible: admissible(&m, opts.variant, &totals),
        });
    }

    // direct co-area quantities in canonical declaration order
    let mut tv_direct = 0.0;
    for f in c.interfaces() {
        tv_direct += f.weight * (u[f.a] - u[f.b]).abs();
    }
    let mut volume_direct = 0.0;
    for (cell, &uc) in u.iter().enumerate() {
        volume_direct += c.cell_volume(cell) * uc;
    }
    let mut boundary_direct = 0.0;
    for f in c.boundary_faces() {
        boundary_direct += f.weight * u[f.cell];
    }
    let coarea_sum = |col: &dyn Fn(&ThresholdRow) -> f64| {
        let mut prev = 0.0;
        let mut acc = 0.0;
        for row in &table {
            acc += (row.t - prev) * col(row);
            prev = row.t;
        }
        acc
    };
    let coarea = CoareaIdentities {
        tv_direct,
        tv_coarea: coarea_sum(&|r| r.cut),
        volume_direct,
        volume_coarea: coarea_sum(&|r| r.volume),
        boundary_direct,
        boundary_coarea: coarea_sum(&|r| r.boundary),
    };

    let (h_eff, hprime_eff) = table_minima(&table);
    let bound = quarter_product(h_eff, hprime_eff);

    let ratio_product = if volume_direct > 0.0 && boundary_direct > 0.0 {
        0.25 * tv_direct * tv_direct / (volume_direct * boundary_direct)
    } else {
        f64::INFINITY
    };
    let chain = ChainValues {
        dirichlet_m_plus: None,
        boundary_mass_m_plus: None,
        restricted_rayleigh: None,
        tv: tv_direct,
        grad_half: 0.5 * tv_direct,
        volume_integral: volume_direct,
        boundary_integral: boundary_direct,
        ratio_product,
    };

    Ok(Certificate {
        sigma1,
        variant: opts.variant,
        instance_kind: opts.instance_kind,
        sign_flipped,
        m_plus,
        threshold_table: table,
        coarea,
        chain,
        h_eff,
        hprime_eff,
        bound,
        exact_h: opts.exact.map(|(h, _)| h),
        exact_hprime: opts.exact.map(|(_, hp)| hp),
        tolerance: opts.tolerance,
        verdict: VerdictSummary { steps: Vec::new(), hard_pass: false, all_pass: false },
    })
}

fn table_minima(table: &[ThresholdRow]) -> (f64, f64) {
    let mut h_eff = f64::INFINITY;
    let mut hp_eff = f64::INFINITY;
    for row in table {
        if !row.admissible {
            continue;
        }
        if row.volume > 0.0 {
            h_eff = h_eff.min(row.cut / row.volume);
        }
        if row.boundary > 0.0 {
            hp_eff = hp_eff.min(row.cut / row.boundary);
        }
    }
    (h_eff, hp_eff)
}

fn quarter_product(h: f64, hp: f64) -> f64 {
    if h.is_finite() && hp.is_finite() {
        0.25 * h * hp
    } else {
        f64::INFINITY
    }
}

/// Certificate for a graph instance, where cells and vertices share one
/// index space: the eigenfield is the cell field, and the chain records the
/// Dirichlet energy and boundary mass restricted to the positivity set.
pub fn certify_graph(
    net: &SteklovNetwork,
    c: &BoundaryComplex,
    pair: &Eigenpair,
    variant: ConstraintVariant,
    exact: Option<&CheegerConstants>,
) -> Result<Certificate> {
    if net.vertex_count() != c.cell_count() {
        return Err(Error::Certificate(format!(
            "network has {} vertices but complex has {} cells",
            net.vertex_count(),
            c.cell_count()
        )));
    }
    let mut opts = CertificateOptions::new(variant, InstanceKind::AbstractGraph);
    if let Some(e) = exact {
        opts = opts.with_exact(e);
    }
    let (signed, m_plus, sign_flipped) = extract_m_plus(c, &pair.field, variant)?;
    let mut cert =
        certificate_from_signed(c, &signed, m_plus.clone(), sign_flipped, pair.value, &opts)?;

    let in_plus = |v: usize| signed[v] > 0.0;
    let mut energy = 0.0;
    for e in net.edges() {
        if in_plus(e.a) && in_plus(e.b) {
            let d = signed[e.a] - signed[e.b];
            energy += e.conductance * d * d;
        }
    }
    let mut bmass = 0.0;
    for (v, &value) in signed.iter().enumerate() {
        if net.is_boundary(v) && value > 0.0 {
            bmass += net.boundary_mass(v) * value * value;
        }
    }
    cert.chain.dirichlet_m_plus = Some(energy);
    cert.chain.boundary_mass_m_plus = Some(bmass);
    cert.chain.restricted_rayleigh = (bmass > 0.0).then(|| energy / bmass);

    cert.verdict = verify_chain(&cert, opts.tolerance);
    Ok(cert)
}

/// Certificate for a mesh instance: the eigenfield is transferred to cells
/// by per-triangle averaging, and the final inequality is a hard check.
pub fn certify_mesh(
    mesh: &TriangleMesh,
    topo: &Topology,
    c: &BoundaryComplex,
    pair: &Eigenpair,
    variant: ConstraintVariant,
) -> Result<Certificate> {
    if c.cell_count() != mesh.triangle_count() {
        return Err(Error::Certificate(format!(
            "mesh has {} triangles but complex has {} cells",
            mesh.triangle_count(),
            c.cell_count()
        )));
    }
    let cell_field = cell_average_field(mesh, topo, &pair.field);
    let opts = CertificateOptions::new(variant, InstanceKind::FemMesh);
    build_certificate(c, &cell_field, pair.value, &opts)
}

/// Replays every recorded identity and inequality from the certificate's
/// own data: identities to `IDENTITY_TOLERANCE` relative, inequalities to
/// `tol`. The final bound is a hard step on mesh instances and recorded
/// data on abstract graphs.
pub fn verify_chain(cert: &Certificate, tol: f64) -> VerdictSummary {
    let mut steps = Vec::new();
    let mut push = |name: &str, pass: bool, hard: bool, residual: f64| {
        steps.push(StepResult { name: name.into(), pass, hard, residual });
    };

    // (structure) thresholds ascend and the superlevel sets are nested:
    // monotone volume and boundary columns
    let t = &cert.threshold_table;
    let ascending = t.windows(2).all(|w| w[0].t < w[1].t) && t.iter().all(|r| r.t > 0.0);
    push("thresholds_ascending", ascending, true, 0.0);
    let nested = t
        .windows(2)
        .all(|w| w[1].volume <= w[0].volume && w[1].boundary <= w[0].boundary);
    push("table_nested", nested, true, 0.0);

    // (a) co-area identities
    let ident = |direct: f64, coarea: f64| {
        let scale = direct.abs().max(coarea.abs()).max(1.0);
        (direct - coarea).abs() / scale
    };
    let r = ident(cert.coarea.tv_direct, cert.coarea.tv_coarea);
    push("coarea_tv", r <= IDENTITY_TOLERANCE, true, r);
    let r = ident(cert.coarea.volume_direct, cert.coarea.volume_coarea);
    push("coarea_volume", r <= IDENTITY_TOLERANCE, true, r);
    let r = ident(cert.coarea.boundary_direct, cert.coarea.boundary_coarea);
    push("coarea_boundary", r <= IDENTITY_TOLERANCE, true, r);

    // (table minima) stored infima match the table
    let (h_eff, hp_eff) = table_minima(t);
    let same = |a: f64, b: f64| {
        if a.is_finite() || b.is_finite() {
            ident(a, b)
        } else {
            0.0
        }
    };
    let r = same(h_eff, cert.h_eff);
    push("h_eff_is_table_minimum", r <= IDENTITY_TOLERANCE, true, r);
    let r = same(hp_eff, cert.hprime_eff);
    push("hprime_eff_is_table_minimum", r <= IDENTITY_TOLERANCE, true, r);
    let r = same(quarter_product(cert.h_eff, cert.hprime_eff), cert.bound);
    push("bound_is_quarter_product", r <= IDENTITY_TOLERANCE, true, r);

    // (chain) co-area turns the table minima into chain inequalities
    let scale = cert.chain.tv.abs().max(1.0);
    if cert.h_eff.is_finite() {
        let lhs = cert.chain.tv;
        let rhs = cert.h_eff * cert.chain.volume_integral;
        push("tv_dominates_h_eff_volume", lhs >= rhs - tol * scale, true, (rhs - lhs) / scale);
    }
    if cert.hprime_eff.is_finite() {
        let lhs = cert.chain.tv;
        let rhs = cert.hprime_eff * cert.chain.boundary_integral;
        push("tv_dominates_hprime_eff_boundary", lhs >= rhs - tol * scale, true, (rhs - lhs) / scale);
    }
    if cert.bound.is_finite() && cert.chain.ratio_product.is_finite() {
        let r = cert.bound - cert.chain.ratio_product;
        push(
            "ratio_product_dominates_bound",
            cert.chain.ratio_product >= cert.bound * (1.0 - tol),
            true,
            r,
        );
    }

    // (b) sweep infima dominate the exact constants of the same complex
    if let (Some(h), Some(hp)) = (cert.exact_h, cert.exact_hprime) {
        let pass = cert.h_eff >= h * (1.0 - tol) || !h.is_finite();
        push("h_eff_dominates_exact_h", pass, true, h - cert.h_eff);
        let pass = cert.hprime_eff >= hp * (1.0 - tol) || !hp.is_finite();
        push("hprime_eff_dominates_exact_hprime", pass, true, hp - cert.hprime_eff);
        let exact_bound = quarter_product(h, hp);
        if exact_bound.is_finite() {
            let pass = exact_bound <= cert.sigma1 * (1.0 + tol);
            push(
                "exact_bound_below_sigma1",
                pass,
                cert.instance_kind == InstanceKind::FemMesh,
                exact_bound - cert.sigma1,
            );
        }
    }

    // (c) the final inequality; hard on mesh instances
    let pass = cert.bound <= cert.sigma1 * (1.0 + tol);
    push(
        "bound_below_sigma1",
        pass,
        cert.instance_kind == InstanceKind::FemMesh,
        cert.bound - cert.sigma1,
    );

    let hard_pass = steps.iter().filter(|s| s.hard).all(|s| s.pass);
    let all_pass = steps.iter().all(|s| s.pass);
    VerdictSummary { steps, hard_pass, all_pass }
}

/// CSV of the threshold table: t,cut,volume,boundary,admissible.
pub fn threshold_table_csv(cert: &Certificate) -> String {
    let mut out = String::from("t,cut,volume,boundary,admissible\n");
    for row in &cert.threshold_table {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.t, row.cut, row.volume, row.boundary, row.admissible
        ));
    }
    out
}

pub fn certificate_to_json(cert: &Certificate) -> Result<String> {
    Ok(serde_json::to_string_pretty(cert)?)
}

pub fn certificate_from_json(text: &str) -> Result<Certificate> {
    Ok(serde_json::from_str(text)?)
}
