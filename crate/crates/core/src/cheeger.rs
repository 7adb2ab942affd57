//! The two isoperimetric constants of a complex: h (interior perimeter over
//! volume) and h' (interior perimeter over exterior boundary), exactly by
//! subset enumeration on small complexes, approximately by level-set sweeps
//! and greedy local search.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::complex::BoundaryComplex;
use crate::error::{Error, Result};

/// Default cell-count cap for exact enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 22;

/// Relative slack on the half-constraint comparisons; absorbs roundoff on
/// exactly-half ties without admitting any honestly oversized subset.
const HALF_SLACK: f64 = 1e-12;

/// Which family of admissible subsets the infima run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum ConstraintVariant {
    /// Subsets with positive volume at most half the total volume.
    VolumeHalf,
    /// Nonempty subsets whose exterior boundary weight is at most half the
    /// total boundary weight.
    BoundaryHalf,
}

impl ConstraintVariant {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintVariant::VolumeHalf => "volume",
            ConstraintVariant::BoundaryHalf => "boundary",
        }
    }
}

impl std::fmt::Display for ConstraintVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cut, volume, and exterior boundary weight of one subset, always computed
/// in declaration order (interfaces, then cells, then faces) so equal
/// subsets give bitwise equal measures on every code path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub cut: f64,
    pub volume: f64,
    pub boundary: f64,
}

pub fn subset_measures(c: &BoundaryComplex, in_set: &[bool]) -> Measures {
    let mut cut = 0.0;
    for f in c.interfaces() {
        if in_set[f.a] != in_set[f.b] {
            cut += f.weight;
        }
    }
    let mut volume = 0.0;
    for (cell, &inside) in in_set.iter().enumerate() {
        if inside {
            volume += c.cell_volume(cell);
        }
    }
    let mut boundary = 0.0;
    for f in c.boundary_faces() {
        if in_set[f.cell] {
            boundary += f.weight;
        }
    }
    Measures { cut, volume, boundary }
}

fn fits_half(x: f64, total: f64) -> bool {
    x <= 0.5 * total * (1.0 + HALF_SLACK)
}

/// Variant constraint on canonical measures; emptiness is checked separately.
pub fn admissible(m: &Measures, variant: ConstraintVariant, totals: &Measures) -> bool {
    match variant {
        ConstraintVariant::VolumeHalf => m.volume > 0.0 && fits_half(m.volume, totals.volume),
        ConstraintVariant::BoundaryHalf => fits_half(m.boundary, totals.boundary),
    }
}

/// One admissible subset with its two ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// Sorted cell ids.
    pub subset: Vec<usize>,
    /// Interior perimeter over volume; infinite when the volume vanishes.
    pub h_ratio: f64,
    /// Interior perimeter over exterior boundary; infinite exactly when the
    /// subset carries no exterior boundary weight.
    pub hprime_ratio: f64,
    pub variant: ConstraintVariant,
    /// True when produced by exact enumeration rather than a heuristic.
    pub exact: bool,
    pub measures: Measures,
}

impl CutResult {
    fn from_membership(
        c: &BoundaryComplex,
        in_set: &[bool],
        variant: ConstraintVariant,
        exact: bool,
    ) -> Self {
        let measures = subset_measures(c, in_set);
        let subset = (0..c.cell_count()).filter(|&i| in_set[i]).collect();
        CutResult {
            subset,
            h_ratio: ratio(measures.cut, measures.volume),
            hprime_ratio: ratio(measures.cut, measures.boundary),
            variant,
            exact,
            measures,
        }
    }

    pub fn membership(&self, cells: usize) -> Vec<bool> {
        let mut m = vec![false; cells];
        for &i in &self.subset {
            m[i] = true;
        }
        m
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

// Export format: subset ids, both ratios, variant, exact flag. Infinite
// ratios serialize as null.
impl Serialize for CutResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        fn finite_or_none(x: f64) -> Option<f64> {
            x.is_finite().then_some(x)
        }
        let mut st = s.serialize_struct("CutResult", 5)?;
        st.serialize_field("subset", &self.subset)?;
        st.serialize_field("h_ratio", &finite_or_none(self.h_ratio))?;
        st.serialize_field("hprime_ratio", &finite_or_none(self.hprime_ratio))?;
        st.serialize_field("variant", &self.variant)?;
        st.serialize_field("exact", &self.exact)?;
        st.end()
    }
}

/// Exact minima of both ratios with their witnesses. Infinite minima carry
/// no witness (the infimum over an empty family).
#[derive(Debug, Clone, Serialize)]
pub struct CheegerConstants {
    pub h: f64,
    pub h_witness: Option<CutResult>,
    pub hprime: f64,
    pub hprime_witness: Option<CutResult>,
}

/// (ratio, cardinality, lexicographic ids) candidate order. Lex order on
/// sorted id vectors of equal cardinality: the subset containing the
/// smallest id in the symmetric difference comes first.
#[derive(Clone, Copy)]
struct Incumbent {
    ratio: f64,
    cardinality: u32,
    mask: u64,
}

impl Incumbent {
    fn none() -> Self {
        Incumbent { ratio: f64::INFINITY, cardinality: 0, mask: 0 }
    }

    fn beats(&self, ratio: f64, cardinality: u32, mask: u64) -> bool {
        if ratio != self.ratio {
            return ratio < self.ratio;
        }
        if self.mask == 0 {
            return ratio.is_finite();
        }
        if cardinality != self.cardinality {
            return cardinality < self.cardinality;
        }
        let diff = mask ^ self.mask;
        if diff == 0 {
            return false;
        }
        mask & (diff & diff.wrapping_neg()) != 0
    }
}

fn mask_membership(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

fn finish(
    c: &BoundaryComplex,
    best_h: Incumbent,
    best_hp: Incumbent,
    variant: ConstraintVariant,
) -> CheegerConstants {
    let n = c.cell_count();
    let witness = |inc: &Incumbent| {
        (inc.mask != 0).then(|| {
            CutResult::from_membership(c, &mask_membership(inc.mask, n), variant, true)
        })
    };
    CheegerConstants {
        h: best_h.ratio,
        h_witness: witness(&best_h),
        hprime: best_hp.ratio,
        hprime_witness: witness(&best_hp),
    }
}

/// Exact minima over all admissible subsets with the default cap.
pub fn enumerate_constants(
    c: &BoundaryComplex,
    variant: ConstraintVariant,
) -> Result<CheegerConstants> {
    enumerate_constants_with_cap(c, variant, DEFAULT_ENUMERATION_CAP)
}

/// Exact minima over all admissible subsets, iterating subset masks in Gray
/// code order so each step updates the cut incrementally in O(degree).
///
/// Incremental floating sums drift, so they are used only as a generous
/// screen; every candidate that might improve the incumbent is recomputed in
/// canonical order before comparison, and the running state is refreshed
/// periodically. The minima therefore match the naive oracle bit for bit on
/// weights within a sane dynamic range.
pub fn enumerate_constants_with_cap(
    c: &BoundaryComplex,
    variant: ConstraintVariant,
    cap: usize,
) -> Result<CheegerConstants> {
    let n = c.cell_count();
    if n > cap.min(63) {
        return Err(Error::EnumerationTooLarge { cells: n, cap: cap.min(63) });
    }
    let totals = subset_measures(c, &vec![true; n]);
    let half_pad_vol = 1e-9 * totals.volume.abs();
    let half_pad_bnd = 1e-9 * totals.boundary.abs();
    let adj = c.adjacency();
    let face_weight = c.cell_boundary_weight();

    let mut best_h = Incumbent::none();
    let mut best_hp = Incumbent::none();

    let mut in_set = vec![false; n];
    let mut mask: u64 = 0;
    let mut cut = 0.0;
    let mut volume = 0.0;
    let mut boundary = 0.0;

    let total: u64 = 1 << n;
    for i in 1..total {
        let bit = i.trailing_zeros() as usize;
        // flip cell `bit`: every incident interface changes sides
        let entering = !in_set[bit];
        for &(iface, other) in &adj[bit] {
            let w = c.interfaces()[iface].weight;
            if in_set[other] == entering {
                cut -= w;
            } else {
                cut += w;
            }
        }
        if entering {
            volume += c.cell_volume(bit);
            boundary += face_weight[bit];
        } else {
            volume -= c.cell_volume(bit);
            boundary -= face_weight[bit];
        }
        in_set[bit] = entering;
        mask ^= 1 << bit;

        if i % 4096 == 0 {
            let fresh = subset_measures(c, &in_set);
            cut = fresh.cut;
            volume = fresh.volume;
            boundary = fresh.boundary;
        }

        let cardinality = mask.count_ones();
        let screen_admissible = match variant {
            ConstraintVariant::VolumeHalf => {
                volume > -half_pad_vol && volume <= 0.5 * totals.volume + half_pad_vol
            }
            ConstraintVariant::BoundaryHalf => boundary <= 0.5 * totals.boundary + half_pad_bnd,
        };
        if !screen_admissible {
            continue;
        }

        let screen_h = volume > 0.0 && cut / volume <= best_h.ratio * (1.0 + 1e-6)
            || best_h.ratio.is_infinite();
        let screen_hp = boundary > half_pad_bnd.max(0.0)
            && cut / boundary <= best_hp.ratio * (1.0 + 1e-6)
            || best_hp.ratio.is_infinite();
        if !(screen_h || screen_hp) {
            continue;
        }

        let exact = subset_measures(c, &in_set);
        if !admissible(&exact, variant, &totals) {
            continue;
        }
        if exact.volume > 0.0 {
            let r = exact.cut / exact.volume;
            if best_h.beats(r, cardinality, mask) {
                best_h = Incumbent { ratio: r, cardinality, mask };
            }
        }
        if exact.boundary > 0.0 {
            let r = exact.cut / exact.boundary;
            if best_hp.beats(r, cardinality, mask) {
                best_hp = Incumbent { ratio: r, cardinality, mask };
            }
        }
    }
    Ok(finish(c, best_h, best_hp, variant))
}

/// Independent brute-force reference: plain binary mask order, measures
/// recomputed from scratch for every subset. Same canonical summation order
/// as `subset_measures` (declaration order), so the minima of the two
/// enumerations agree bit for bit.
pub fn enumerate_constants_naive_oracle(
    c: &BoundaryComplex,
    variant: ConstraintVariant,
    cap: usize,
) -> Result<CheegerConstants> {
    let n = c.cell_count();
    if n > cap.min(63) {
        return Err(Error::EnumerationTooLarge { cells: n, cap: cap.min(63) });
    }
    let all = vec![true; n];
    let mut totals = Measures { cut: 0.0, volume: 0.0, boundary: 0.0 };
    for f in c.interfaces() {
        let _ = f; // no interface crosses the full set
    }
    for cell in 0..n {
        totals.volume += c.cell_volume(cell);
    }
    for f in c.boundary_faces() {
        totals.boundary += f.weight;
    }
    debug_assert_eq!(subset_measures(c, &all).volume, totals.volume);

    let mut best_h = Incumbent::none();
    let mut best_hp = Incumbent::none();
    for mask in 1u64..(1 << n) {
        let mut in_set = vec![false; n];
        for (i, flag) in in_set.iter_mut().enumerate() {
            *flag = mask >> i & 1 == 1;
        }
        let mut m = Measures { cut: 0.0, volume: 0.0, boundary: 0.0 };
        for f in c.interfaces() {
            if in_set[f.a] != in_set[f.b] {
                m.cut += f.weight;
            }
        }
        for (cell, &inside) in in_set.iter().enumerate() {
            if inside {
                m.volume += c.cell_volume(cell);
            }
        }
        for f in c.boundary_faces() {
            if in_set[f.cell] {
                m.boundary += f.weight;
            }
        }
        let ok = match variant {
            ConstraintVariant::VolumeHalf => {
                m.volume > 0.0 && m.volume <= 0.5 * totals.volume * (1.0 + HALF_SLACK)
            }
            ConstraintVariant::BoundaryHalf => {
                m.boundary <= 0.5 * totals.boundary * (1.0 + HALF_SLACK)
            }
        };
        if !ok {
            continue;
        }
        let cardinality = mask.count_ones();
        if m.volume > 0.0 {
            let r = m.cut / m.volume;
            if best_h.beats(r, cardinality, mask) {
                best_h = Incumbent { ratio: r, cardinality, mask };
            }
        }
        if m.boundary > 0.0 {
            let r = m.cut / m.boundary;
            if best_hp.beats(r, cardinality, mask) {
                best_hp = Incumbent { ratio: r, cardinality, mask };
            }
        }
    }
    Ok(finish(c, best_h, best_hp, variant))
}

/// Superlevel-set cuts of a cell field with the best entries flagged.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    /// Admissible superlevel sets in ascending threshold order.
    pub cuts: Vec<CutResult>,
    /// Index into `cuts` of the smallest finite h ratio.
    pub best_h: Option<usize>,
    /// Index into `cuts` of the smallest finite h' ratio.
    pub best_hprime: Option<usize>,
}

/// For each distinct positive field value t (ascending) forms the superlevel
/// set of cells with value >= t, keeps the admissible ones, and flags the
/// best h and h' entries. A constant field yields no cuts.
pub fn sweep_cuts(
    c: &BoundaryComplex,
    cell_field: &[f64],
    variant: ConstraintVariant,
) -> SweepOutcome {
    assert_eq!(cell_field.len(), c.cell_count());
    let constant = cell_field.windows(2).all(|w| w[0] == w[1]);
    if constant {
        return SweepOutcome { cuts: Vec::new(), best_h: None, best_hprime: None };
    }
    let mut thresholds: Vec<f64> = cell_field.iter().copied().filter(|&v| v > 0.0).collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();

    let n = c.cell_count();
    let totals = subset_measures(c, &vec![true; n]);
    let mut cuts = Vec::new();
    for &t in &thresholds {
        let in_set: Vec<bool> = cell_field.iter().map(|&v| v >= t).collect();
        if !in_set.iter().any(|&b| b) {
            continue;
        }
        let m = subset_measures(c, &in_set);
        if admissible(&m, variant, &totals) {
            cuts.push(CutResult::from_membership(c, &in_set, variant, false));
        }
    }
    let best_of = |key: fn(&CutResult) -> f64| {
        let mut best: Option<usize> = None;
        for (i, r) in cuts.iter().enumerate() {
            if key(r).is_finite() && best.is_none_or(|b| key(r) < key(&cuts[b])) {
                best = Some(i);
            }
        }
        best
    };
    let best_h = best_of(|r| r.h_ratio);
    let best_hprime = best_of(|r| r.hprime_ratio);
    SweepOutcome { cuts, best_h, best_hprime }
}

/// Objective minimized by local search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutObjective {
    H,
    HPrime,
}

/// Greedy single-cell improvement from an admissible seed: toggles cells in
/// ascending id order, accepting any move that keeps the subset admissible
/// and strictly decreases the objective ratio, until a full pass makes no
/// change. Deterministic; never returns a worse cut than the seed.
pub fn local_search_improve(
    c: &BoundaryComplex,
    seed: &CutResult,
    objective: CutObjective,
) -> Result<CutResult> {
    let n = c.cell_count();
    let totals = subset_measures(c, &vec![true; n]);
    let mut in_set = seed.membership(n);
    let m = subset_measures(c, &in_set);
    if !in_set.iter().any(|&b| b) || !admissible(&m, seed.variant, &totals) {
        return Err(Error::InadmissibleSeed { variant: seed.variant.name() });
    }
    let objective_of = |m: &Measures| match objective {
        CutObjective::H => ratio(m.cut, m.volume),
        CutObjective::HPrime => ratio(m.cut, m.boundary),
    };
    let mut current = objective_of(&m);
    loop {
        let mut improved = false;
        for cell in 0..n {
            in_set[cell] = !in_set[cell];
            let keep = if in_set.iter().any(|&b| b) {
                let m = subset_measures(c, &in_set);
                let r = objective_of(&m);
                if admissible(&m, seed.variant, &totals) && r < current {
                    current = r;
                    true
                } else {
                    false
                }
            } else {
                false
            };
            if keep {
                improved = true;
            } else {
                in_set[cell] = !in_set[cell];
            }
        }
        if !improved {
            break;
        }
    }
    Ok(CutResult::from_membership(c, &in_set, seed.variant, false))
}
