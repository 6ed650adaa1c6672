//! Constructive degree-of-freedom counting for the order-doubling smoothness
//! family, computed by closed-form binomial arithmetic — deliberately
//! independent of the index partition so the two routes can arbitrate each
//! other — plus assembly of the concrete nodal-functional list.
//!
//! Per face of dimension d and derivative order q, the owned-index count
//! factors as (off-face derivative distributions) × (on-face points): the
//! first factor is a plain composition count, the second a box/corner-chopped
//! lattice count whose bounds come from sub-face pre-emption.

use crate::bernstein::{
    classify_raw, family_profile, index_iter, partition, BernsteinIndex, FaceTable,
    PartitionReport, SmoothnessProfile,
};
use crate::combinatorics::{
    binomial, binomial_or_zero, bounded_sum_count, chopped_count, poly_dim, Count,
};
use crate::simplex::{domain_point, faces, BaryPoint, Face};
use crate::{Error, Result};

/// Per-order counts for all faces of one dimension.
/// `per_order` entries are counts for a single face with the off-face
/// derivative directions already folded in; `total` covers all faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofCount {
    pub face_dim: usize,
    pub num_faces: u64,
    pub per_order: Vec<(u32, Count)>,
    pub per_face_total: Count,
    pub total: Count,
}

/// 4-face counts plus the layer decomposition of the order-1 block by the
/// first on-face coordinate (values 2..=16 for the degree-33 element).
/// `order1_summary` keeps the first six layers individually and aggregates
/// layers 7-15 into a final tail entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourFaceCount {
    pub count: DofCount,
    pub order1_layers: Vec<(u32, Count)>,
    pub order1_summary: Vec<Count>,
}

/// Interior count computed twice: `direct` by explicit lattice-point
/// arithmetic, `residual` by subtracting every proper-face total from the
/// full polynomial dimension. Construction fails unless they agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteriorCount {
    pub direct: Count,
    pub residual: Count,
}

impl InteriorCount {
    pub fn total(&self) -> &Count {
        &self.direct
    }
}

/// The full constructive count table of one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementCounts {
    pub profile: SmoothnessProfile,
    pub faces: Vec<DofCount>,
    pub interior: InteriorCount,
    pub grand_total: Count,
}

fn require_family(profile: &SmoothnessProfile) -> Result<u32> {
    profile.family_smoothness().ok_or_else(|| {
        Error::UnsupportedProfile(format!(
            "constructive counting covers the order-doubling family only; \
             orders {:?} with degree {} are outside it",
            profile.orders(),
            profile.degree()
        ))
    })
}

fn require_smoothness_one(profile: &SmoothnessProfile, what: &str) -> Result<()> {
    if require_family(profile)? != 1 {
        return Err(Error::UnsupportedProfile(format!(
            "{what} counts are implemented for smoothness 1 in dimension {}; higher \
             smoothness enters a pair-constraint regime that is not tabulated",
            profile.ambient_dim()
        )));
    }
    Ok(())
}

// Compositions of q over the off-face vertices: the number of mixed
// normal-derivative multi-orders of total order q at a dimension-d face.
fn off_face_distributions(n: usize, face_dim: usize, q: u32) -> Result<Count> {
    let free = (n - face_dim - 1) as u64;
    binomial(q as u64 + free, free)
}

fn assemble(face_dim: usize, n: usize, per_order: Vec<(u32, Count)>) -> Result<DofCount> {
    let num_faces = binomial(n as u64 + 1, face_dim as u64 + 1)?
        .to_u64()
        .expect("face counts fit u64 for n <= 5");
    let mut per_face_total = Count::zero();
    for (_, c) in &per_order {
        per_face_total += c;
    }
    let total = per_face_total.clone() * num_faces;
    Ok(DofCount {
        face_dim,
        num_faces,
        per_order,
        per_face_total,
        total,
    })
}

/// Vertex DOFs: order-t block is the full derivative grid {|β| ≤ r_0} at the
/// vertex, so the order-t count is C(t+n-1, n-1) and the per-vertex total
/// telescopes to C(n+r_0, r_0).
pub fn count_vertex_dofs(profile: &SmoothnessProfile) -> Result<DofCount> {
    require_family(profile)?;
    let n = profile.ambient_dim();
    let r0 = profile.order(0);
    let mut per_order = Vec::new();
    for t in 0..=r0 {
        per_order.push((t, off_face_distributions(n, 0, t)?));
    }
    let count = assemble(0, n, per_order)?;
    // The telescoped form must reproduce the sum (hockey-stick identity).
    let closed = crate::combinatorics::hockey_stick_a(n - 1, r0);
    if count.per_face_total != closed {
        return Err(Error::InternalVerification(format!(
            "vertex sum {} disagrees with closed form {closed}",
            count.per_face_total
        )));
    }
    Ok(count)
}

/// Edge DOFs: at order t there are t on-edge splits (the two endpoint
/// entries range over [r_0+1-t, r_0]) times C(t+n-2, n-2) off-edge
/// derivative distributions.
pub fn count_edge_dofs(profile: &SmoothnessProfile) -> Result<DofCount> {
    require_family(profile)?;
    let n = profile.ambient_dim();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "a 1-simplex has no proper edges".into(),
        ));
    }
    let r1 = profile.order(1);
    let mut per_order = Vec::new();
    for t in 1..=r1 {
        per_order.push((t, off_face_distributions(n, 1, t)? * t as u64));
    }
    assemble(1, n, per_order)
}

/// Triangle DOFs: on-face points at order q form the degree-(k-q) grid with
/// every entry in [r_1+1-q, k-r_0-1]; after shifting off the lower bound the
/// count is dim P_s on the triangle minus three over-the-top corners of
/// degree q-2 (the corner size collapses to q-2 for every family profile).
pub fn count_triangle_dofs(profile: &SmoothnessProfile) -> Result<DofCount> {
    require_family(profile)?;
    let n = profile.ambient_dim();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "a {n}-simplex has no proper triangle faces"
        )));
    }
    let k = profile.degree() as i64;
    let r1 = profile.order(1) as i64;
    let r2 = profile.order(2);
    let mut per_order = Vec::new();
    for q in 0..=r2 {
        let shifted = k + 2 * q as i64 - 3 * r1 - 3;
        let mut points = Count::from_u64(0) + &binomial_or_zero(shifted + 2, 2);
        if q >= 2 {
            points = points.checked_sub(&(poly_dim(2, q - 2) * 3u64))?;
        }
        per_order.push((q, points * off_face_distributions(n, 2, q)?));
    }
    assemble(2, n, per_order)
}

/// Tetrahedron DOFs, smoothness 1 only. For q ≤ 1 the on-face points form a
/// box [r_2+1-q, k-r_0-1]^4 (pair bounds are implied), counted as a shifted
/// simplex grid minus four over-the-top corners. The q = 2 block of the
/// degree-33 element needs its pair bounds: the count splits into four
/// boundary slices (one coordinate pinned at its minimum 3, where the
/// remaining triangle grid is degree 16 less three degree-3 corners) plus
/// the all-above-minimum block (degree 15 less four degree-2 corners).
pub fn count_tet_dofs(profile: &SmoothnessProfile) -> Result<DofCount> {
    let n = profile.ambient_dim();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "a {n}-simplex has no proper tetrahedron faces"
        )));
    }
    require_smoothness_one(profile, "tetrahedron")?;
    let k = profile.degree() as i64;
    let r0 = profile.order(0) as i64;
    let r2 = profile.order(2) as i64;
    let r3 = profile.order(3);
    let upper = k - r0 - 1;
    let mut per_order = Vec::new();
    for q in 0..=r3 {
        let points = if q <= 1 {
            let low = r2 + 1 - q as i64;
            let shifted = k - q as i64 - 4 * low;
            let corner = k - q as i64 - 3 * low - upper - 1;
            (Count::zero() + &binomial_or_zero(shifted + 3, 3))
                .checked_sub(&(Count::from_u64(4) * binomial_or_zero(corner + 3, 3)))?
        } else {
            // q == 2 happens only for the degree-33 element (r_3 = 2).
            chopped_count(2, 16, Some(3))? * 4u64 + chopped_count(3, 15, Some(2))?
        };
        per_order.push((q, points * off_face_distributions(n, 3, q)?));
    }
    assemble(3, n, per_order)
}

// Order-1 on-face layer of a 4-face, sliced by the first two on-face
// coordinates a and c: the remaining three entries sum to S = 32-a-c, sit in
// the box [2, 16] sharpened by the pair bounds with a and c and the triple
// bound with both, and their own pair bounds force each entry ≥ S-24.
fn four_face_order1_layer(profile: &SmoothnessProfile, a: u32) -> Count {
    let k = profile.degree() as i64;
    let single = k - profile.order(0) as i64 - 1;
    let pair = k - profile.order(1) as i64 - 1;
    let triple = k - profile.order(2) as i64 - 1;
    let low = profile.order(3) as i64; // r_3 + 1 - q at q = 1
    let a = a as i64;
    let mut layer = Count::zero();
    for c in low..=single {
        if a + c > pair {
            continue;
        }
        let s = k - 1 - a - c;
        let lo = (s - pair).max(low);
        let hi = single.min(pair - a).min(pair - c).min(triple - a - c);
        layer += &bounded_sum_count(3, s, lo, hi);
    }
    layer
}

/// 4-face DOFs of the degree-33 element. Order 0 is a pure box count
/// (degree-18 grid on the 4-face minus five degree-4 corners); order 1 is
/// assembled layer by layer over the first on-face coordinate, and the
/// layers 7-15 tail is checked against its closed form.
pub fn count_4face_dofs(profile: &SmoothnessProfile) -> Result<FourFaceCount> {
    let n = profile.ambient_dim();
    if n != 5 {
        return Err(Error::InvalidArgument(format!(
            "4-face counts need a 5-simplex, got dimension {n}"
        )));
    }
    require_smoothness_one(profile, "4-face")?;
    let k = profile.degree() as i64;
    let r0 = profile.order(0) as i64;
    let r4 = profile.order(4);
    debug_assert_eq!(r4, 1);

    // Order 0: entries in [r_4+2, k-r_0-1] = [3,16]; all pair/triple bounds
    // are implied by the box, leaving dim P_18 minus five degree-4 corners.
    let low0 = r4 as i64 + 2;
    let upper = k - r0 - 1;
    let order0 = chopped_count(
        4,
        (k - 5 * low0) as u32,
        Some((k - 4 * low0 - upper - 1) as u32),
    )?;

    // Order 1: box [2,16] with active pair bounds; slice on the first
    // on-face coordinate.
    let mut order1_layers = Vec::new();
    let mut order1 = Count::zero();
    for a in 2..=upper as u32 {
        let layer = four_face_order1_layer(profile, a);
        order1 += &layer;
        order1_layers.push((a, layer));
    }

    // Tail identity: layers with first coordinate ≥ 8 collapse to a shifted
    // grid count C(20,4) minus one oversize corner C(11,4) minus the 36
    // first-coordinate pair violations, 4 per partner coordinate and 9 per
    // split. Disagreement means the slicing above is wrong.
    let mut tail = Count::zero();
    for (a, layer) in &order1_layers {
        if *a >= 8 {
            tail += layer;
        }
    }
    let tail_closed =
        (binomial(20, 4)?.checked_sub(&binomial(11, 4)?))?.checked_sub(&(binomial(4, 3)? * 36u64))?;
    if tail != tail_closed {
        return Err(Error::InternalVerification(format!(
            "4-face order-1 tail {tail} disagrees with closed form {tail_closed}"
        )));
    }

    let mut summary: Vec<Count> = order1_layers
        .iter()
        .filter(|(a, _)| *a < 8)
        .map(|(_, c)| c.clone())
        .collect();
    summary.push(tail);

    let count = assemble(4, n, vec![(0, order0), (1, order1)])?;
    Ok(FourFaceCount {
        count,
        order1_layers,
        order1_summary: summary,
    })
}

// Interior of the degree-33 element: entries in [2,16] with pair sums ≤ 24.
// First layer (first entry = 2) by two-coordinate slicing, the rest
// (first entry ≥ 3) in closed form.
fn interior_direct_dim5(profile: &SmoothnessProfile) -> Result<Count> {
    let k = profile.degree() as i64;
    let single = k - profile.order(0) as i64 - 1; // 16
    let pair = k - profile.order(1) as i64 - 1; // 24
    let low = 2i64;

    let mut first_layer = Count::zero();
    for a in low..=single {
        for c in low..=single {
            if a + c > pair {
                continue;
            }
            // Triple bounds are slack here: the six entries still free sum
            // high enough that no triple can reach its cap.
            let s = k - 2 - a - c;
            let lo = (s - pair).max(low);
            let hi = single.min(pair - a).min(pair - c);
            first_layer += &bounded_sum_count(3, s, lo, hi);
        }
    }

    // First entry ≥ 3: after shifting (3 off the first entry, 2 off the
    // rest) the total is 20; subtract the six single-coordinate cap
    // violations (the first coordinate's cap sits one lower, splitting the
    // usual 6·C(10,5) + C(10,4)) and the 40 first-coordinate pair
    // violations (8 splits × 5 partners); no other violation fits in 20.
    let unconstrained = binomial(25, 5)?;
    let rest = unconstrained
        .checked_sub(&(binomial(10, 5)? * 6u64))?
        .checked_sub(&binomial(10, 4)?)?
        .checked_sub(&Count::from_u64(40))?;

    Ok(first_layer + rest)
}

fn proper_face_total(profile: &SmoothnessProfile) -> Result<Count> {
    let n = profile.ambient_dim();
    let mut sum = count_vertex_dofs(profile)?.total;
    if n >= 2 {
        sum += &count_edge_dofs(profile)?.total;
    }
    if n >= 3 {
        sum += &count_triangle_dofs(profile)?.total;
    }
    if n >= 4 {
        sum += &count_tet_dofs(profile)?.total;
    }
    if n == 5 {
        sum += &count_4face_dofs(profile)?.count.total;
    }
    Ok(sum)
}

/// Interior DOFs, counted twice: directly (box counts in dimensions ≤ 4,
/// the layered decomposition in dimension 5) and as the residual of the
/// polynomial dimension after all proper-face counts. The two must agree.
pub fn count_interior_dofs(profile: &SmoothnessProfile) -> Result<InteriorCount> {
    let m = require_family(profile)?;
    let n = profile.ambient_dim();
    let k = profile.degree() as i64;
    let r_last = profile.order(n - 1) as i64;
    let upper = k - profile.order(0) as i64 - 1;
    // Interior means: further than r_{n-1} from every facet (entries
    // ≥ r_{n-1}+1) and outside every lower face's range. In dimensions ≤ 4
    // (smoothness 1 at 4) the box below captures all of that; pair bounds
    // are implied.
    let direct = match n {
        1 => bounded_sum_count(2, k, r_last + 1, k),
        2 | 3 => bounded_sum_count(n + 1, k, r_last + 1, upper),
        4 if m == 1 => bounded_sum_count(5, k, r_last + 1, upper),
        5 if m == 1 => interior_direct_dim5(profile)?,
        _ => {
            return Err(Error::UnsupportedProfile(format!(
                "interior counts in dimension {n} are implemented for smoothness 1 only"
            )))
        }
    };
    let residual = poly_dim(n, profile.degree())
        .checked_sub(&proper_face_total(profile)?)
        .map_err(|_| {
            Error::InternalVerification(
                "proper-face counts exceed the polynomial dimension".into(),
            )
        })?;
    if direct != residual {
        return Err(Error::InternalVerification(format!(
            "interior count mismatch: direct {direct}, residual {residual}"
        )));
    }
    Ok(InteriorCount { direct, residual })
}

/// Full constructive count table; fails unless the face and interior counts
/// add up to the polynomial dimension.
pub fn element_counts(profile: &SmoothnessProfile) -> Result<ElementCounts> {
    let n = profile.ambient_dim();
    let mut face_counts = Vec::new();
    for d in 0..n {
        let count = match d {
            0 => count_vertex_dofs(profile)?,
            1 => count_edge_dofs(profile)?,
            2 => count_triangle_dofs(profile)?,
            3 => count_tet_dofs(profile)?,
            4 => count_4face_dofs(profile)?.count,
            _ => unreachable!("profiles stop at dimension 5"),
        };
        face_counts.push(count);
    }
    let interior = count_interior_dofs(profile)?;
    let mut grand_total = interior.total().clone();
    for c in &face_counts {
        grand_total += &c.total;
    }
    let expected = poly_dim(n, profile.degree());
    if grand_total != expected {
        return Err(Error::InternalVerification(format!(
            "count table sums to {grand_total}, polynomial dimension is {expected}"
        )));
    }
    Ok(ElementCounts {
        profile: profile.clone(),
        faces: face_counts,
        interior,
        grand_total,
    })
}

/// One nodal functional: mixed normal derivative of the given multi-order
/// (aligned with `normal_directions(owner)`), evaluated at a domain point
/// interior to the owner face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofFunctional {
    pub owner: Face,
    pub order: u32,
    pub direction_multiorder: Vec<u32>,
    pub point: BaryPoint,
    pub source_index: BernsteinIndex,
}

/// The complete nodal DOF set of one element, one functional per Bernstein
/// index, together with the ownership census it came from.
#[derive(Clone, Debug)]
pub struct ElementSpec {
    pub profile: SmoothnessProfile,
    pub functionals: Vec<DofFunctional>,
    pub counts: PartitionReport,
}

impl ElementSpec {
    pub fn dim(&self) -> usize {
        self.functionals.len()
    }
}

/// Builds the nodal functional list: every owned index α with ownership
/// (F, t) yields the mixed normal derivative whose multi-order is the
/// off-face restriction of α, evaluated at the domain point of the on-face
/// restriction at effective degree k-t. Interior indices yield plain point
/// evaluations. Functionals are sorted by (owner, order, source index).
pub fn build_element(n: usize, m: u32) -> Result<ElementSpec> {
    let profile = family_profile(n, m)?;
    let counts = partition(&profile)?;
    let k = profile.degree();
    let table = FaceTable::new(n);
    let faces_by_dim: Vec<Vec<Face>> = (0..n).map(|d| faces(n, d).expect("d < n")).collect();
    let full = Face::full(n);

    let mut functionals = Vec::new();
    for idx in index_iter(n, k)? {
        let entries = idx.entries();
        let (owner, order) = match classify_raw(&table, &profile, entries) {
            Some((d, pos, t)) => (faces_by_dim[d][pos].clone(), t),
            // Interior indices carry no derivative: plain evaluation.
            None => (full.clone(), 0),
        };
        let direction_multiorder: Vec<u32> =
            owner.off_vertices().iter().map(|&v| entries[v]).collect();
        let on_face: Vec<u32> = owner.vertices().iter().map(|&v| entries[v]).collect();
        let point = domain_point(&owner, &on_face, k - order)?;
        functionals.push(DofFunctional {
            owner,
            order,
            direction_multiorder,
            point,
            source_index: idx,
        });
    }
    functionals.sort_by(|a, b| {
        (&a.owner, a.order, &a.source_index).cmp(&(&b.owner, b.order, &b.source_index))
    });

    let expected = poly_dim(n, k);
    if Count::from_u64(functionals.len() as u64) != expected {
        return Err(Error::InternalVerification(format!(
            "built {} functionals, expected {expected}",
            functionals.len()
        )));
    }
    Ok(ElementSpec {
        profile,
        functionals,
        counts,
    })
}
