//! Machine verification of the element construction, all in exact arithmetic
//! with zero tolerance: counting identities (closed-form formulas against the
//! raw index partition and pinned reference values), unisolvence of the nodal
//! matrix by exact rank, and derivative continuity across a two-element mesh.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::bernstein::{
    enumerate_indices, family_profile, partition, PartitionReport, SmoothnessProfile,
};
use crate::combinatorics::{poly_dim, Count};
use crate::dofs::{build_element, element_counts, ElementCounts, ElementSpec};
use crate::polynomial::{
    exact_rank, solve_linear_system, vandermonde, Polynomial, Rational,
};
use crate::simplex::{faces, normal_directions, BaryPoint, Direction, Face};
use crate::{Error, Result};

/// Default bound on the nodal-matrix dimension for unisolvence runs. Exact
/// rank computation on the degree-33 element (501942 x 501942) is far beyond
/// desk scale, so oversized requests are refused instead of attempted.
pub const DEFAULT_UNISOLVENCE_CAP: usize = 10_000;

// Deterministic 64-bit LCG (Knuth's multiplier/increment pair), used for
// reproducible pseudo-random DOF values and sample points.
struct Lcg {
    state: u64,
}

impl Lcg {
    fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    // Uniform-enough draw below `n`; the ranges here are tiny compared to
    // 2^64, so modulo bias is irrelevant for verification purposes.
    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

fn random_value(lcg: &mut Lcg) -> Rational {
    let num = lcg.below(201) as i64 - 100;
    let den = 1 + lcg.below(10) as i64;
    Rational::new(num.into(), den.into())
}

/// Outcome of the counting cross-check for one profile: the raw partition,
/// the constructive table when the profile supports one, and every observed
/// disagreement. An empty mismatch list means all routes agree.
#[derive(Clone, Debug, PartialEq)]
pub struct CountComparison {
    pub profile: SmoothnessProfile,
    pub partition: PartitionReport,
    pub constructive: Option<ElementCounts>,
    pub mismatches: Vec<String>,
    pub symmetric: bool,
    pub reference_constants_checked: bool,
}

impl CountComparison {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn pin(label: String, actual: Count, expect: u64, mismatches: &mut Vec<String>) {
    if actual != Count::from_u64(expect) {
        mismatches.push(format!(
            "{label}: partition owns {actual}, reference value is {expect}"
        ));
    }
}

// Pinned values for the two profiles with independently tabulated counts:
// the quintic triangle and the degree-33 element on the 5-simplex.
fn check_reference_constants(
    profile: &SmoothnessProfile,
    report: &PartitionReport,
    mismatches: &mut Vec<String>,
) -> Result<bool> {
    let n = profile.ambient_dim();
    let m = profile.family_smoothness();
    if n == 2 && m == Some(1) {
        for (d, expect) in [18u64, 3, 0].into_iter().enumerate() {
            pin(
                format!("dimension-{d} total"),
                report.per_dim_totals()[d].clone(),
                expect,
                mismatches,
            );
        }
        return Ok(true);
    }
    if n == 5 && m == Some(1) {
        for (d, expect) in [122_094u64, 47_520, 57_820, 91_890, 119_730, 62_888]
            .into_iter()
            .enumerate()
        {
            pin(
                format!("dimension-{d} total"),
                report.per_dim_totals()[d].clone(),
                expect,
                mismatches,
            );
        }
        pin(
            "grand total".into(),
            report.grand_total().clone(),
            501_942,
            mismatches,
        );
        let first = |d: usize| -> Result<Face> { Ok(faces(5, d)?.swap_remove(0)) };
        pin(
            "per-vertex total".into(),
            report.face_total(&first(0)?),
            20_349,
            mismatches,
        );
        pin(
            "per-edge total".into(),
            report.face_total(&first(1)?),
            3_168,
            mismatches,
        );
        let triangle = first(2)?;
        for (q, expect) in [(0u32, 28u64), (1, 135), (2, 378), (3, 820), (4, 1530)] {
            pin(
                format!("triangle order {q}"),
                report.face_order_count(&triangle, q),
                expect,
                mismatches,
            );
        }
        let tet = first(3)?;
        for (q, expect) in [(0u32, 544u64), (1, 1778), (2, 3804)] {
            pin(
                format!("tetrahedron order {q}"),
                report.face_order_count(&tet, q),
                expect,
                mismatches,
            );
        }
        let hyper = first(4)?;
        for (q, expect) in [(0u32, 6965u64), (1, 12_990)] {
            pin(
                format!("4-face order {q}"),
                report.face_order_count(&hyper, q),
                expect,
                mismatches,
            );
        }
        return Ok(true);
    }
    Ok(false)
}

/// Cross-checks the counting routes for the family profile (n, m): the raw
/// index partition against the closed-form table (where the formulas are
/// implemented), face-to-face symmetry, the polynomial-dimension total, and
/// pinned reference constants for the tabulated profiles.
pub fn verify_counts(n: usize, m: u32) -> Result<CountComparison> {
    let profile = family_profile(n, m)?;
    let report = partition(&profile)?;
    let constructive = match element_counts(&profile) {
        Ok(table) => Some(table),
        Err(Error::UnsupportedProfile(_)) => None,
        Err(e) => return Err(e),
    };
    let mut mismatches = Vec::new();

    let expected = poly_dim(n, profile.degree());
    if report.grand_total() != &expected {
        mismatches.push(format!(
            "partition covers {} of {} indices",
            report.grand_total(),
            expected
        ));
    }

    // Faces of equal dimension are interchangeable by vertex relabeling, so
    // their order histograms must match exactly.
    let mut symmetric = true;
    for d in 0..n {
        let dim_faces = faces(n, d)?;
        let histograms: Vec<_> = dim_faces.iter().map(|f| report.counts().get(f)).collect();
        if histograms.windows(2).any(|w| w[0] != w[1]) {
            symmetric = false;
            mismatches.push(format!(
                "dimension-{d} faces own different order histograms"
            ));
        }
    }

    if let Some(table) = &constructive {
        for face_count in &table.faces {
            let d = face_count.face_dim;
            if report.per_dim_totals()[d] != face_count.total {
                mismatches.push(format!(
                    "dimension {d}: partition owns {}, formulas give {}",
                    report.per_dim_totals()[d],
                    face_count.total
                ));
            }
            let mut formula_orders = BTreeSet::new();
            for (q, per_face) in &face_count.per_order {
                formula_orders.insert(*q);
                let expect = per_face.clone() * face_count.num_faces;
                let actual = report.dim_order_total(d, *q);
                if actual != expect {
                    mismatches.push(format!(
                        "dimension {d} order {q}: partition owns {actual}, formulas give {expect}"
                    ));
                }
            }
            for (face, orders) in report.counts() {
                if face.dim() != d || face.is_full_simplex() {
                    continue;
                }
                for q in orders.keys() {
                    if !formula_orders.contains(q) {
                        mismatches.push(format!(
                            "dimension {d}: partition owns indices at order {q}, formulas have none"
                        ));
                    }
                }
            }
        }
        let interior = &report.per_dim_totals()[n];
        if interior != table.interior.total() {
            mismatches.push(format!(
                "interior: partition owns {interior}, formulas give {}",
                table.interior.total()
            ));
        }
        if &table.grand_total != report.grand_total() {
            mismatches.push(format!(
                "formula table sums to {}, partition to {}",
                table.grand_total,
                report.grand_total()
            ));
        }
    }

    let reference_constants_checked =
        check_reference_constants(&profile, &report, &mut mismatches)?;

    Ok(CountComparison {
        profile,
        partition: report,
        constructive,
        mismatches,
        symmetric,
        reference_constants_checked,
    })
}

/// Result of the exact-rank unisolvence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnisolvenceReport {
    pub profile: SmoothnessProfile,
    pub matrix_dim: usize,
    pub rank: usize,
}

impl UnisolvenceReport {
    pub fn passed(&self) -> bool {
        self.rank == self.matrix_dim
    }
}

/// Certifies unisolvence of the family element (n, m): assembles the full
/// nodal matrix over exact rationals and computes its rank by fraction-free
/// elimination. `cap` bounds the matrix dimension (default
/// `DEFAULT_UNISOLVENCE_CAP`); larger elements are refused up front.
pub fn verify_unisolvence(n: usize, m: u32, cap: Option<usize>) -> Result<UnisolvenceReport> {
    let cap = cap.unwrap_or(DEFAULT_UNISOLVENCE_CAP);
    let profile = family_profile(n, m)?;
    let dim = poly_dim(n, profile.degree());
    let within_cap = dim.to_u64().is_some_and(|d| d as usize <= cap);
    if !within_cap {
        return Err(Error::SizeExceeded(format!(
            "the nodal matrix would be {dim}x{dim} in exact rationals, above the cap of {cap}; \
             unisolvence runs are sized for desk-scale elements — raise the cap to force one"
        )));
    }
    let element = build_element(n, m)?;
    let matrix = vandermonde(&element, Some(cap))?;
    let rank = exact_rank(&matrix);
    Ok(UnisolvenceReport {
        profile,
        matrix_dim: matrix.len(),
        rank,
    })
}

/// Two n-simplices glued along the facet opposite vertex n: the first is the
/// reference simplex, the second keeps vertices 0..n-1 and reflects vertex n
/// through the shared facet. Both carry the same local DOF construction;
/// functionals owned by faces of the shared facet are identified.
#[derive(Clone, Debug)]
pub struct TwoElementMesh {
    pub element: ElementSpec,
    pub shared: Vec<bool>,
}

impl TwoElementMesh {
    pub fn build(n: usize, m: u32) -> Result<Self> {
        let element = build_element(n, m)?;
        let shared = element
            .functionals
            .iter()
            .map(|f| !f.owner.is_full_simplex() && !f.owner.contains(n))
            .collect();
        Ok(TwoElementMesh { element, shared })
    }

    pub fn shared_count(&self) -> usize {
        self.shared.iter().filter(|&&s| s).count()
    }

    /// Rewrites a barycentric direction of the first element in the frame of
    /// the second. Reflecting vertex n to the far side of the shared facet
    /// sends a global vector with first-frame weights d to
    /// (d_0 + 2 d_n, d_1, ..., d_{n-1}, -d_n): weights on shared vertices
    /// carry over, the reflected vertex flips sign, and vertex 0 absorbs the
    /// difference to keep the weights summing to zero.
    pub fn reflect_direction(direction: &Direction) -> Direction {
        let d = direction.deltas();
        let last = d.len() - 1;
        let mut out = d.to_vec();
        out[0] += 2 * d[last];
        out[last] = -d[last];
        Direction::new(out).expect("reflection preserves the zero sum")
    }
}

/// Outcome of the cross-element continuity check. `max_jump` is the largest
/// absolute derivative mismatch observed across all shared faces, derivative
/// multi-indices, and sample points — exactly zero when the check passes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityReport {
    pub profile: SmoothnessProfile,
    pub seed: u64,
    pub samples: usize,
    pub shared_dofs: usize,
    pub checked_jumps: usize,
    pub max_jump: Rational,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.max_jump.is_zero()
    }
}

// All derivative multi-orders over `vars` directions with total exactly
// `total`, lexicographic.
fn compositions(vars: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = remaining;
            out.push(cur.clone());
            return;
        }
        for v in 0..=remaining {
            cur[pos] = v;
            rec(pos + 1, remaining - v, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, total, &mut vec![0u32; vars], &mut out);
    out
}

// Mixed derivatives of p up to total order `max_order` along the given
// directions, built incrementally (each entry derives its predecessor).
fn derivative_table(
    p: &Polynomial,
    directions: &[Direction],
    max_order: u32,
) -> Result<BTreeMap<Vec<u32>, Polynomial>> {
    let vars = directions.len();
    let mut table = BTreeMap::new();
    table.insert(vec![0u32; vars], p.clone());
    for total in 1..=max_order {
        for beta in compositions(vars, total) {
            let i = beta.iter().position(|&b| b > 0).expect("total > 0");
            let mut parent = beta.clone();
            parent[i] -= 1;
            let poly = table[&parent].directional_derivative(&directions[i])?;
            table.insert(beta, poly);
        }
    }
    Ok(table)
}

fn vertex_point(n: usize, vertex: usize) -> Result<BaryPoint> {
    let mut coords = vec![Rational::zero(); n + 1];
    coords[vertex] = Rational::one();
    BaryPoint::new(coords)
}

// A pseudo-random point in the relative interior of a face: a denominator
// up to 100, split into dim+1 positive parts by distinct sorted cuts.
fn sample_point(face: &Face, lcg: &mut Lcg) -> Result<BaryPoint> {
    let n = face.ambient_dim();
    let d = face.dim();
    let min_den = (d as u64 + 1).max(2);
    let den = min_den + lcg.below(100 - min_den + 1);
    let mut cuts = BTreeSet::new();
    while cuts.len() < d {
        cuts.insert(1 + lcg.below(den - 1));
    }
    let mut parts = Vec::with_capacity(d + 1);
    let mut prev = 0u64;
    for &c in &cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(den - prev);
    let mut coords = vec![Rational::zero(); n + 1];
    for (&v, &p) in face.vertices().iter().zip(&parts) {
        coords[v] = Rational::new(p.into(), den.into());
    }
    BaryPoint::new(coords)
}

/// Certifies cross-element smoothness for the family element (n, m) on the
/// two-element mesh: both elements are solved for pseudo-random DOF values
/// that agree on every functional owned by a face of the shared facet (the
/// second element applying those functionals through its own frame), then
/// every ambient partial derivative of total order up to the face's
/// smoothness order is compared at sample points of each shared face. All
/// arithmetic is exact; any nonzero jump is a failure.
pub fn verify_continuity(n: usize, m: u32, seed: u64, samples: usize) -> Result<ContinuityReport> {
    if n > 3 {
        return Err(Error::InvalidArgument(format!(
            "continuity certification solves the nodal system twice in exact arithmetic and \
             is provided for dimensions 1 through 3; dimension {n} is beyond desk scale"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "need at least one sample point per shared face".into(),
        ));
    }
    let mesh = TwoElementMesh::build(n, m)?;
    let profile = mesh.element.profile.clone();
    let k = profile.degree();
    let dim = mesh.element.functionals.len();

    // First element: native nodal matrix. Second element: shared functionals
    // act through reflected directions (same barycentric points — shared-facet
    // coordinates agree between the frames); the rest are native.
    let matrix1 = vandermonde(&mesh.element, None)?;
    let basis = enumerate_indices(n, k)?;
    let mut matrix2 = matrix1.clone();
    for (i, functional) in mesh.element.functionals.iter().enumerate() {
        if !mesh.shared[i] {
            continue;
        }
        let steps: Vec<(Direction, u32)> = normal_directions(&functional.owner)?
            .iter()
            .map(TwoElementMesh::reflect_direction)
            .zip(functional.direction_multiorder.iter().copied())
            .collect();
        let row: Result<Vec<Rational>> = basis
            .iter()
            .map(|alpha| {
                Polynomial::bernstein_basis(alpha.clone())
                    .apply_derivatives(&steps)?
                    .eval(&functional.point)
            })
            .collect();
        matrix2[i] = row?;
    }

    let mut lcg = Lcg::new(seed);
    let values1: Vec<Rational> = (0..dim).map(|_| random_value(&mut lcg)).collect();
    let values2: Vec<Rational> = (0..dim)
        .map(|i| {
            if mesh.shared[i] {
                values1[i].clone()
            } else {
                random_value(&mut lcg)
            }
        })
        .collect();

    let coeffs1 = solve_linear_system(&matrix1, &values1)?.ok_or_else(|| {
        Error::InternalVerification("first-element nodal matrix is singular".into())
    })?;
    let coeffs2 = solve_linear_system(&matrix2, &values2)?.ok_or_else(|| {
        Error::InternalVerification("second-element nodal matrix is singular".into())
    })?;
    let p1 = Polynomial::from_dense(n, k, &coeffs1)?;
    let p2 = Polynomial::from_dense(n, k, &coeffs2)?;

    // Ambient partial d/dx_i is the vertex-0-to-vertex-i direction in the
    // first frame; the second frame uses the reflected weights.
    let dirs1: Vec<Direction> = (1..=n)
        .map(|i| Direction::between_vertices(n, 0, i))
        .collect::<Result<_>>()?;
    let dirs2: Vec<Direction> = dirs1.iter().map(TwoElementMesh::reflect_direction).collect();
    let r0 = profile.order(0);
    let table1 = derivative_table(&p1, &dirs1, r0)?;
    let table2 = derivative_table(&p2, &dirs2, r0)?;

    let mut max_jump = Rational::zero();
    let mut checked = 0usize;
    for d in 0..n {
        let order_bound = profile.order(d);
        for face in faces(n, d)? {
            if face.contains(n) {
                continue;
            }
            let points: Vec<BaryPoint> = if d == 0 {
                vec![vertex_point(n, face.vertices()[0])?]
            } else {
                (0..samples)
                    .map(|_| sample_point(&face, &mut lcg))
                    .collect::<Result<_>>()?
            };
            for (beta, derived1) in &table1 {
                if beta.iter().sum::<u32>() > order_bound {
                    continue;
                }
                let derived2 = &table2[beta];
                for point in &points {
                    let jump = (derived1.eval(point)? - derived2.eval(point)?).abs();
                    if jump > max_jump {
                        max_jump = jump;
                    }
                    checked += 1;
                }
            }
        }
    }

    Ok(ContinuityReport {
        profile,
        seed,
        samples,
        shared_dofs: mesh.shared_count(),
        checked_jumps: checked,
        max_jump,
    })
}
