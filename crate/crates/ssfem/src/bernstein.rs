//! Bernstein index bookkeeping: enumeration of the degree-k simplex grid,
//! face distances, smoothness profiles, and the ownership partition that
//! assigns every index to the face whose derivative data it carries.

use std::collections::BTreeMap;

use crate::combinatorics::{poly_dim, Count};
use crate::simplex::{faces, Face};
use crate::{Error, Result};

/// Exponent vector of one Bernstein basis function: n+1 nonnegative entries
/// (one per vertex) summing to the polynomial degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BernsteinIndex {
    entries: Vec<u32>,
}

impl BernsteinIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidArgument(
                "a Bernstein index needs at least two entries".into(),
            ));
        }
        Ok(BernsteinIndex { entries })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn ambient_dim(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }
}

impl std::fmt::Display for BernsteinIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Iterator over all degree-`k` Bernstein indices on an `n`-simplex in
/// lexicographic order of the entry tuple, from (0,...,0,k) to (k,0,...,0).
pub struct IndexIter {
    next: Option<Vec<u32>>,
}

impl Iterator for IndexIter {
    type Item = BernsteinIndex;

    fn next(&mut self) -> Option<BernsteinIndex> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let last = succ.len() - 1;
        if succ[last] > 0 {
            // Move one unit from the tail onto the entry before it.
            succ[last - 1] += 1;
            succ[last] -= 1;
            self.next = Some(succ);
        } else if let Some(j) = (0..last).rev().find(|&j| succ[j] > 0) {
            if j == 0 {
                self.next = None; // (k, 0, ..., 0) is the final index
            } else {
                let v = succ[j];
                succ[j] = 0;
                succ[j - 1] += 1;
                succ[last] = v - 1;
                self.next = Some(succ);
            }
        } else {
            self.next = None; // degree-zero grid has a single index
        }
        Some(BernsteinIndex { entries: current })
    }
}

/// Streaming enumeration of the degree-`k` grid on an `n`-simplex.
pub fn index_iter(n: usize, k: u32) -> Result<IndexIter> {
    if n == 0 {
        return Err(Error::InvalidArgument("ambient dimension must be positive".into()));
    }
    let mut first = vec![0u32; n + 1];
    first[n] = k;
    Ok(IndexIter { next: Some(first) })
}

/// All degree-`k` Bernstein indices on an `n`-simplex, lexicographic.
/// Materializes the full grid; use `index_iter` for the large dimensions.
pub fn enumerate_indices(n: usize, k: u32) -> Result<Vec<BernsteinIndex>> {
    Ok(index_iter(n, k)?.collect())
}

/// Distance from an index to a face: the degree minus the on-face entry sum,
/// i.e. the total weight the index places on off-face vertices.
pub fn face_distance(index: &BernsteinIndex, face: &Face) -> Result<u32> {
    if face.ambient_dim() != index.ambient_dim() {
        return Err(Error::InvalidArgument(format!(
            "face lives on a {}-simplex, index on a {}-simplex",
            face.ambient_dim(),
            index.ambient_dim()
        )));
    }
    let on_face: u32 = face.vertices().iter().map(|&v| index.entries()[v]).sum();
    Ok(index.degree() - on_face)
}

/// Smoothness requirements per face dimension, plus the polynomial degree.
/// `orders[d]` is the continuity order enforced across dimension-d faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothnessProfile {
    orders: Vec<u32>,
    degree: u32,
}

impl SmoothnessProfile {
    /// Validates that orders strictly decrease with face dimension and that
    /// the degree leaves room for two disjoint vertex neighborhoods
    /// (degree >= 2*orders[0] + 1).
    pub fn new(orders: Vec<u32>, degree: u32) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidArgument("profile has no orders".into()));
        }
        if !orders.windows(2).all(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(format!(
                "profile orders must strictly decrease, got {orders:?}"
            )));
        }
        if degree < 2 * orders[0] + 1 {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} too small for vertex order {}: need at least {}",
                orders[0],
                2 * orders[0] + 1
            )));
        }
        Ok(SmoothnessProfile { orders, degree })
    }

    pub fn ambient_dim(&self) -> usize {
        self.orders.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Order enforced on dimension-d faces.
    pub fn order(&self, face_dim: usize) -> u32 {
        self.orders[face_dim]
    }

    /// Smoothness parameter m when this is the doubling family
    /// (orders 2^(n-1-d) * m, degree 2^n * m + 1), else None.
    pub fn family_smoothness(&self) -> Option<u32> {
        let n = self.ambient_dim();
        let m = *self.orders.last().expect("non-empty");
        if m == 0 {
            return None;
        }
        let matches = (0..n).all(|d| {
            (1u64 << (n - 1 - d)) * m as u64 == self.orders[d] as u64
        });
        if matches && (1u64 << n) * m as u64 + 1 == self.degree as u64 {
            Some(m)
        } else {
            None
        }
    }
}

/// The order-doubling smoothness family: on an n-simplex with parameter m,
/// dimension-d faces get order 2^(n-1-d)*m and the degree is 2^n*m + 1.
/// Examples: (n=2, m=1) is the quintic C^1 triangle, (n=5, m=1) the
/// degree-33 C^1 element on the 5-simplex.
pub fn family_profile(n: usize, m: u32) -> Result<SmoothnessProfile> {
    if n == 0 || n > 5 {
        return Err(Error::UnsupportedDimension(n));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("smoothness parameter must be positive".into()));
    }
    let orders: Vec<u32> = (0..n)
        .map(|d| {
            u32::try_from((1u64 << (n - 1 - d)) * m as u64).map_err(|_| {
                Error::InvalidArgument(format!("smoothness {m} overflows the order range"))
            })
        })
        .collect::<Result<_>>()?;
    let degree = u32::try_from((1u64 << n) * m as u64 + 1)
        .map_err(|_| Error::InvalidArgument(format!("smoothness {m} overflows the degree range")))?;
    SmoothnessProfile::new(orders, degree)
}

/// The face an index belongs to, with the derivative order it encodes there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ownership {
    pub owner: Face,
    pub order: u32,
}

// Precomputed face lattice used by the classifier: vertex lists per dimension,
// in lexicographic order, so "first hit" realizes the lex tie-break.
pub(crate) struct FaceTable {
    by_dim: Vec<Vec<Vec<usize>>>,
}

impl FaceTable {
    pub(crate) fn new(n: usize) -> Self {
        let by_dim = (0..n)
            .map(|d| {
                faces(n, d)
                    .expect("d < n")
                    .into_iter()
                    .map(|f| f.vertices().to_vec())
                    .collect()
            })
            .collect();
        FaceTable { by_dim }
    }
}

// Core classifier on raw entries. Returns (face_dim, face_position, order)
// for proper-face owners, or None for interior; interior order is the
// minimum facet distance, which equals the smallest entry.
pub(crate) fn classify_raw(
    table: &FaceTable,
    profile: &SmoothnessProfile,
    entries: &[u32],
) -> Option<(usize, usize, u32)> {
    let degree = profile.degree();
    for (d, faces_d) in table.by_dim.iter().enumerate() {
        let r_d = profile.order(d);
        for (pos, verts) in faces_d.iter().enumerate() {
            let on_face: u32 = verts.iter().map(|&v| entries[v]).sum();
            let dist = degree - on_face;
            if dist <= r_d {
                return Some((d, pos, dist));
            }
        }
    }
    None
}

/// Assigns an index to the lowest-dimensional face within its smoothness
/// range (ties broken by lexicographically smallest vertex set), or to the
/// simplex interior when no proper face qualifies. Interior ownership
/// records the minimum facet distance as its order.
pub fn classify(profile: &SmoothnessProfile, index: &BernsteinIndex) -> Result<Ownership> {
    let n = profile.ambient_dim();
    if index.ambient_dim() != n {
        return Err(Error::InvalidArgument(format!(
            "index has ambient dimension {}, profile {}",
            index.ambient_dim(),
            n
        )));
    }
    if index.degree() != profile.degree() {
        return Err(Error::InvalidArgument(format!(
            "index degree {} does not match profile degree {}",
            index.degree(),
            profile.degree()
        )));
    }
    let table = FaceTable::new(n);
    match classify_raw(&table, profile, index.entries()) {
        Some((d, pos, order)) => Ok(Ownership {
            owner: faces(n, d)?.swap_remove(pos),
            order,
        }),
        None => Ok(Ownership {
            owner: Face::full(n),
            // Minimum facet distance; every facet omits one vertex, so this
            // is the smallest entry.
            order: *index.entries().iter().min().expect("non-empty"),
        }),
    }
}

/// Ownership census of the whole degree-k grid under a profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionReport {
    profile: SmoothnessProfile,
    counts: BTreeMap<Face, BTreeMap<u32, Count>>,
    per_dim_totals: Vec<Count>,
    grand_total: Count,
}

impl PartitionReport {
    pub fn profile(&self) -> &SmoothnessProfile {
        &self.profile
    }

    /// Per-face, per-order index counts, keyed bottom-up through the lattice.
    pub fn counts(&self) -> &BTreeMap<Face, BTreeMap<u32, Count>> {
        &self.counts
    }

    /// Indices owned by faces of each dimension; the last slot is the interior.
    pub fn per_dim_totals(&self) -> &[Count] {
        &self.per_dim_totals
    }

    pub fn grand_total(&self) -> &Count {
        &self.grand_total
    }

    pub fn face_order_count(&self, face: &Face, order: u32) -> Count {
        self.counts
            .get(face)
            .and_then(|m| m.get(&order))
            .cloned()
            .unwrap_or_else(Count::zero)
    }

    pub fn face_total(&self, face: &Face) -> Count {
        self.counts
            .get(face)
            .map(|m| {
                let mut acc = Count::zero();
                for v in m.values() {
                    acc += v;
                }
                acc
            })
            .unwrap_or_else(Count::zero)
    }

    /// Sum over all faces of one dimension at one order.
    pub fn dim_order_total(&self, face_dim: usize, order: u32) -> Count {
        let mut acc = Count::zero();
        for (face, orders) in &self.counts {
            if face.dim() == face_dim {
                if let Some(v) = orders.get(&order) {
                    acc += v;
                }
            }
        }
        acc
    }
}

/// Classifies every index of the grid and tallies ownership. Streaming:
/// memory stays proportional to the face lattice, not the grid.
pub fn partition(profile: &SmoothnessProfile) -> Result<PartitionReport> {
    let n = profile.ambient_dim();
    let k = profile.degree();
    let table = FaceTable::new(n);

    // (face_dim, face_position) -> order -> u64 tally; interior rides in the
    // extra slot at face_dim = n.
    let mut tallies: Vec<Vec<BTreeMap<u32, u64>>> = table
        .by_dim
        .iter()
        .map(|fs| vec![BTreeMap::new(); fs.len()])
        .collect();
    tallies.push(vec![BTreeMap::new()]);

    let mut grand = 0u64;
    let mut iter = index_iter(n, k)?;
    // Reuse the iterator's buffers via the streaming interface.
    for idx in iter.by_ref() {
        let entries = idx.entries();
        match classify_raw(&table, profile, entries) {
            Some((d, pos, order)) => *tallies[d][pos].entry(order).or_insert(0) += 1,
            None => {
                let order = *entries.iter().min().expect("non-empty");
                *tallies[n][0].entry(order).or_insert(0) += 1;
            }
        }
        grand += 1;
    }

    let mut counts = BTreeMap::new();
    let mut per_dim_totals = vec![Count::zero(); n + 1];
    for (d, dim_tallies) in tallies.iter().enumerate() {
        let dim_faces = if d < n {
            faces(n, d)?
        } else {
            vec![Face::full(n)]
        };
        for (face, orders) in dim_faces.into_iter().zip(dim_tallies) {
            let mut per_order = BTreeMap::new();
            for (&order, &tally) in orders {
                per_dim_totals[d] += &Count::from_u64(tally);
                per_order.insert(order, Count::from_u64(tally));
            }
            if !per_order.is_empty() {
                counts.insert(face, per_order);
            }
        }
    }

    let report = PartitionReport {
        profile: profile.clone(),
        counts,
        per_dim_totals,
        grand_total: Count::from_u64(grand),
    };
    // Totality: every index got exactly one owner.
    if &report.grand_total != &poly_dim(n, k) {
        return Err(Error::InternalVerification(format!(
            "partition covered {} indices, grid has {}",
            report.grand_total,
            poly_dim(n, k)
        )));
    }
    Ok(report)
}

/// Counts the indices owned by `face` at `order`, grouped by the index entry
/// at `layer_vertex`. Used to cross-check layered counting arguments against
/// the raw partition.
pub fn layer_counts(
    profile: &SmoothnessProfile,
    face: &Face,
    order: u32,
    layer_vertex: usize,
) -> Result<BTreeMap<u32, Count>> {
    let n = profile.ambient_dim();
    if face.ambient_dim() != n {
        return Err(Error::InvalidArgument(
            "face and profile ambient dimensions differ".into(),
        ));
    }
    if layer_vertex > n {
        return Err(Error::InvalidArgument(format!(
            "layer vertex {layer_vertex} out of range"
        )));
    }
    let table = FaceTable::new(n);
    let target = (face.dim(), face.vertices().to_vec());
    let mut layers: BTreeMap<u32, u64> = BTreeMap::new();
    for idx in index_iter(n, profile.degree())? {
        let entries = idx.entries();
        let owned = match classify_raw(&table, profile, entries) {
            Some((d, pos, o)) => o == order && (d, table.by_dim[d][pos].clone()) == target,
            None => face.is_full_simplex() && entries.iter().min() == Some(&order),
        };
        if owned {
            *layers.entry(entries[layer_vertex]).or_insert(0) += 1;
        }
    }
    Ok(layers
        .into_iter()
        .map(|(v, t)| (v, Count::from_u64(t)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(entries: &[u32]) -> BernsteinIndex {
        BernsteinIndex::new(entries.to_vec()).unwrap()
    }

    fn face(n: usize, verts: &[usize]) -> Face {
        Face::new(n, verts.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_counts_match_grid_dimensions() {
        for n in 1..=5usize {
            for k in 0..=6u32 {
                let all = enumerate_indices(n, k).unwrap();
                assert_eq!(
                    Count::from_u64(all.len() as u64),
                    poly_dim(n, k),
                    "grid ({n},{k})"
                );
                assert!(all.iter().all(|i| i.degree() == k));
            }
        }
        assert_eq!(enumerate_indices(2, 5).unwrap().len(), 21);
        assert_eq!(index_iter(5, 33).unwrap().count(), 501_942);
    }

    #[test]
    fn enumeration_is_lexicographic_and_duplicate_free() {
        let all = enumerate_indices(3, 4).unwrap();
        for pair in all.windows(2) {
            assert!(pair[0] < pair[1], "{} !< {}", pair[0], pair[1]);
        }
        assert_eq!(all.first().unwrap().entries(), &[0, 0, 0, 4]);
        assert_eq!(all.last().unwrap().entries(), &[4, 0, 0, 0]);
    }

    #[test]
    fn enumeration_matches_recursive_oracle() {
        fn recurse(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() == n {
                prefix.push(k);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for v in 0..=k {
                prefix.push(v);
                recurse(n, k - v, prefix, out);
                prefix.pop();
            }
        }
        for n in 1..=4usize {
            for k in 0..=5u32 {
                let mut oracle = Vec::new();
                recurse(n, k, &mut Vec::new(), &mut oracle);
                oracle.sort();
                let got: Vec<Vec<u32>> = enumerate_indices(n, k)
                    .unwrap()
                    .into_iter()
                    .map(|i| i.entries().to_vec())
                    .collect();
                assert_eq!(got, oracle, "({n},{k})");
            }
        }
    }

    #[test]
    fn face_distance_counts_off_face_weight() {
        let i = idx(&[1, 0, 0, 0, 16, 16]);
        assert_eq!(face_distance(&i, &face(5, &[4, 5])).unwrap(), 1);
        let j = idx(&[0, 0, 5, 5, 5, 18]);
        assert_eq!(face_distance(&j, &face(5, &[5])).unwrap(), 15);
        assert_eq!(face_distance(&j, &Face::full(5)).unwrap(), 0);
    }

    #[test]
    fn family_profiles_double_per_dimension() {
        let p = family_profile(5, 1).unwrap();
        assert_eq!(p.orders(), &[16, 8, 4, 2, 1]);
        assert_eq!(p.degree(), 33);
        assert_eq!(p.family_smoothness(), Some(1));

        let p = family_profile(2, 1).unwrap();
        assert_eq!(p.orders(), &[2, 1]);
        assert_eq!(p.degree(), 5);

        let p = family_profile(3, 1).unwrap();
        assert_eq!(p.orders(), &[4, 2, 1]);
        assert_eq!(p.degree(), 9);

        let p = family_profile(1, 1).unwrap();
        assert_eq!(p.orders(), &[1]);
        assert_eq!(p.degree(), 3);

        let p = family_profile(2, 2).unwrap();
        assert_eq!(p.orders(), &[4, 2]);
        assert_eq!(p.degree(), 9);

        assert!(family_profile(0, 1).is_err());
        assert!(family_profile(6, 1).is_err());
        assert!(family_profile(2, 0).is_err());
    }

    #[test]
    fn profile_validation_rejects_bad_shapes() {
        assert!(SmoothnessProfile::new(vec![2, 2], 9).is_err());
        assert!(SmoothnessProfile::new(vec![1, 2], 9).is_err());
        assert!(SmoothnessProfile::new(vec![2, 1], 4).is_err());
        let p = SmoothnessProfile::new(vec![3, 1], 7).unwrap();
        assert_eq!(p.family_smoothness(), None);
    }

    #[test]
    fn classify_picks_minimal_dimension_owner() {
        let p = family_profile(5, 1).unwrap();
        let o = classify(&p, &idx(&[2, 0, 3, 4, 7, 17])).unwrap();
        assert_eq!(o.owner, face(5, &[5]));
        assert_eq!(o.order, 16);

        let o = classify(&p, &idx(&[1, 0, 0, 0, 16, 16])).unwrap();
        assert_eq!(o.owner, face(5, &[4, 5]));
        assert_eq!(o.order, 1);
    }

    #[test]
    fn classify_interior_records_min_facet_distance() {
        let p = family_profile(3, 1).unwrap();
        let o = classify(&p, &idx(&[3, 2, 2, 2])).unwrap();
        assert!(o.owner.is_full_simplex());
        assert_eq!(o.order, 2);
    }

    #[test]
    fn classify_rejects_mismatched_degree() {
        let p = family_profile(2, 1).unwrap();
        assert!(classify(&p, &idx(&[1, 1, 1])).is_err());
        assert!(classify(&p, &idx(&[5, 0])).is_err());
    }

    #[test]
    fn quintic_triangle_partition_matches_hand_census() {
        // Degree 5, orders (2,1) on the triangle: by hand, each vertex owns
        // the six indices with that entry >= 3, each edge owns one index of
        // the shape (2,2,1), and nothing is interior.
        let p = family_profile(2, 1).unwrap();
        let report = partition(&p).unwrap();
        assert_eq!(
            report.per_dim_totals(),
            &[Count::from_u64(18), Count::from_u64(3), Count::zero()]
        );
        assert_eq!(report.grand_total(), &Count::from_u64(21));
        for v in faces(2, 0).unwrap() {
            assert_eq!(report.face_total(&v), Count::from_u64(6));
        }
        for e in faces(2, 1).unwrap() {
            assert_eq!(report.face_total(&e), Count::from_u64(1));
            assert_eq!(report.face_order_count(&e, 1), Count::from_u64(1));
            assert_eq!(report.face_order_count(&e, 0), Count::zero());
        }
    }

    #[test]
    fn partition_covers_small_family_grids() {
        for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)] {
            let p = family_profile(n, m).unwrap();
            let report = partition(&p).unwrap();
            assert_eq!(report.grand_total(), &poly_dim(n, p.degree()), "({n},{m})");
            let mut dims = Count::zero();
            for t in report.per_dim_totals() {
                dims += t;
            }
            assert_eq!(&dims, report.grand_total());
        }
    }

    #[test]
    fn cubic_hermite_line_partition() {
        let p = family_profile(1, 1).unwrap();
        let report = partition(&p).unwrap();
        assert_eq!(
            report.per_dim_totals(),
            &[Count::from_u64(4), Count::zero()]
        );
        let v0 = face(1, &[0]);
        assert_eq!(report.face_order_count(&v0, 0), Count::from_u64(1));
        assert_eq!(report.face_order_count(&v0, 1), Count::from_u64(1));
    }

    #[test]
    fn layer_counts_slice_the_owned_set() {
        // Edge {1,2} of the quintic triangle owns exactly (1,2,2).
        let p = family_profile(2, 1).unwrap();
        let layers = layer_counts(&p, &face(2, &[1, 2]), 1, 1).unwrap();
        assert_eq!(layers.len(), 1);
        assert_eq!(layers.get(&2), Some(&Count::from_u64(1)));
    }
}
