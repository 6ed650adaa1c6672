//! Reference simplex geometry: the face lattice, barycentric domain points,
//! and the direction vectors used for face-normal derivatives.
//!
//! The reference n-simplex has vertex 0 at the origin and vertices 1..=n at
//! the unit coordinate points, labeled 0..=n.

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use crate::{Error, Result};

/// A face of the reference simplex, stored as its sorted vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    ambient_dim: usize,
    vertices: Vec<usize>,
}

impl Face {
    pub fn new(ambient_dim: usize, mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("face needs at least one vertex".into()));
        }
        vertices.sort_unstable();
        vertices.dedup();
        if let Some(&v) = vertices.iter().find(|&&v| v > ambient_dim) {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} out of range for an {ambient_dim}-simplex"
            )));
        }
        Ok(Face { ambient_dim, vertices })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the face itself (vertex count minus one).
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn contains(&self, vertex: usize) -> bool {
        self.vertices.binary_search(&vertex).is_ok()
    }

    /// Vertices of the ambient simplex not on this face, ascending.
    pub fn off_vertices(&self) -> Vec<usize> {
        (0..=self.ambient_dim).filter(|v| !self.contains(*v)).collect()
    }

    pub fn is_full_simplex(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// The full simplex viewed as a face of itself.
    pub fn full(ambient_dim: usize) -> Self {
        Face {
            ambient_dim,
            vertices: (0..=ambient_dim).collect(),
        }
    }
}

// Order faces by dimension first, then lexicographically by vertex set, so
// sorted listings walk the lattice bottom-up in label order.
impl Ord for Face {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.vertices.len(), &self.vertices, self.ambient_dim).cmp(&(
            other.vertices.len(),
            &other.vertices,
            other.ambient_dim,
        ))
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Face {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.vertices.iter().join(","))
    }
}

/// All dimension-`face_dim` faces of the reference `n`-simplex, in
/// lexicographic vertex-set order. C(n+1, face_dim+1) of them.
pub fn faces(n: usize, face_dim: usize) -> Result<Vec<Face>> {
    if face_dim > n {
        return Err(Error::InvalidArgument(format!(
            "no {face_dim}-dimensional faces on an {n}-simplex"
        )));
    }
    Ok((0..=n)
        .combinations(face_dim + 1)
        .map(|vertices| Face {
            ambient_dim: n,
            vertices,
        })
        .collect())
}

/// A point in barycentric coordinates of the reference simplex.
/// Coordinates are exact rationals summing to one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaryPoint {
    coords: Vec<BigRational>,
}

impl BaryPoint {
    pub fn new(coords: Vec<BigRational>) -> Result<Self> {
        use num_traits::{One, Signed};
        let sum: BigRational = coords.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidArgument(format!(
                "barycentric coordinates must sum to 1, got {sum}"
            )));
        }
        if coords.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidArgument(
                "barycentric coordinates must be nonnegative".into(),
            ));
        }
        Ok(BaryPoint { coords })
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }
}

/// Domain point of a face: barycentric coordinates `alpha_i / effective_degree`
/// at the face vertices, zero elsewhere.
///
/// `alpha_on_face` is indexed parallel to `face.vertices()` and must consist
/// of strictly positive entries summing to `effective_degree`, so the point
/// lies in the relative interior of the face.
pub fn domain_point(face: &Face, alpha_on_face: &[u32], effective_degree: u32) -> Result<BaryPoint> {
    if alpha_on_face.len() != face.vertices().len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} on-face entries, got {}",
            face.vertices().len(),
            alpha_on_face.len()
        )));
    }
    if alpha_on_face.iter().any(|&a| a == 0) {
        return Err(Error::InvalidArgument(
            "domain point has a zero on-face entry; the point must be interior to its face".into(),
        ));
    }
    let sum: u32 = alpha_on_face.iter().sum();
    if sum != effective_degree || effective_degree == 0 {
        return Err(Error::InvalidArgument(format!(
            "on-face entries sum to {sum}, expected effective degree {effective_degree}"
        )));
    }
    let mut coords = vec![BigRational::zero(); face.ambient_dim() + 1];
    for (&v, &a) in face.vertices().iter().zip(alpha_on_face) {
        coords[v] = BigRational::new(a.into(), effective_degree.into());
    }
    BaryPoint::new(coords)
}

/// A direction on the reference simplex, stored as a barycentric difference:
/// integer weights over the vertices summing to zero. The geometric vector is
/// the weighted combination of the vertex positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Direction {
    deltas: Vec<i64>,
}

impl Direction {
    pub fn new(deltas: Vec<i64>) -> Result<Self> {
        if deltas.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidArgument(
                "direction weights must sum to zero".into(),
            ));
        }
        Ok(Direction { deltas })
    }

    /// Difference of two vertex positions: `to` minus `from`.
    pub fn between_vertices(ambient_dim: usize, from: usize, to: usize) -> Result<Self> {
        if from > ambient_dim || to > ambient_dim || from == to {
            return Err(Error::InvalidArgument(format!(
                "invalid vertex pair ({from}, {to}) on an {ambient_dim}-simplex"
            )));
        }
        let mut deltas = vec![0i64; ambient_dim + 1];
        deltas[from] = -1;
        deltas[to] = 1;
        Ok(Direction { deltas })
    }

    pub fn deltas(&self) -> &[i64] {
        &self.deltas
    }

    pub fn ambient_dim(&self) -> usize {
        self.deltas.len() - 1
    }

    /// Cartesian components on the reference simplex. Vertex 0 sits at the
    /// origin, so the component along axis i is just the weight of vertex i.
    pub fn reference_coords(&self) -> Vec<i64> {
        self.deltas[1..].to_vec()
    }
}

/// Normal-derivative directions for a proper face: the vector from the
/// lowest-labeled face vertex to each off-face vertex, ascending by target
/// label. A d-face of an n-simplex gets n - d of them.
pub fn normal_directions(face: &Face) -> Result<Vec<Direction>> {
    if face.is_full_simplex() {
        return Err(Error::InvalidArgument(
            "the full simplex has no normal directions".into(),
        ));
    }
    let anchor = face.vertices()[0];
    face.off_vertices()
        .into_iter()
        .map(|v| Direction::between_vertices(face.ambient_dim(), anchor, v))
        .collect()
}
