//! Hypercube graphs: binary node labels, adjacency via the tensor-product
//! decomposition `A = sum_j tau_j`, Hamming rows, and subcubes.
//!
//! Bit `j = 1` is the most significant position of a label, so `tau_1`
//! exchanges the two halves of the node ordering.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

/// Largest dimension accepted for structural (matrix-free) queries.
pub const MAX_DIMENSION: u32 = 20;

/// Largest dimension for which dense `N x N` matrices are materialized.
pub const MAX_DENSE_DIMENSION: u32 = 12;

pub(crate) fn check_dim(dim: u32) -> Result<()> {
    if (1..=MAX_DIMENSION).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange { dim, max: MAX_DIMENSION })
    }
}

pub(crate) fn check_dense_dim(dim: u32) -> Result<()> {
    check_dim(dim)?;
    if dim > MAX_DENSE_DIMENSION {
        return Err(Error::TooLarge { what: "dense hypercube matrices", dim, max: MAX_DENSE_DIMENSION });
    }
    Ok(())
}

/// A vertex of the `d`-dimensional hypercube, labelled `x_1 x_2 ... x_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeLabel {
    dim: u32,
    value: u32,
}

impl NodeLabel {
    pub fn new(dim: u32, value: u32) -> Result<Self> {
        check_dim(dim)?;
        if u64::from(value) >= 1u64 << dim {
            return Err(Error::LabelOutOfRange { dim, value: value.into() });
        }
        Ok(Self { dim, value })
    }

    /// The all-zeros corner.
    pub fn origin(dim: u32) -> Result<Self> {
        Self::new(dim, 0)
    }

    /// The all-ones corner.
    pub fn antipode(dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, value: ((1u64 << dim) - 1) as u32 })
    }

    pub fn dim(self) -> u32 {
        self.dim
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn index(self) -> usize {
        self.value as usize
    }

    /// Mask selecting bit `j` (1-based, `j = 1` most significant).
    pub fn bit_mask(dim: u32, j: u32) -> Result<u32> {
        if j == 0 || j > dim {
            return Err(Error::BitIndexOutOfRange { dim, index: j });
        }
        Ok(1 << (dim - j))
    }

    pub fn bit(self, j: u32) -> Result<bool> {
        Ok(self.value & Self::bit_mask(self.dim, j)? != 0)
    }

    pub fn flip(self, j: u32) -> Result<Self> {
        Ok(Self { dim: self.dim, value: self.value ^ Self::bit_mask(self.dim, j)? })
    }

    pub fn distance(self, other: Self) -> Result<u32> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok((self.value ^ other.value).count_ones())
    }

    /// Iterates over the `d` neighbours (labels differing in one bit).
    pub fn neighbors(self) -> impl Iterator<Item = NodeLabel> {
        (0..self.dim).map(move |b| NodeLabel { dim: self.dim, value: self.value ^ (1 << b) })
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 1..=self.dim {
            let bit = self.value >> (self.dim - j) & 1;
            write!(f, "{bit}")?;
        }
        Ok(())
    }
}

impl FromStr for NodeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidLabel(s.to_string()));
        }
        let dim = u32::try_from(s.len()).map_err(|_| Error::InvalidLabel(s.to_string()))?;
        check_dim(dim)?;
        let value = u32::from_str_radix(s, 2).map_err(|_| Error::InvalidLabel(s.to_string()))?;
        Self::new(dim, value)
    }
}

/// Row of a node: its Hamming distance from `00...0`.
pub fn hamming_row(label: NodeLabel) -> u32 {
    label.value.count_ones()
}

/// Number of edges, `d 2^(d-1)`.
pub fn edge_count(dim: u32) -> u64 {
    if dim == 0 {
        return 0;
    }
    u64::from(dim) << (dim - 1)
}

/// Matrix-free view of the `d`-cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hypercube {
    dim: u32,
}

impl Hypercube {
    pub fn new(dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim })
    }

    pub fn dim(self) -> u32 {
        self.dim
    }

    pub fn node_count(self) -> usize {
        1usize << self.dim
    }

    pub fn nodes(self) -> impl Iterator<Item = NodeLabel> {
        let dim = self.dim;
        (0..(1u32 << dim)).map(move |value| NodeLabel { dim, value })
    }

    /// Undirected edges `(x, y)` with `x < y`, in lexicographic order.
    pub fn edges(self) -> impl Iterator<Item = (usize, usize)> {
        let dim = self.dim;
        (0..(1usize << dim)).flat_map(move |x| {
            (0..dim).rev().filter_map(move |b| {
                let y = x ^ (1 << b);
                (x < y).then_some((x, y))
            })
        })
    }

    pub fn is_edge(self, x: usize, y: usize) -> bool {
        (x ^ y).count_ones() == 1
    }

    /// Number of nodes in each row `k = 0..=d`.
    pub fn row_sizes(self) -> Vec<u64> {
        (0..=self.dim).map(|k| binomial(self.dim, k)).collect()
    }

    /// Sparse adjacency matrix.
    pub fn adjacency_sparse(self) -> CsrMatrix {
        let n = self.node_count();
        CsrMatrix::from_triplets(
            n,
            self.edges().flat_map(|(x, y)| [(x, y, 1.0), (y, x, 1.0)]).collect::<Vec<_>>(),
        )
    }

    /// Analytic adjacency spectrum: eigenvalue `d - 2k` with multiplicity
    /// `C(d, k)`.
    pub fn spectrum(self) -> Vec<(i64, u64)> {
        (0..=self.dim).map(|k| (i64::from(self.dim) - 2 * i64::from(k), binomial(self.dim, k))).collect()
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

/// Dense 0/1 adjacency matrix of the `d`-cube.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyMatrix {
    dim: u32,
    entries: DMatrix<f64>,
}

impl AdjacencyMatrix {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.entries[(x, y)] as u8
    }
}

/// Dense adjacency matrix, assembled as `sum_j tau_j`.
pub fn hypercube_adjacency(dim: u32) -> Result<AdjacencyMatrix> {
    check_dense_dim(dim)?;
    let n = 1usize << dim;
    let mut entries = DMatrix::zeros(n, n);
    for j in 1..=dim {
        entries += tau_factor(dim, j)?;
    }
    Ok(AdjacencyMatrix { dim, entries })
}

/// Permutation matrix flipping bit `j` (`tau` acting on binary index `j`,
/// identity on the others).
pub fn tau_factor(dim: u32, j: u32) -> Result<DMatrix<f64>> {
    check_dense_dim(dim)?;
    let mask = NodeLabel::bit_mask(dim, j)? as usize;
    let n = 1usize << dim;
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        m[(x, x ^ mask)] = 1.0;
    }
    Ok(m)
}

/// The minimal subcube with corners `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Subcube {
    a: NodeLabel,
    b: NodeLabel,
    free_mask: u32,
}

impl Subcube {
    pub fn a(&self) -> NodeLabel {
        self.a
    }

    pub fn b(&self) -> NodeLabel {
        self.b
    }

    /// Dimension of the subcube (Hamming distance between the corners).
    pub fn dim(&self) -> u32 {
        self.free_mask.count_ones()
    }

    pub fn free_mask(&self) -> u32 {
        self.free_mask
    }

    /// 1-based positions where the corners differ.
    pub fn free_bits(&self) -> Vec<u32> {
        let d = self.a.dim;
        (1..=d).filter(|&j| self.free_mask & (1 << (d - j)) != 0).collect()
    }

    pub fn contains(&self, x: NodeLabel) -> bool {
        x.dim == self.a.dim && (x.value ^ self.a.value) & !self.free_mask == 0
    }

    /// Member labels in ascending order.
    pub fn nodes(&self) -> Vec<NodeLabel> {
        let base = self.a.value & !self.free_mask;
        let mut out = Vec::with_capacity(1 << self.dim());
        // Enumerate submasks of free_mask in increasing order.
        let mut sub: u32 = 0;
        loop {
            out.push(NodeLabel { dim: self.a.dim, value: base | sub });
            if sub == self.free_mask {
                break;
            }
            sub = (sub.wrapping_sub(self.free_mask)) & self.free_mask;
        }
        out
    }

    /// Row of `x` within the subcube: its distance from corner `a`.
    pub fn row_of(&self, x: NodeLabel) -> Option<u32> {
        self.contains(x).then(|| (x.value ^ self.a.value).count_ones())
    }
}

pub fn subcube_between(a: NodeLabel, b: NodeLabel) -> Result<Subcube> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    Ok(Subcube { a, b, free_mask: a.value ^ b.value })
}
