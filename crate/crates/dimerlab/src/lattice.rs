//! The m×n triangular lattice on the torus: a square lattice with one
//! diagonal per unit cell and periodic boundary conditions.
//!
//! Vertices are indexed row-major: the vertex in column `j`, row `k` has
//! index `k*m + j` (1-based only in serialized output). Every vertex emits
//! one horizontal, one vertical, and one diagonal edge, so the lattice has
//! `3mn` edges in total.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeKind {
    Horizontal,
    Vertical,
    Diagonal,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 3] = [EdgeKind::Horizontal, EdgeKind::Vertical, EdgeKind::Diagonal];

    /// Lattice offset (dj, dk) of this edge kind.
    pub fn offset(self) -> (usize, usize) {
        match self {
            EdgeKind::Horizontal => (1, 0),
            EdgeKind::Vertical => (0, 1),
            EdgeKind::Diagonal => (1, 1),
        }
    }
}

/// Edge stored as (start, start + offset); `start` is the endpoint whose
/// coordinates come first before wrapping, and crossing counts are billed
/// to the start column/row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub start: usize,
    pub end: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone)]
pub struct TorusLattice {
    m: usize,
    n: usize,
    edges: Vec<Edge>,
}

impl TorusLattice {
    /// Builds the lattice. Requires `m` even, `m >= 4`, `n >= 3`; smaller
    /// tori identify parallel edges, which a one-entry-per-vertex-pair
    /// matrix cannot represent.
    pub fn new(m: usize, n: usize) -> Result<Self, LatticeError> {
        if m % 2 != 0 {
            return Err(LatticeError::InvalidDimensions(format!(
                "m must be even, got {m}"
            )));
        }
        if m < 4 {
            return Err(LatticeError::InvalidDimensions(format!(
                "m must be at least 4, got {m}"
            )));
        }
        if n < 3 {
            return Err(LatticeError::InvalidDimensions(format!(
                "n must be at least 3, got {n}"
            )));
        }
        let mut edges = Vec::with_capacity(3 * m * n);
        for k in 0..n {
            for j in 0..m {
                for kind in EdgeKind::ALL {
                    let (dj, dk) = kind.offset();
                    edges.push(Edge {
                        start: k * m + j,
                        end: ((k + dk) % n) * m + (j + dj) % m,
                        kind,
                    });
                }
            }
        }
        Ok(TorusLattice { m, n, edges })
    }

    pub fn columns(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.m * self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, j: usize, k: usize) -> usize {
        (k % self.n) * self.m + j % self.m
    }

    /// (column, row) of a vertex index.
    pub fn vertex_coords(&self, v: usize) -> (usize, usize) {
        (v % self.m, v / self.m)
    }

    /// For an adjacent vertex pair, the shared edge as (start vertex, kind);
    /// `None` when the vertices are not neighbors.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<(usize, EdgeKind)> {
        let (ja, ka) = self.vertex_coords(a);
        let (jb, kb) = self.vertex_coords(b);
        let dj = (jb + self.m - ja) % self.m;
        let dk = (kb + self.n - ka) % self.n;
        for kind in EdgeKind::ALL {
            let (oj, ok) = kind.offset();
            if (dj, dk) == (oj, ok) {
                return Some((a, kind));
            }
            if (dj, dk) == ((self.m - oj) % self.m, (self.n - ok) % self.n) {
                return Some((b, kind));
            }
        }
        None
    }

    /// The six neighbors of `v` in deterministic order: horizontal,
    /// vertical, diagonal, each forward then backward.
    pub fn neighbors(&self, v: usize) -> [usize; 6] {
        let (j, k) = self.vertex_coords(v);
        let mut out = [0; 6];
        for (slot, kind) in EdgeKind::ALL.into_iter().enumerate() {
            let (dj, dk) = kind.offset();
            out[2 * slot] = self.vertex_index(j + dj, k + dk);
            out[2 * slot + 1] = self.vertex_index(j + self.m - dj, k + self.n - dk);
        }
        out
    }

    /// The all-horizontal matching pairing columns (2t, 2t+1) on every row.
    pub fn standard_configuration(&self) -> DimerConfiguration {
        let pairs = (0..self.n)
            .flat_map(|k| (0..self.m / 2).map(move |t| (k, t)))
            .map(|(k, t)| (self.vertex_index(2 * t, k), self.vertex_index(2 * t + 1, k)))
            .collect();
        DimerConfiguration::new(self, pairs).expect("standard configuration is a perfect matching")
    }
}

/// Winding parities of a configuration relative to the standard one:
/// `r` across vertical cuts, `s` across horizontal cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyClass {
    pub r: u8,
    pub s: u8,
}

/// A perfect matching with its edge-kind counts.
///
/// Pairs are stored sorted ascending within each pair and by first element
/// across pairs, which is the canonical permutation layout used for sign
/// computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimerConfiguration {
    pairs: Vec<(usize, usize)>,
    n_h: usize,
    n_v: usize,
    n_d: usize,
}

impl DimerConfiguration {
    pub fn new(lat: &TorusLattice, mut pairs: Vec<(usize, usize)>) -> Result<Self, LatticeError> {
        for p in &mut pairs {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        if pairs.len() != lat.vertex_count() / 2 {
            return Err(LatticeError::InvalidConfiguration(format!(
                "expected {} pairs, got {}",
                lat.vertex_count() / 2,
                pairs.len()
            )));
        }
        let mut covered = vec![false; lat.vertex_count()];
        let (mut n_h, mut n_v, mut n_d) = (0, 0, 0);
        for &(a, b) in &pairs {
            if a >= lat.vertex_count() || b >= lat.vertex_count() || covered[a] || covered[b] {
                return Err(LatticeError::InvalidConfiguration(format!(
                    "pair ({a}, {b}) is out of range or overlaps another dimer"
                )));
            }
            covered[a] = true;
            covered[b] = true;
            match lat.edge_between(a, b) {
                Some((_, EdgeKind::Horizontal)) => n_h += 1,
                Some((_, EdgeKind::Vertical)) => n_v += 1,
                Some((_, EdgeKind::Diagonal)) => n_d += 1,
                None => {
                    return Err(LatticeError::InvalidConfiguration(format!(
                        "vertices {a} and {b} are not adjacent"
                    )))
                }
            }
        }
        Ok(DimerConfiguration {
            pairs,
            n_h,
            n_v,
            n_d,
        })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn horizontal_count(&self) -> usize {
        self.n_h
    }

    pub fn vertical_count(&self) -> usize {
        self.n_v
    }

    pub fn diagonal_count(&self) -> usize {
        self.n_d
    }

    /// Exponent triple (N_h, N_v, N_d) of the configuration weight.
    pub fn weight_monomial(&self) -> crate::polyring::Monomial {
        crate::polyring::Monomial::new(self.n_h as u32, self.n_v as u32, self.n_d as u32)
    }

    /// The configuration translated by (dj, dk) on the torus.
    pub fn translated(&self, lat: &TorusLattice, dj: usize, dk: usize) -> DimerConfiguration {
        let shift = |v: usize| {
            let (j, k) = lat.vertex_coords(v);
            lat.vertex_index(j + dj, k + dk)
        };
        let pairs = self
            .pairs
            .iter()
            .map(|&(a, b)| (shift(a), shift(b)))
            .collect();
        DimerConfiguration::new(lat, pairs).expect("translation preserves matchings")
    }
}

/// Crossing counts of a single configuration: `v[j]` dimers cross the cut
/// x = j+1/2 (horizontal and diagonal dimers starting in column j), `h[k]`
/// dimers cross y = k+1/2 (vertical and diagonal dimers starting in row k).
pub fn crossing_counts(lat: &TorusLattice, conf: &DimerConfiguration) -> (Vec<usize>, Vec<usize>) {
    let mut v = vec![0; lat.columns()];
    let mut h = vec![0; lat.rows()];
    for &(a, b) in conf.pairs() {
        let (start, kind) = lat
            .edge_between(a, b)
            .expect("configuration pairs are adjacent");
        let (j, k) = lat.vertex_coords(start);
        match kind {
            EdgeKind::Horizontal => v[j] += 1,
            EdgeKind::Vertical => h[k] += 1,
            EdgeKind::Diagonal => {
                v[j] += 1;
                h[k] += 1;
            }
        }
    }
    (v, h)
}

/// Homology class of `conf` from the crossing parities of its superposition
/// with the standard configuration. The parity is provably constant across
/// cuts; this asserts it rather than assuming it.
pub fn homology_class(lat: &TorusLattice, conf: &DimerConfiguration) -> HomologyClass {
    let st = lat.standard_configuration();
    let (v_conf, h_conf) = crossing_counts(lat, conf);
    let (v_st, h_st) = crossing_counts(lat, &st);
    let r: Vec<u8> = v_conf
        .iter()
        .zip(&v_st)
        .map(|(a, b)| ((a + b) % 2) as u8)
        .collect();
    let s: Vec<u8> = h_conf
        .iter()
        .zip(&h_st)
        .map(|(a, b)| ((a + b) % 2) as u8)
        .collect();
    assert!(
        r.iter().all(|&p| p == r[0]),
        "vertical crossing parity must not depend on the cut"
    );
    assert!(
        s.iter().all(|&p| p == s[0]),
        "horizontal crossing parity must not depend on the cut"
    );
    HomologyClass { r: r[0], s: s[0] }
}

/// Serialized form of a configuration: 1-based index pairs in lex order,
/// kind counts and homology class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigurationRecord {
    pub pairs: Vec<(usize, usize)>,
    pub counts: KindCounts,
    pub class: HomologyClass,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KindCounts {
    #[serde(rename = "Nh")]
    pub n_h: usize,
    #[serde(rename = "Nv")]
    pub n_v: usize,
    #[serde(rename = "Nd")]
    pub n_d: usize,
}

impl ConfigurationRecord {
    pub fn new(lat: &TorusLattice, conf: &DimerConfiguration) -> Self {
        ConfigurationRecord {
            pairs: conf.pairs().iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
            counts: KindCounts {
                n_h: conf.horizontal_count(),
                n_v: conf.vertical_count(),
                n_d: conf.diagonal_count(),
            },
            class: homology_class(lat, conf),
        }
    }
}
