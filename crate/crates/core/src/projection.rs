//! Classical (Torgerson) multidimensional scaling of persons.
//!
//! Similarities become distances through `d = sqrt(2 (1 - s))`, the Euclidean
//! distance between standardized windows when `s` is a Pearson correlation.
//! The squared distances are double-centered, `B = -1/2 J D² J`, and the top
//! eigenpairs of `B` give the coordinates.

use std::io::{self, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::similarity::{Similarity, SimilarityMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProjectionError {
    #[error("invalid distance matrix: {0}")]
    InvalidDistances(String),
    #[error("embedding dimension must be positive")]
    ZeroDimension,
}

/// Symmetric, non-negative distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    persons: Vec<String>,
    d: Vec<f64>,
    /// Pairs whose similarity was undefined and imputed as 0.
    imputed: Vec<(String, String)>,
}

pub fn similarity_to_distance(s: f64) -> f64 {
    (2.0 * (1.0 - s.clamp(-1.0, 1.0))).max(0.0).sqrt()
}

impl DistanceMatrix {
    pub fn new(persons: Vec<String>, d: Vec<f64>) -> Result<Self, ProjectionError> {
        let n = persons.len();
        let bad = |m: String| ProjectionError::InvalidDistances(m);
        if d.len() != n * n {
            return Err(bad(format!("expected {} entries, got {}", n * n, d.len())));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(bad(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(bad(format!("entry ({i},{j}) = {v}")));
                }
                if v != d[j * n + i] {
                    return Err(bad(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self {
            persons,
            d,
            imputed: Vec::new(),
        })
    }

    /// Builds distances from point coordinates (any dimension).
    pub fn from_points(persons: Vec<String>, points: &[Vec<f64>]) -> Result<Self, ProjectionError> {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = euclid(&points[i], &points[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self::new(persons, d)
    }

    pub fn persons(&self) -> &[String] {
        &self.persons
    }

    pub fn len(&self) -> usize {
        self.persons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.len() + j]
    }

    pub fn imputed(&self) -> &[(String, String)] {
        &self.imputed
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Converts similarities to distances; undefined off-diagonal cells count as
/// similarity 0 and are recorded.
pub fn to_distance(m: &SimilarityMatrix) -> DistanceMatrix {
    cells_to_distance(&m.persons, &m.cells)
}

/// [`to_distance`] over a bare row-major grid; only the upper triangle is read.
pub fn cells_to_distance(persons: &[String], cells: &[Similarity]) -> DistanceMatrix {
    let n = persons.len();
    assert_eq!(cells.len(), n * n, "grid must be square");
    let mut d = vec![0.0; n * n];
    let mut imputed = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let s = match cells[i * n + j] {
                Some(s) => s,
                None => {
                    imputed.push((persons[i].clone(), persons[j].clone()));
                    0.0
                }
            };
            let v = similarity_to_distance(s);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    DistanceMatrix {
        persons: persons.to_vec(),
        d,
        imputed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub persons: Vec<String>,
    /// One row of `dim` coordinates per person.
    pub coords: Vec<Vec<f64>>,
    pub stress: f64,
    /// All eigenvalues of the double-centered matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Retained eigenvalues that were negative (beyond rounding) and clamped to zero.
    pub clamped: usize,
    /// True when every input distance was zero.
    pub degenerate: bool,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclid(&self.coords[i], &self.coords[j])
    }

    /// Writes `person,x,y` (or more axes for higher dimensions).
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let axes = ["x", "y", "z"];
        let mut header = vec!["person".to_string()];
        header.extend((0..self.dim()).map(|k| axes.get(k).map_or(format!("axis{k}"), |a| a.to_string())));
        out.write_record(&header)?;
        for (p, c) in self.persons.iter().zip(&self.coords) {
            let mut rec = vec![p.clone()];
            rec.extend(c.iter().map(f64::to_string));
            out.write_record(&rec)?;
        }
        out.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsDiagnostics {
    pub stress: f64,
    pub eigenvalues: Vec<f64>,
    pub clamped_eigenvalues: usize,
    pub imputed_cells: Vec<(String, String)>,
    pub degenerate: bool,
}

pub fn diagnostics(embedding: &Embedding, distances: &DistanceMatrix) -> MdsDiagnostics {
    MdsDiagnostics {
        stress: embedding.stress,
        eigenvalues: embedding.eigenvalues.clone(),
        clamped_eigenvalues: embedding.clamped,
        imputed_cells: distances.imputed.clone(),
        degenerate: embedding.degenerate,
    }
}

/// Deterministic classical MDS into `dim` dimensions.
///
/// Each axis is oriented so that its largest-magnitude coordinate is positive
/// (lowest index wins ties), and the coordinates are centered exactly.
pub fn classical_mds(distances: &DistanceMatrix, dim: usize) -> Result<Embedding, ProjectionError> {
    if dim == 0 {
        return Err(ProjectionError::ZeroDimension);
    }
    let n = distances.len();
    let persons = distances.persons.clone();
    let zero = || vec![vec![0.0; dim]; n];
    if n == 0 {
        return Ok(Embedding {
            persons,
            coords: Vec::new(),
            stress: 0.0,
            eigenvalues: Vec::new(),
            clamped: 0,
            degenerate: false,
        });
    }
    if n > 1 && distances.d.iter().all(|&v| v == 0.0) {
        return Ok(Embedding {
            persons,
            coords: zero(),
            stress: 0.0,
            eigenvalues: vec![0.0; n],
            clamped: 0,
            degenerate: true,
        });
    }

    let sq = DMatrix::from_fn(n, n, |i, j| distances.get(i, j).powi(2));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).mean()).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    // symmetrize against rounding before the eigen solve
    let b = (&b + b.transpose()) * 0.5;

    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&c)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();

    let mut coords = zero();
    let tolerance = 1e-12 * eigenvalues.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let mut clamped = 0;
    for axis in 0..dim.min(n) {
        let k = order[axis];
        let lambda = eig.eigenvalues[k];
        if lambda < -tolerance {
            clamped += 1;
        }
        let scale = lambda.max(0.0).sqrt();
        let mut column: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(i, k)] * scale).collect();
        let mean = column.iter().sum::<f64>() / n as f64;
        column.iter_mut().for_each(|v| *v -= mean);
        orient(&mut column);
        for (i, v) in column.into_iter().enumerate() {
            coords[i][axis] = v + 0.0;
        }
    }

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = distances.get(i, j);
            let fit = euclid(&coords[i], &coords[j]);
            num += (dij - fit).powi(2);
            den += dij * dij;
        }
    }
    let stress = if den > 0.0 { (num / den).sqrt() } else { 0.0 };

    Ok(Embedding {
        persons,
        coords,
        stress,
        eigenvalues,
        clamped,
        degenerate: false,
    })
}

fn orient(column: &mut [f64]) {
    let max = column.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return;
    }
    let pivot = column
        .iter()
        .position(|v| v.abs() >= max * (1.0 - 1e-9))
        .expect("max is attained");
    if column[pivot] < 0.0 {
        column.iter_mut().for_each(|v| *v = -*v);
    }
}
