//! Inter-vessel communication graph.
//!
//! Edges are undirected: every edge `(i, j, w)` sets `a_ij = a_ji = w`.
//! Access to the reference trajectory is carried separately as the
//! per-vessel weight `b_i` and is never treated as an edge.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Smallest eigenvalue below which `L + B` is reported as not positive definite.
pub const DEFAULT_PD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    adjacency: DMatrix<f64>,
    reference_access: DVector<f64>,
}

/// `L + B` together with its definiteness verdict.
#[derive(Debug, Clone)]
pub struct ConsensusGain {
    pub matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub positive_definite: bool,
}

impl Topology {
    /// Builds a symmetric topology over `n` vessels.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], reference_access: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Topology("a fleet needs at least one vessel".into()));
        }
        if reference_access.len() != n {
            return Err(Error::Topology(format!(
                "reference access vector has {} entries, expected {n}",
                reference_access.len()
            )));
        }
        if let Some((i, b)) = reference_access
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b >= 0.0))
        {
            return Err(Error::Topology(format!("reference access b_{i} = {b} must be >= 0")));
        }

        let mut adjacency = DMatrix::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::Topology(format!(
                    "edge ({i}, {j}) has an index outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::Topology(format!("self-edge on vessel {i}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Topology(format!("edge ({i}, {j}) has negative weight {w}")));
            }
            if w == 0.0 {
                return Err(Error::Topology(format!("edge ({i}, {j}) has zero weight")));
            }
            adjacency[(i, j)] = w;
            adjacency[(j, i)] = w;
        }

        Ok(Self {
            adjacency,
            reference_access: DVector::from_column_slice(reference_access),
        })
    }

    pub fn n_vessels(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[(i, j)]
    }

    pub fn reference_access(&self) -> &DVector<f64> {
        &self.reference_access
    }

    /// Neighbors of vessel `i` with their edge weights, in index order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adjacency
            .row(i)
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, w)| *w > 0.0)
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// Undirected edge list `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_vessels();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.adjacency[(i, j)];
                if w > 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// `L = D - A` with `D` the diagonal of row sums.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.n_vessels();
        let mut lap = -self.adjacency.clone();
        for i in 0..n {
            lap[(i, i)] = self.adjacency.row(i).sum();
        }
        lap
    }

    pub fn consensus_gain_matrix(&self) -> ConsensusGain {
        self.consensus_gain_matrix_with_tolerance(DEFAULT_PD_TOLERANCE)
    }

    pub fn consensus_gain_matrix_with_tolerance(&self, tolerance: f64) -> ConsensusGain {
        let mut matrix = self.laplacian();
        for i in 0..self.n_vessels() {
            matrix[(i, i)] += self.reference_access[i];
        }
        let min_eigenvalue = matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        ConsensusGain {
            matrix,
            min_eigenvalue,
            positive_definite: min_eigenvalue > tolerance,
        }
    }

    /// Breadth-first reachability from vessel 0 over positive-weight edges.
    pub fn is_connected(&self) -> bool {
        let n = self.n_vessels();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for (j, _) in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected graph with at least one vessel holding the reference.
    pub fn satisfies_connectivity_assumption(&self) -> bool {
        self.is_connected() && self.reference_access.iter().any(|b| *b > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Topology {
        Topology::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], &[1.0; 4]).unwrap()
    }

    #[test]
    fn chain_laplacian_matches_hand_computation() {
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, -1.0, 0.0, 0.0, //
                -1.0, 2.0, -1.0, 0.0, //
                0.0, -1.0, 2.0, -1.0, //
                0.0, 0.0, -1.0, 1.0,
            ],
        );
        assert_eq!(chain().laplacian(), expected);
    }

    #[test]
    fn single_weighted_edge_laplacian() {
        let t = Topology::from_edges(2, &[(0, 1, 2.0)], &[0.0, 0.0]).unwrap();
        assert_eq!(t.laplacian(), DMatrix::from_row_slice(2, 2, &[2.0, -2.0, -2.0, 2.0]));
    }

    #[test]
    fn edgeless_laplacian_is_zero() {
        let t = Topology::from_edges(3, &[], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(t.laplacian(), DMatrix::zeros(3, 3));
        assert!(!t.is_connected());
    }

    #[test]
    fn chain_gain_matrix_is_positive_definite() {
        let g = chain().consensus_gain_matrix();
        let diag: Vec<f64> = (0..4).map(|i| g.matrix[(i, i)]).collect();
        assert_eq!(diag, vec![2.0, 3.0, 3.0, 2.0]);
        assert_eq!(g.matrix[(0, 1)], -1.0);
        assert_eq!(g.matrix[(0, 2)], 0.0);
        assert!(g.positive_definite);
        // 1 + L of a 4-path has eigenvalues 1 + 2 - 2cos(k pi / 4), smallest is 1.
        assert!((g.min_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_reference_access_is_not_positive_definite() {
        let t = Topology::from_edges(2, &[(0, 1, 2.0)], &[0.0, 0.0]).unwrap();
        assert!(t.is_connected());
        assert!(!t.consensus_gain_matrix().positive_definite);
        assert!(!t.satisfies_connectivity_assumption());
    }

    #[test]
    fn single_vessel() {
        let t = Topology::from_edges(1, &[], &[1.0]).unwrap();
        assert!(t.is_connected());
        let g = t.consensus_gain_matrix();
        assert_eq!(g.matrix, DMatrix::from_element(1, 1, 1.0));
        assert!(g.positive_definite);
    }

    #[test]
    fn two_vessels_without_edges_are_disconnected() {
        let t = Topology::from_edges(2, &[], &[1.0, 1.0]).unwrap();
        assert!(!t.is_connected());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            Topology::from_edges(2, &[(0, 2, 1.0)], &[1.0, 1.0]),
            Err(Error::Topology(_))
        ));
        assert!(Topology::from_edges(2, &[(0, 1, -1.0)], &[1.0, 1.0])
            .unwrap_err()
            .to_string()
            .contains("negative"));
        assert!(Topology::from_edges(2, &[(1, 1, 1.0)], &[1.0, 1.0])
            .unwrap_err()
            .to_string()
            .contains("self-edge"));
        assert!(Topology::from_edges(2, &[], &[1.0]).is_err());
        assert!(Topology::from_edges(2, &[], &[1.0, -0.5]).is_err());
    }

    #[test]
    fn adjacency_is_symmetrized() {
        let t = Topology::from_edges(3, &[(2, 0, 0.5)], &[1.0; 3]).unwrap();
        assert_eq!(t.weight(0, 2), 0.5);
        assert_eq!(t.weight(2, 0), 0.5);
        assert_eq!(t.edges(), vec![(0, 2, 0.5)]);
        assert_eq!(t.neighbors(1).count(), 0);
    }
}
