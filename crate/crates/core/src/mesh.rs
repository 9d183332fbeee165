//! Time meshes for the memory-kernel quadrature.
//!
//! The kernel `(t-τ)^{β-1}` is integrated exactly by the product rule, but
//! the solution itself opens with a `t^β` cusp, so nodes are graded toward
//! the origin: `t_j = T (j/m)^q`. Grading with `q = 2` is nested under
//! `m → 2m`, which the self-convergence studies rely on.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;

/// Strictly increasing time nodes `0 = t_0 < … < t_m = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    nodes: Vec<f64>,
}

impl TimeMesh {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, SolverError> {
        if nodes.len() < 2 {
            return Err(SolverError::InvalidMesh("need at least two nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(SolverError::InvalidMesh(format!(
                "first node must be 0, got {}",
                nodes[0]
            )));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(SolverError::InvalidMesh(format!(
                    "nodes not strictly increasing at t = {}",
                    w[0]
                )));
            }
        }
        if !nodes.last().unwrap().is_finite() {
            return Err(SolverError::InvalidMesh("non-finite horizon".into()));
        }
        Ok(TimeMesh { nodes })
    }

    /// Graded mesh `t_j = T (j/m)^q` with `m+1` nodes.
    pub fn graded(t_max: f64, m: usize, q: f64) -> Result<Self, SolverError> {
        if !(t_max > 0.0) {
            return Err(SolverError::InvalidMesh(format!("horizon {t_max} must be positive")));
        }
        if m < 1 {
            return Err(SolverError::InvalidMesh("need at least one interval".into()));
        }
        if !(q >= 1.0) {
            return Err(SolverError::InvalidMesh(format!("grading exponent {q} must be >= 1")));
        }
        let nodes = (0..=m)
            .map(|j| t_max * (j as f64 / m as f64).powf(q))
            .collect();
        TimeMesh::from_nodes(nodes)
    }

    pub fn uniform(t_max: f64, m: usize) -> Result<Self, SolverError> {
        Self::graded(t_max, m, 1.0)
    }

    /// Graded bulk mesh with extra uniform layers of `layer_nodes` intervals
    /// inside `[0, layer_width]` and `[T - layer_width, T]`, for integrands
    /// whose behaviour switches regime near both endpoints.
    pub fn graded_with_layers(
        t_max: f64,
        m_bulk: usize,
        q: f64,
        layer_width: f64,
        layer_nodes: usize,
    ) -> Result<Self, SolverError> {
        if !(layer_width > 0.0 && 2.0 * layer_width < t_max) {
            return Err(SolverError::InvalidMesh(format!(
                "layer width {layer_width} must lie in (0, T/2)"
            )));
        }
        if layer_nodes < 1 {
            return Err(SolverError::InvalidMesh("layers need at least one interval".into()));
        }
        let mut nodes: Vec<f64> = Vec::new();
        let base = Self::graded(t_max, m_bulk, q)?;
        nodes.extend_from_slice(base.nodes());
        for j in 0..=layer_nodes {
            let s = j as f64 / layer_nodes as f64;
            nodes.push(layer_width * s);
            nodes.push(t_max - layer_width * s);
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Drop near-duplicates (relative to the horizon).
        let tol = t_max * 1e-12;
        let mut dedup: Vec<f64> = Vec::with_capacity(nodes.len());
        for t in nodes {
            if dedup.last().map_or(true, |&last| t - last > tol) {
                dedup.push(t);
            }
        }
        *dedup.first_mut().unwrap() = 0.0;
        *dedup.last_mut().unwrap() = t_max;
        TimeMesh::from_nodes(dedup)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals.
    pub fn m(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Trapezoid quadrature weights over the nodes.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut w = vec![0.0; n];
        for j in 0..n - 1 {
            let h = self.nodes[j + 1] - self.nodes[j];
            w[j] += 0.5 * h;
            w[j + 1] += 0.5 * h;
        }
        w
    }

    /// Mesh rescaled in time by `factor` (node-wise multiplication).
    pub fn scaled(&self, factor: f64) -> Result<Self, SolverError> {
        if !(factor > 0.0) {
            return Err(SolverError::InvalidScale(factor));
        }
        TimeMesh::from_nodes(self.nodes.iter().map(|t| t * factor).collect())
    }
}
