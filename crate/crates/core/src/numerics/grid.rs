use serde::Serialize;

use crate::error::{Error, Result};

/// Ordered abscissae of a one-dimensional discretization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid1D {
    nodes: Vec<f64>,
    spacing: Vec<f64>,
}

impl Grid1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Precondition(format!(
                "a grid needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("grid nodes must be finite".into()));
        }
        let spacing: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if spacing.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::Precondition("grid nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, spacing })
    }

    /// `count` equally spaced nodes from `a` to `b` inclusive.
    pub fn uniform(a: f64, b: f64, count: usize) -> Result<Self> {
        if count < 3 {
            return Err(Error::Precondition("a grid needs at least 3 nodes".into()));
        }
        let h = (b - a) / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|i| a + h * i as f64).collect();
        nodes[count - 1] = b;
        Self::new(nodes)
    }

    /// Uniform grid on [a, b] with spacing as close as possible to `h`.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        let count = ((b - a) / h).round().max(2.0) as usize + 1;
        Self::uniform(a, b, count)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index `i` with nodes[i] <= x < nodes[i+1], clamped to valid intervals.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Index of the node equal to `x` up to a relative tolerance.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let i = self.locate(x);
        let tol = 1e-10 * self.spacing[i];
        [i, i + 1]
            .into_iter()
            .find(|&j| (self.nodes[j] - x).abs() <= tol)
    }

    /// Grid with every interval split in two.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.last());
        Self::new(nodes).expect("refinement preserves ordering")
    }

    /// Same node count with every abscissa multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.nodes.iter().map(|x| x * factor).collect()).expect("positive factor")
    }
}
