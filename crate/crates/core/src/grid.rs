//! The discretized self-similar axis `y = x/t`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Half-axis selector. `Minus` is `y < 0`, `Plus` is `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    /// `[-L, L]` with the origin at `nodes[origin]`.
    FullLine { origin: usize },
    /// `[-L, -δ] ∪ [δ, L]`; plus-side nodes start at `split`.
    Excised { split: usize },
    /// `[0, L]`, origin at index 0.
    HalfLine,
}

/// Nodes of one half-axis as seen by a wave measure.
///
/// Next to the origin the grid node `0` is replaced by `±h/2` so that the
/// `1/y` factor of the viscous exponent is never evaluated at zero. `grid`
/// maps each support node back to a grid index; the offset node maps to
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSupport {
    pub side: Side,
    pub nodes: Vec<f64>,
    pub grid: Vec<Option<usize>>,
}

impl HalfSupport {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Uniform profile grid on `[-L, L]`, optionally excised to `|y| ≥ δ`, or a
/// half line `[0, L]` for boundary problems.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGrid {
    half_width: f64,
    excision: f64,
    layout: Layout,
    nodes: Vec<f64>,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl ProfileGrid {
    /// Full-line grid when `delta == 0`, excised grid otherwise.
    ///
    /// On the full line `n_nodes` is rounded up to an odd count so that the
    /// origin is a node; on an excised grid each half gets `⌈n/2⌉` nodes.
    pub fn new(half_width: f64, delta: f64, n_nodes: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("L must be positive, got {half_width}")));
        }
        if !(delta >= 0.0 && delta < half_width) {
            return Err(Error::InvalidGrid(format!("need 0 <= delta < L, got delta = {delta}")));
        }
        if n_nodes < 5 {
            return Err(Error::InvalidGrid(format!("need at least 5 nodes, got {n_nodes}")));
        }
        if delta == 0.0 {
            let n = n_nodes | 1;
            let origin = n / 2;
            let h = half_width / origin as f64;
            let nodes: Vec<f64> = (0..n)
                .map(|i| {
                    let k = i as isize - origin as isize;
                    if k == 0 {
                        0.0
                    } else {
                        k as f64 * h
                    }
                })
                .collect();
            Ok(Self::with_nodes(half_width, 0.0, Layout::FullLine { origin }, nodes))
        } else {
            let m = n_nodes.div_ceil(2);
            let h = (half_width - delta) / (m - 1) as f64;
            let mut nodes = Vec::with_capacity(2 * m);
            for i in 0..m {
                nodes.push(-half_width + i as f64 * h);
            }
            nodes[m - 1] = -delta;
            for i in 0..m {
                nodes.push(delta + i as f64 * h);
            }
            nodes[2 * m - 1] = half_width;
            Ok(Self::with_nodes(half_width, delta, Layout::Excised { split: m }, nodes))
        }
    }

    /// Uniform grid on `[0, L]` with `n_nodes` nodes.
    pub fn half_line(half_width: f64, n_nodes: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || n_nodes < 5 {
            return Err(Error::InvalidGrid(format!(
                "half line needs L > 0 and at least 5 nodes (L = {half_width}, n = {n_nodes})"
            )));
        }
        let h = half_width / (n_nodes - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_nodes).map(|i| i as f64 * h).collect();
        nodes[n_nodes - 1] = half_width;
        Ok(Self::with_nodes(half_width, 0.0, Layout::HalfLine, nodes))
    }

    fn with_nodes(half_width: f64, excision: f64, layout: Layout, nodes: Vec<f64>) -> Self {
        let n = nodes.len();
        ProfileGrid {
            half_width,
            excision,
            layout,
            nodes,
            w: alloc::vec![0.0; n],
            v: Vec::new(),
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn excision(&self) -> f64 {
        self.excision
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_half_line(&self) -> bool {
        self.layout == Layout::HalfLine
    }

    /// Spacing of the uniform part of the grid.
    pub fn mesh_width(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Index of the node `y = 0`, if the grid has one.
    pub fn origin_index(&self) -> Option<usize> {
        match self.layout {
            Layout::FullLine { origin } => Some(origin),
            Layout::HalfLine => Some(0),
            Layout::Excised { .. } => None,
        }
    }

    /// Grid indices of the two nodes adjacent to the excised gap
    /// (`-δ`, `δ`), or of the origin twice on a full line.
    pub fn inner_indices(&self) -> (usize, usize) {
        match self.layout {
            Layout::FullLine { origin } => (origin, origin),
            Layout::Excised { split } => (split - 1, split),
            Layout::HalfLine => (0, 0),
        }
    }

    /// Support nodes of one half-axis.
    pub fn support(&self, side: Side) -> HalfSupport {
        let h = self.mesh_width();
        match (self.layout, side) {
            (Layout::FullLine { origin }, Side::Minus) => {
                let mut nodes = self.nodes[..origin].to_vec();
                let mut grid: Vec<Option<usize>> = (0..origin).map(Some).collect();
                nodes.push(-0.5 * h);
                grid.push(None);
                HalfSupport { side, nodes, grid }
            }
            (Layout::FullLine { origin }, Side::Plus) => {
                let mut nodes = alloc::vec![0.5 * h];
                let mut grid = alloc::vec![None];
                nodes.extend_from_slice(&self.nodes[origin + 1..]);
                grid.extend((origin + 1..self.nodes.len()).map(Some));
                HalfSupport { side, nodes, grid }
            }
            (Layout::Excised { split }, Side::Minus) => HalfSupport {
                side,
                nodes: self.nodes[..split].to_vec(),
                grid: (0..split).map(Some).collect(),
            },
            (Layout::Excised { split }, Side::Plus) => HalfSupport {
                side,
                nodes: self.nodes[split..].to_vec(),
                grid: (split..self.nodes.len()).map(Some).collect(),
            },
            (Layout::HalfLine, Side::Plus) => {
                let mut nodes = alloc::vec![0.5 * h];
                let mut grid = alloc::vec![None];
                nodes.extend_from_slice(&self.nodes[1..]);
                grid.extend((1..self.nodes.len()).map(Some));
                HalfSupport { side, nodes, grid }
            }
            (Layout::HalfLine, Side::Minus) => HalfSupport {
                side,
                nodes: Vec::new(),
                grid: Vec::new(),
            },
        }
    }

    /// Grid values sampled on a support; the offset node takes the mean of
    /// its two grid neighbours.
    pub fn on_support(&self, support: &HalfSupport, values: &[f64]) -> Vec<f64> {
        let origin = self.origin_index();
        support
            .grid
            .iter()
            .enumerate()
            .map(|(k, g)| match g {
                Some(i) => values[*i],
                None => {
                    let o = origin.unwrap_or(0);
                    let nb = match support.side {
                        Side::Minus => support.grid[k - 1].unwrap_or(o),
                        Side::Plus => support.grid[k + 1].unwrap_or(o),
                    };
                    0.5 * (values[o] + values[nb])
                }
            })
            .collect()
    }

    /// Grid indices belonging to a half-axis (origin excluded).
    pub fn side_indices(&self, side: Side) -> core::ops::Range<usize> {
        let n = self.nodes.len();
        match (self.layout, side) {
            (Layout::FullLine { origin }, Side::Minus) => 0..origin,
            (Layout::FullLine { origin }, Side::Plus) => origin + 1..n,
            (Layout::Excised { split }, Side::Minus) => 0..split,
            (Layout::Excised { split }, Side::Plus) => split..n,
            (Layout::HalfLine, Side::Plus) => 1..n,
            (Layout::HalfLine, Side::Minus) => 0..0,
        }
    }

    /// Mirror image `y ↦ -y` of the grid values (full-line and excised grids
    /// are symmetric).
    pub fn mirrored(values: &[f64]) -> Vec<f64> {
        values.iter().rev().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_line_has_origin_and_endpoints() {
        let g = ProfileGrid::new(6.0, 0.0, 4001).unwrap();
        assert_eq!(g.len(), 4001);
        assert_eq!(g.nodes()[2000], 0.0);
        assert_eq!(g.nodes()[0], -6.0);
        assert_eq!(g.nodes()[4000], 6.0);
        assert!(g.nodes().windows(2).all(|p| p[1] > p[0]));
        let even = ProfileGrid::new(1.0, 0.0, 10).unwrap();
        assert_eq!(even.len(), 11);
    }

    #[test]
    fn excised_grid_contains_delta() {
        let g = ProfileGrid::new(4.0, 0.25, 101).unwrap();
        let (a, b) = g.inner_indices();
        assert_eq!(g.nodes()[a], -0.25);
        assert_eq!(g.nodes()[b], 0.25);
        assert_eq!(g.nodes()[0], -4.0);
        assert_eq!(*g.nodes().last().unwrap(), 4.0);
        assert!(g.nodes().windows(2).all(|p| p[1] > p[0]));
        assert_eq!(g.support(Side::Plus).nodes[0], 0.25);
    }

    #[test]
    fn supports_offset_the_origin() {
        let g = ProfileGrid::new(1.0, 0.0, 11).unwrap();
        let m = g.support(Side::Minus);
        let p = g.support(Side::Plus);
        let h = g.mesh_width();
        assert_eq!(*m.nodes.last().unwrap(), -0.5 * h);
        assert_eq!(p.nodes[0], 0.5 * h);
        assert!((h - 0.2).abs() < 1e-15);
        assert_eq!(m.len(), 6);
        assert_eq!(p.len(), 6);
        assert_eq!(p.grid[1], Some(6));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(ProfileGrid::new(1.0, 1.0, 11).is_err());
        assert!(ProfileGrid::new(-1.0, 0.0, 11).is_err());
        assert!(ProfileGrid::new(1.0, 0.0, 3).is_err());
    }
}
