use serde::{Deserialize, Serialize};

use super::MinimizedObjectives;
use crate::error::{Error, Result};

/// Box width used on an axis whose observed range is empty.
pub const EPS_FLOOR: f64 = 1e-12;

/// Integer box coordinates, one per minimized objective.
pub type BoxIndex = [u32; 3];

/// Partition of the observed objective range into `n_box` boxes per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    f_min: [f64; 3],
    f_max: [f64; 3],
    n_box: u32,
    eps: [f64; 3],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GridRepr {
    f_min: [f64; 3],
    f_max: [f64; 3],
    eps: [f64; 3],
    n_box: u32,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        let grid = Grid::new(r.f_min, r.f_max, r.n_box)?;
        if grid.eps != r.eps {
            return Err(Error::InvalidFront(format!(
                "grid eps {:?} inconsistent with bounds (expected {:?})",
                r.eps, grid.eps
            )));
        }
        Ok(grid)
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr {
            f_min: g.f_min,
            f_max: g.f_max,
            eps: g.eps,
            n_box: g.n_box,
        }
    }
}

impl Grid {
    pub fn new(f_min: [f64; 3], f_max: [f64; 3], n_box: u32) -> Result<Self> {
        if n_box == 0 {
            return Err(Error::InvalidConfig("n_box must be positive".into()));
        }
        for i in 0..3 {
            if !(f_min[i].is_finite() && f_max[i].is_finite() && f_min[i] <= f_max[i]) {
                return Err(Error::InvalidConfig(format!(
                    "grid axis {i}: need finite f_min <= f_max, got [{}, {}]",
                    f_min[i], f_max[i]
                )));
            }
        }
        let eps = std::array::from_fn(|i| {
            if f_max[i] > f_min[i] {
                (f_max[i] - f_min[i]) / n_box as f64
            } else {
                EPS_FLOOR
            }
        });
        Ok(Grid {
            f_min,
            f_max,
            n_box,
            eps,
        })
    }

    /// Zero-width grid sitting on a single point.
    pub fn at_point(g: &MinimizedObjectives, n_box: u32) -> Result<Self> {
        Grid::new(g.0, g.0, n_box)
    }

    pub fn f_min(&self) -> [f64; 3] {
        self.f_min
    }

    pub fn f_max(&self) -> [f64; 3] {
        self.f_max
    }

    pub fn eps(&self) -> [f64; 3] {
        self.eps
    }

    pub fn n_box(&self) -> u32 {
        self.n_box
    }

    pub fn covers(&self, g: &MinimizedObjectives) -> bool {
        (0..3).all(|i| self.f_min[i] <= g.0[i] && g.0[i] <= self.f_max[i])
    }

    /// Smallest grid containing both `self` and `g`. Never contracts.
    pub fn extended_to(&self, g: &MinimizedObjectives) -> Grid {
        let f_min = std::array::from_fn(|i| self.f_min[i].min(g.0[i]));
        let f_max = std::array::from_fn(|i| self.f_max[i].max(g.0[i]));
        Grid::new(f_min, f_max, self.n_box).expect("extension of a valid grid is valid")
    }

    /// `floor((g - f_min) / eps)` per axis, clamped to `[0, n_box - 1]`.
    pub fn box_index(&self, g: &MinimizedObjectives) -> BoxIndex {
        let top = (self.n_box - 1) as f64;
        std::array::from_fn(|i| {
            let k = ((g.0[i] - self.f_min[i]) / self.eps[i]).floor();
            k.clamp(0.0, top) as u32
        })
    }

    /// Squared Euclidean distance from `g` to the centre of box `b`, measured in
    /// box widths on every axis.
    pub fn center_distance_sq(&self, g: &MinimizedObjectives, b: &BoxIndex) -> f64 {
        (0..3)
            .map(|i| {
                let d = (g.0[i] - self.f_min[i]) / self.eps[i] - (b[i] as f64 + 0.5);
                d * d
            })
            .sum()
    }
}

/// Strict Pareto dominance between box indices.
pub fn box_dominates(a: &BoxIndex, b: &BoxIndex) -> bool {
    a != b && a.iter().zip(b).all(|(x, y)| x <= y)
}
