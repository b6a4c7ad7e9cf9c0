//! Occupancy table over the box grid answering box-dominance queries.
//!
//! Boxes are bucketed by their first coordinate. Each row keeps its occupied
//! `(b2, b3)` cells sorted plus lazily rebuilt prefix-minimum and
//! suffix-maximum arrays of `b3` over `b2`, so "is some occupied box below
//! this one" costs one array read per row.

use std::cell::RefCell;
use std::collections::BTreeSet;

use super::grid::BoxIndex;

const NONE_MIN: u32 = u32::MAX;

#[derive(Clone, Debug, Default)]
struct Row {
    cells: BTreeSet<(u32, u32)>,
    cache: RefCell<Option<RowCache>>,
}

#[derive(Clone, Debug)]
struct RowCache {
    /// min b3 over cells with b2' <= b2
    prefix_min: Vec<u32>,
    /// max b3 + 1 over cells with b2' >= b2 (0 = no cell)
    suffix_max: Vec<u32>,
}

impl Row {
    fn with_cache<T>(&self, n: usize, f: impl FnOnce(&RowCache) -> T) -> T {
        let mut slot = self.cache.borrow_mut();
        let cache = slot.get_or_insert_with(|| {
            let mut prefix_min = vec![NONE_MIN; n];
            let mut suffix_max = vec![0; n];
            for &(b2, b3) in &self.cells {
                let k = b2 as usize;
                prefix_min[k] = prefix_min[k].min(b3);
                suffix_max[k] = suffix_max[k].max(b3 + 1);
            }
            for k in 1..n {
                prefix_min[k] = prefix_min[k].min(prefix_min[k - 1]);
            }
            for k in (0..n.saturating_sub(1)).rev() {
                suffix_max[k] = suffix_max[k].max(suffix_max[k + 1]);
            }
            RowCache {
                prefix_min,
                suffix_max,
            }
        });
        f(cache)
    }

    fn invalidate(&mut self) {
        *self.cache.get_mut() = None;
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BoxTable {
    n: usize,
    rows: Vec<Row>,
}

impl BoxTable {
    pub fn new(n_box: u32) -> Self {
        let n = n_box as usize;
        BoxTable {
            n,
            rows: vec![Row::default(); n],
        }
    }

    pub fn insert(&mut self, b: &BoxIndex) {
        let row = &mut self.rows[b[0] as usize];
        row.cells.insert((b[1], b[2]));
        row.invalidate();
    }

    pub fn remove(&mut self, b: &BoxIndex) {
        let row = &mut self.rows[b[0] as usize];
        row.cells.remove(&(b[1], b[2]));
        row.invalidate();
    }

    /// Whether some occupied box other than `b` satisfies `box <= b`.
    pub fn strictly_dominated(&self, b: &BoxIndex) -> bool {
        let [b1, b2, b3] = *b;
        let k2 = b2 as usize;
        for row in &self.rows[..b1 as usize] {
            if row.cells.is_empty() {
                continue;
            }
            if row.with_cache(self.n, |c| c.prefix_min[k2] <= b3) {
                return true;
            }
        }
        let row = &self.rows[b1 as usize];
        if row.cells.is_empty() {
            return false;
        }
        if k2 > 0 && row.with_cache(self.n, |c| c.prefix_min[k2 - 1] <= b3) {
            return true;
        }
        row.cells.range((b2, 0)..(b2, b3)).next().is_some()
    }

    /// Occupied boxes `x` with `b <= x` and `x != b`.
    pub fn dominated_by(&self, b: &BoxIndex) -> Vec<BoxIndex> {
        let [b1, b2, b3] = *b;
        let mut out = Vec::new();
        for (r, row) in self.rows.iter().enumerate().skip(b1 as usize) {
            if row.cells.is_empty() || row.with_cache(self.n, |c| c.suffix_max[b2 as usize] <= b3) {
                continue;
            }
            for &(c2, c3) in row.cells.range((b2, 0)..) {
                let x = [r as u32, c2, c3];
                if c3 >= b3 && x != *b {
                    out.push(x);
                }
            }
        }
        out
    }

    /// Visits occupied boxes `x <= b` until `f` returns true.
    pub fn any_below(&self, b: &BoxIndex, mut f: impl FnMut(&BoxIndex) -> bool) -> bool {
        let [b1, b2, b3] = *b;
        for (r, row) in self.rows.iter().enumerate().take(b1 as usize + 1) {
            if row.cells.is_empty() || row.with_cache(self.n, |c| c.prefix_min[b2 as usize] > b3) {
                continue;
            }
            for &(c2, c3) in row.cells.range(..=(b2, u32::MAX)) {
                if c3 <= b3 && f(&[r as u32, c2, c3]) {
                    return true;
                }
            }
        }
        false
    }
}
