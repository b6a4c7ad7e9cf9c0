//! Epsilon-grid archive of non-dominated portfolios.
//!
//! Objective space (all three axes minimized) is cut into `n_box` boxes per
//! axis between the observed minima and maxima. The archive keeps at most one
//! portfolio per box, rejects candidates whose box is dominated by an
//! occupied box, and protects the per-objective extremes ("anchors").

mod grid;
mod table;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub use grid::{box_dominates, BoxIndex, Grid, EPS_FLOOR};
use table::BoxTable;

use crate::error::{Error, Result};
use crate::portfolio::{ObjectiveVector, Portfolio};

/// Largest supported number of boxes per axis.
pub const MAX_N_BOX: u32 = 4096;

/// `(risk, -ret, carbon)`: the all-minimized image of an [`ObjectiveVector`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizedObjectives(pub [f64; 3]);

impl From<ObjectiveVector> for MinimizedObjectives {
    fn from(o: ObjectiveVector) -> Self {
        MinimizedObjectives([o.risk, -o.ret, o.carbon])
    }
}

impl From<MinimizedObjectives> for ObjectiveVector {
    fn from(g: MinimizedObjectives) -> Self {
        ObjectiveVector {
            risk: g.0[0],
            ret: -g.0[1],
            carbon: g.0[2],
        }
    }
}

impl MinimizedObjectives {
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Pareto dominance: `a <= b` everywhere and `a < b` somewhere.
pub fn dominates(a: &MinimizedObjectives, b: &MinimizedObjectives) -> bool {
    let mut strict = false;
    for (x, y) in a.0.iter().zip(&b.0) {
        if x > y {
            return false;
        }
        strict |= x < y;
    }
    strict
}

/// Multiplicative epsilon-dominance, `(1 + eps) a_i <= b_i` for every axis.
///
/// Only defined for strictly positive vectors. The archive does not use this
/// predicate; acceptance works on the additive box grid.
pub fn eps_dominates(a: &MinimizedObjectives, b: &MinimizedObjectives, eps: f64) -> Result<bool> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::NonPositive(format!("eps = {eps}")));
    }
    if let Some(v) = a.0.iter().chain(&b.0).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositive(format!("component {v}")));
    }
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| (1.0 + eps) * x <= *y))
}

/// A stored portfolio with its objectives and current box.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveEntry {
    id: u64,
    portfolio: Portfolio,
    objectives: ObjectiveVector,
    minimized: MinimizedObjectives,
    box_index: BoxIndex,
}

impl ArchiveEntry {
    /// Insertion-order identifier, unique within one archive.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn portfolio(&self) -> &Portfolio {
        &self.portfolio
    }

    pub fn objectives(&self) -> &ObjectiveVector {
        &self.objectives
    }

    pub fn minimized(&self) -> &MinimizedObjectives {
        &self.minimized
    }

    pub fn box_index(&self) -> BoxIndex {
        self.box_index
    }
}

/// Ordering used to pick an anchor among entries sharing the minimum.
fn anchor_key_less(a: &ArchiveEntry, b: &ArchiveEntry, axis: usize) -> bool {
    let ga = &a.minimized.0;
    let gb = &b.minimized.0;
    ga[axis]
        .total_cmp(&gb[axis])
        .then_with(|| {
            ga.iter()
                .zip(gb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .then_with(|| a.id.cmp(&b.id))
        .is_lt()
}

/// The epsilon-approximate Pareto set.
#[derive(Clone, Debug)]
pub struct EpsArchive {
    n_box: u32,
    grid: Option<Grid>,
    entries: Vec<ArchiveEntry>,
    slots: HashMap<BoxIndex, usize>,
    table: BoxTable,
    /// Index into `entries` of the minimum on each axis; meaningless when empty.
    anchors: [usize; 3],
    next_id: u64,
}

impl EpsArchive {
    /// Empty archive; the grid is created from the first accepted point.
    pub fn new(n_box: u32) -> Result<Self> {
        if n_box == 0 || n_box > MAX_N_BOX {
            return Err(Error::InvalidConfig(format!(
                "n_box must be in 1..={MAX_N_BOX}, got {n_box}"
            )));
        }
        Ok(EpsArchive {
            n_box,
            grid: None,
            entries: Vec::new(),
            slots: HashMap::new(),
            table: BoxTable::new(n_box),
            anchors: [0; 3],
            next_id: 0,
        })
    }

    /// Empty archive on a preset grid. The grid still grows when a candidate
    /// falls outside it.
    pub fn with_grid(grid: Grid) -> Result<Self> {
        let mut a = EpsArchive::new(grid.n_box())?;
        a.grid = Some(grid);
        Ok(a)
    }

    /// Rebuilds an archive from stored entries, e.g. a reloaded front.
    ///
    /// Fails when two entries share a box or one dominates another.
    pub fn from_parts(grid: Grid, items: Vec<(u64, Portfolio, ObjectiveVector)>) -> Result<Self> {
        let mut a = EpsArchive::with_grid(grid.clone())?;
        let mut ids = BTreeSet::new();
        for (id, portfolio, objectives) in items {
            if !objectives.is_finite() {
                return Err(Error::InvalidFront(format!("entry {id} has non-finite objectives")));
            }
            if !ids.insert(id) {
                return Err(Error::InvalidFront(format!("duplicate entry id {id}")));
            }
            let minimized = MinimizedObjectives::from(objectives);
            if !grid.covers(&minimized) {
                return Err(Error::InvalidFront(format!("entry {id} lies outside the grid")));
            }
            let b = grid.box_index(&minimized);
            if a.slots.contains_key(&b) {
                return Err(Error::InvalidFront(format!("two entries share box {b:?}")));
            }
            a.slots.insert(b, a.entries.len());
            a.table.insert(&b);
            a.entries.push(ArchiveEntry {
                id,
                portfolio,
                objectives,
                minimized,
                box_index: b,
            });
        }
        for e in &a.entries {
            let dominated = a.table.any_below(&e.box_index, |b| {
                dominates(&a.entries[a.slots[b]].minimized, &e.minimized)
            });
            if dominated {
                return Err(Error::InvalidFront(format!("entry {} is dominated", e.id)));
            }
        }
        a.next_id = ids.last().map_or(0, |m| m + 1);
        a.recompute_anchors();
        Ok(a)
    }

    pub fn n_box(&self) -> u32 {
        self.n_box
    }

    /// Current grid, `None` until the first insert on a grid-less archive.
    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in storage order (not meaningful across inserts).
    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn get(&self, b: &BoxIndex) -> Option<&ArchiveEntry> {
        self.slots.get(b).map(|&i| &self.entries[i])
    }

    /// Entries holding the minimum risk, minimum negated return and minimum
    /// carbon, in that order.
    pub fn anchors(&self) -> Option<[&ArchiveEntry; 3]> {
        if self.entries.is_empty() {
            return None;
        }
        Some(self.anchors.map(|i| &self.entries[i]))
    }

    /// Offers a candidate to the archive; returns whether it was stored.
    ///
    /// Non-finite objectives are rejected.
    pub fn try_insert(&mut self, portfolio: Portfolio, objectives: ObjectiveVector) -> bool {
        let g = MinimizedObjectives::from(objectives);
        if !g.is_finite() {
            return false;
        }
        if self.entries.is_empty() {
            let grid = match &self.grid {
                None => match Grid::at_point(&g, self.n_box) {
                    Ok(grid) => grid,
                    Err(_) => return false,
                },
                Some(grid) if grid.covers(&g) => grid.clone(),
                Some(grid) => grid.extended_to(&g),
            };
            let b = grid.box_index(&g);
            self.grid = Some(grid);
            self.push(portfolio, objectives, g, b);
            self.anchors = [0; 3];
            return true;
        }

        let grid = self.grid.as_ref().expect("non-empty archive has a grid");
        if !grid.covers(&g) {
            let below_min = (0..3).any(|i| g.0[i] < grid.f_min()[i]);
            if !below_min {
                let b = grid.box_index(&g);
                let blocked = self.table.any_below(&b, |x| {
                    let e = &self.entries[self.slots[x]].minimized;
                    dominates(e, &g) || *e == g
                });
                if blocked {
                    return false;
                }
            }
            let new_grid = grid.extended_to(&g);
            // Anchors the candidate beats on every role they hold need no
            // protection while re-bucketing, provided the candidate is then
            // stored. Otherwise fall back to protecting them.
            let superseded: BTreeSet<usize> = self
                .anchors
                .iter()
                .copied()
                .filter(|&i| {
                    let e = &self.entries[i].minimized;
                    (0..3).all(|k| self.anchors[k] != i || g.0[k] < e.0[k])
                })
                .collect();
            if !superseded.is_empty() {
                let backup = self.clone();
                self.rebucket(new_grid.clone(), &superseded);
                if self.insert_covered(portfolio.clone(), objectives, g) {
                    return true;
                }
                *self = backup;
            }
            self.rebucket(new_grid, &BTreeSet::new());
        }
        self.insert_covered(portfolio, objectives, g)
    }

    /// Insertion of a candidate the current grid covers.
    fn insert_covered(&mut self, portfolio: Portfolio, objectives: ObjectiveVector, g: MinimizedObjectives) -> bool {
        let grid = self.grid.as_ref().expect("grid present");
        let b = grid.box_index(&g);
        // A new minimum on some axis is admitted like an anchor: box
        // dominance and the centre rule don't apply to it.
        let new_extreme = (0..3).any(|k| g.0[k] < self.entries[self.anchors[k]].minimized.0[k]);
        if !new_extreme && self.table.strictly_dominated(&b) {
            return false;
        }
        if let Some(&s) = self.slots.get(&b) {
            let inc = &self.entries[s].minimized;
            if !dominates(&g, inc) {
                if dominates(inc, &g) || *inc == g {
                    return false;
                }
                if !self.takes_over(&g, s) {
                    return false;
                }
                let d_new = grid.center_distance_sq(&g, &b);
                let d_old = grid.center_distance_sq(inc, &b);
                if !new_extreme && d_new >= d_old {
                    return false;
                }
            }
        }

        let former = self.anchors.map(|i| self.entries[i].box_index);
        let mut rescan = false;
        let mut victims: Vec<usize> = self
            .table
            .dominated_by(&b)
            .iter()
            .map(|x| self.slots[x])
            .filter(|&i| self.takes_over(&g, i))
            .collect();
        victims.sort_unstable_by(|a, b| b.cmp(a));
        for i in victims {
            rescan |= self.remove_at(i);
        }

        let id = self.next_id;
        if let Some(&s) = self.slots.get(&b) {
            rescan |= self.anchors.contains(&s);
            self.next_id += 1;
            self.entries[s] = ArchiveEntry {
                id,
                portfolio,
                objectives,
                minimized: g,
                box_index: b,
            };
        } else {
            self.push(portfolio, objectives, g, b);
        }

        if rescan {
            self.recompute_anchors();
        } else {
            let idx = self.slots[&b];
            for axis in 0..3 {
                let cur = self.anchors[axis];
                if anchor_key_less(&self.entries[idx], &self.entries[cur], axis) {
                    self.anchors[axis] = idx;
                }
            }
        }
        self.prune_demoted(&former);
        true
    }

    /// Grows the grid to cover `g` and re-buckets every entry.
    ///
    /// No-op when `g` is already inside the grid. Entries that end up sharing
    /// a box are reduced to one: an anchor if the box holds any, otherwise the
    /// entry closest to the box centre. Non-anchor entries whose new box is
    /// dominated by another occupied box are dropped.
    ///
    /// When several anchors land in the same box only one of them can stay,
    /// so an axis minimum may rise in that case.
    pub fn extend_grid(&mut self, g: &MinimizedObjectives) {
        if !g.is_finite() {
            return;
        }
        let new_grid = match &self.grid {
            None => match Grid::at_point(g, self.n_box) {
                Ok(grid) => grid,
                Err(_) => return,
            },
            Some(grid) if grid.covers(g) => return,
            Some(grid) => grid.extended_to(g),
        };
        self.rebucket(new_grid, &BTreeSet::new());
    }

    /// Checks every invariant by brute force. Intended for tests.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.entries.len();
        if self.slots.len() != n {
            return Err(format!("{} slots for {n} entries", self.slots.len()));
        }
        if n == 0 {
            return Ok(());
        }
        let grid = self.grid.as_ref().ok_or("non-empty archive without grid")?;
        let mut boxes = BTreeSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            if !grid.covers(&e.minimized) {
                return Err(format!("entry {} outside grid", e.id));
            }
            if grid.box_index(&e.minimized) != e.box_index {
                return Err(format!("entry {} has stale box", e.id));
            }
            if !boxes.insert(e.box_index) {
                return Err(format!("box {:?} holds two entries", e.box_index));
            }
            if self.slots.get(&e.box_index) != Some(&i) {
                return Err(format!("slot map out of sync for entry {}", e.id));
            }
        }
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries {
                if dominates(&a.minimized, &b.minimized) {
                    return Err(format!("entry {} dominates entry {}", a.id, b.id));
                }
                if box_dominates(&b.box_index, &a.box_index) && !self.anchors.contains(&i) {
                    return Err(format!("non-anchor entry {} sits in a dominated box", a.id));
                }
            }
        }
        for axis in 0..3 {
            let min = self
                .entries
                .iter()
                .map(|e| e.minimized.0[axis])
                .fold(f64::INFINITY, f64::min);
            let anchor = self.entries.get(self.anchors[axis]).ok_or("anchor out of range")?;
            if anchor.minimized.0[axis] != min {
                return Err(format!(
                    "anchor {axis} at {} but minimum is {min}",
                    anchor.minimized.0[axis]
                ));
            }
        }
        Ok(())
    }

    /// Whether `g` is no worse than entry `idx` on every axis it anchors.
    fn takes_over(&self, g: &MinimizedObjectives, idx: usize) -> bool {
        let e = &self.entries[idx].minimized;
        (0..3).all(|k| self.anchors[k] != idx || g.0[k] <= e.0[k])
    }

    fn push(&mut self, portfolio: Portfolio, objectives: ObjectiveVector, g: MinimizedObjectives, b: BoxIndex) {
        self.slots.insert(b, self.entries.len());
        self.table.insert(&b);
        self.entries.push(ArchiveEntry {
            id: self.next_id,
            portfolio,
            objectives,
            minimized: g,
            box_index: b,
        });
        self.next_id += 1;
    }

    /// Removes entry `i`; returns whether it was an anchor.
    fn remove_at(&mut self, i: usize) -> bool {
        let last = self.entries.len() - 1;
        let removed = self.entries.swap_remove(i);
        self.slots.remove(&removed.box_index);
        self.table.remove(&removed.box_index);
        let mut was_anchor = false;
        for a in self.anchors.iter_mut() {
            if *a == i {
                was_anchor = true;
            } else if *a == last {
                *a = i;
            }
        }
        if i != last {
            self.slots.insert(self.entries[i].box_index, i);
        }
        was_anchor
    }

    fn recompute_anchors(&mut self) {
        if self.entries.is_empty() {
            self.anchors = [0; 3];
            return;
        }
        for axis in 0..3 {
            let mut best = 0;
            for i in 1..self.entries.len() {
                if anchor_key_less(&self.entries[i], &self.entries[best], axis) {
                    best = i;
                }
            }
            self.anchors[axis] = best;
        }
    }

    /// Re-buckets every entry on `grid`. Anchors listed in `unprotected` are
    /// treated like ordinary entries.
    fn rebucket(&mut self, grid: Grid, unprotected: &BTreeSet<usize>) {
        let anchor_set: BTreeSet<usize> = if self.entries.is_empty() {
            BTreeSet::new()
        } else {
            self.anchors.iter().copied().filter(|i| !unprotected.contains(i)).collect()
        };
        let former_ids: BTreeSet<u64> = if self.entries.is_empty() {
            BTreeSet::new()
        } else {
            self.anchors.iter().map(|&i| self.entries[i].id).collect()
        };
        let mut groups: BTreeMap<BoxIndex, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            groups.entry(grid.box_index(&e.minimized)).or_default().push(i);
        }

        let mut keep = vec![false; self.entries.len()];
        let mut table = BoxTable::new(self.n_box);
        let mut winners = Vec::with_capacity(groups.len());
        for (b, members) in &groups {
            let anchored: Vec<usize> = members.iter().copied().filter(|i| anchor_set.contains(i)).collect();
            let pool = if anchored.is_empty() { members } else { &anchored };
            let w = pool
                .iter()
                .copied()
                .min_by(|&x, &y| {
                    let dx = grid.center_distance_sq(&self.entries[x].minimized, b);
                    let dy = grid.center_distance_sq(&self.entries[y].minimized, b);
                    dx.total_cmp(&dy).then(self.entries[x].id.cmp(&self.entries[y].id))
                })
                .expect("groups are non-empty");
            keep[w] = true;
            table.insert(b);
            winners.push((*b, w));
        }
        for (b, w) in &winners {
            if !anchor_set.contains(w) && table.strictly_dominated(b) {
                keep[*w] = false;
            }
        }

        let old = std::mem::take(&mut self.entries);
        self.slots.clear();
        self.table = BoxTable::new(self.n_box);
        for (i, mut e) in old.into_iter().enumerate() {
            if !keep[i] {
                continue;
            }
            e.box_index = grid.box_index(&e.minimized);
            self.slots.insert(e.box_index, self.entries.len());
            self.table.insert(&e.box_index);
            self.entries.push(e);
        }
        self.grid = Some(grid);
        self.recompute_anchors();
        let former: Vec<BoxIndex> = self
            .entries
            .iter()
            .filter(|e| former_ids.contains(&e.id))
            .map(|e| e.box_index)
            .collect();
        self.prune_demoted(&former);
    }

    /// Drops former anchors that lost their role while sitting in a box
    /// dominated by another occupied box.
    fn prune_demoted(&mut self, former: &[BoxIndex]) {
        for b in former {
            let Some(&i) = self.slots.get(b) else { continue };
            if !self.anchors.contains(&i) && self.table.strictly_dominated(b) {
                self.remove_at(i);
            }
        }
    }
}
