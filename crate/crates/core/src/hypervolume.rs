//! Exact hypervolume of a set of minimized 3-D points.

use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Two-dimensional staircase of mutually non-dominated points with the area
/// it dominates up to a reference corner.
struct Staircase {
    points: BTreeMap<Key, f64>,
    rx: f64,
    ry: f64,
    area: f64,
}

impl Staircase {
    fn new(rx: f64, ry: f64) -> Self {
        Staircase {
            points: BTreeMap::new(),
            rx,
            ry,
            area: 0.0,
        }
    }

    fn insert(&mut self, x: f64, y: f64) {
        if let Some((_, &qy)) = self.points.range(..=Key(x)).next_back() {
            if qy <= y {
                return;
            }
        }
        let mut h = self
            .points
            .range(..Key(x))
            .next_back()
            .map_or(self.ry, |(_, &qy)| qy);
        let mut t = x;
        let mut added = 0.0;
        let mut doomed = Vec::new();
        let mut closed = false;
        for (&Key(sx), &sy) in self.points.range(Key(x)..) {
            added += (sx - t) * (h - y);
            if sy < y {
                closed = true;
                break;
            }
            doomed.push(Key(sx));
            t = sx;
            h = sy;
        }
        if !closed {
            added += (self.rx - t) * (h - y);
        }
        for k in doomed {
            self.points.remove(&k);
        }
        self.points.insert(Key(x), y);
        self.area += added;
    }
}

/// Volume dominated by `points` and bounded by `reference`.
///
/// Points that do not strictly dominate the reference contribute nothing.
/// Runs in `O(n log n)` by sweeping the third axis.
pub fn hypervolume(points: &[[f64; 3]], reference: [f64; 3]) -> f64 {
    let mut pts: Vec<[f64; 3]> = points
        .iter()
        .copied()
        .filter(|p| (0..3).all(|i| p[i] < reference[i]))
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut stairs = Staircase::new(reference[0], reference[1]);
    let mut volume = 0.0;
    let mut z = pts[0][2];
    for p in &pts {
        volume += stairs.area * (p[2] - z);
        z = p[2];
        stairs.insert(p[0], p[1]);
    }
    volume + stairs.area * (reference[2] - z)
}
