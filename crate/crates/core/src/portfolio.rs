//! Feasible portfolios on the bounded simplex and their three objectives.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::AssetUniverse;

/// Tolerance on `|sum(w) - 1|` for a feasible portfolio.
pub const SUM_TOL: f64 = 1e-9;
/// Tolerance on per-asset bound violations.
pub const BOUND_TOL: f64 = 1e-12;

const MAX_REJECTION_DRAWS: usize = 1000;
const MAX_REPAIR_ROUNDS: usize = 256;

/// Per-asset weight bounds. Construction guarantees the bounded simplex is
/// non-empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoundsRepr", into = "BoundsRepr")]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct BoundsRepr {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<BoundsRepr> for Bounds {
    type Error = Error;
    fn try_from(r: BoundsRepr) -> Result<Self> {
        Bounds::new(r.lower, r.upper)
    }
}

impl From<Bounds> for BoundsRepr {
    fn from(b: Bounds) -> Self {
        BoundsRepr {
            lower: b.lower,
            upper: b.upper,
        }
    }
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                context: "bounds",
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InfeasibleBounds("no assets".into()));
        }
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(0.0..=1.0).contains(&l) || !(0.0..=1.0).contains(&u) || l > u {
                return Err(Error::InfeasibleBounds(format!(
                    "asset {i}: bounds [{l}, {u}] must satisfy 0 <= lower <= upper <= 1"
                )));
            }
        }
        let sl: f64 = lower.iter().sum();
        let su: f64 = upper.iter().sum();
        if sl > 1.0 + BOUND_TOL {
            return Err(Error::InfeasibleBounds(format!(
                "sum of lower bounds {sl} exceeds 1"
            )));
        }
        if su < 1.0 - BOUND_TOL {
            return Err(Error::InfeasibleBounds(format!(
                "sum of upper bounds {su} is below 1"
            )));
        }
        Ok(Bounds { lower, upper })
    }

    /// Long-only `[0, 1]` bounds.
    pub fn unit(n: usize) -> Self {
        Bounds::new(vec![0.0; n], vec![1.0; n]).expect("unit bounds are feasible")
    }

    /// Long-only with a common per-asset cap, e.g. 0.2.
    pub fn capped(n: usize, cap: f64) -> Result<Self> {
        Bounds::new(vec![0.0; n], vec![cap; n])
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Whether `w` satisfies the simplex and bound constraints.
    pub fn is_feasible(&self, w: &[f64]) -> bool {
        w.len() == self.len()
            && w.iter().all(|v| v.is_finite())
            && (w.iter().sum::<f64>() - 1.0).abs() <= SUM_TOL
            && w.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((&x, &l), &u)| x >= l - BOUND_TOL && x <= u + BOUND_TOL)
    }
}

/// A weight vector on the bounded simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Portfolio(Vec<f64>);

impl Portfolio {
    /// Validates `weights` against `bounds`.
    pub fn new(weights: Vec<f64>, bounds: &Bounds) -> Result<Self> {
        if weights.len() != bounds.len() {
            return Err(Error::DimensionMismatch {
                context: "portfolio weights",
                expected: bounds.len(),
                actual: weights.len(),
            });
        }
        if !bounds.is_feasible(&weights) {
            return Err(Error::InvalidPortfolio(format!(
                "weights {weights:?} violate the simplex or bounds"
            )));
        }
        Ok(Portfolio(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.0
    }
}

/// Image of a portfolio: variance (minimized), expected return (maximized)
/// and weighted carbon score (minimized).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub risk: f64,
    pub ret: f64,
    pub carbon: f64,
}

impl ObjectiveVector {
    pub fn is_finite(&self) -> bool {
        self.risk.is_finite() && self.ret.is_finite() && self.carbon.is_finite()
    }
}

/// Evaluates the three objectives of `p` on `universe`.
pub fn evaluate(p: &Portfolio, universe: &AssetUniverse) -> Result<ObjectiveVector> {
    evaluate_weights(p.weights(), universe)
}

/// [`evaluate`] on a raw weight slice. Weights must sum to one.
///
/// Return and carbon are accumulated relative to the first asset
/// (`x_0 + sum w_i (x_i - x_0)`), which equals `w . x` on the simplex and keeps
/// an objective exactly constant when all assets share the same value.
pub fn evaluate_weights(w: &[f64], universe: &AssetUniverse) -> Result<ObjectiveVector> {
    let n = universe.n_assets();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            context: "portfolio vs instance",
            expected: n,
            actual: w.len(),
        });
    }
    let sigma = universe.sigma_flat();
    let mut risk = 0.0;
    for (i, &wi) in w.iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        let row = &sigma[i * n..(i + 1) * n];
        let s: f64 = row.iter().zip(w).map(|(s, wj)| s * wj).sum();
        risk += wi * s;
    }
    let obj = ObjectiveVector {
        risk: risk.max(0.0),
        ret: anchored_dot(w, universe.mu()),
        carbon: anchored_dot(w, universe.carbon()),
    };
    if !(obj.is_finite() && risk.is_finite()) {
        return Err(Error::NonFinite(format!(
            "objectives {obj:?} for weights {w:?}"
        )));
    }
    Ok(obj)
}

fn anchored_dot(w: &[f64], x: &[f64]) -> f64 {
    let x0 = x[0];
    x0 + w.iter().zip(x).map(|(wi, xi)| wi * (xi - x0)).sum::<f64>()
}

/// Projects an arbitrary finite vector onto the bounded simplex.
///
/// Clips to the bounds, then spreads the residual `1 - sum` over the
/// coordinates that can still move, proportionally to their excess over the
/// lower bound, clipping again until nothing changes. Feasible input is
/// returned unchanged.
pub fn repair(raw: &[f64], bounds: &Bounds) -> Result<Portfolio> {
    if raw.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            context: "repair input",
            expected: bounds.len(),
            actual: raw.len(),
        });
    }
    if let Some(v) = raw.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidPortfolio(format!(
            "cannot repair non-finite weight {v}"
        )));
    }
    if bounds.is_feasible(raw) {
        return Ok(Portfolio(raw.to_vec()));
    }
    let mut w = raw.to_vec();
    repair_in_place(&mut w, bounds);
    debug_assert!(bounds.is_feasible(&w), "repair produced {w:?}");
    Ok(Portfolio(w))
}

pub(crate) fn repair_in_place(w: &mut [f64], bounds: &Bounds) {
    let (lo, hi) = (bounds.lower(), bounds.upper());
    for ((x, &l), &u) in w.iter_mut().zip(lo).zip(hi) {
        *x = x.clamp(l, u);
    }
    for _ in 0..MAX_REPAIR_ROUNDS {
        let residual = 1.0 - w.iter().sum::<f64>();
        if residual.abs() <= 1e-15 {
            break;
        }
        if residual < 0.0 {
            // Shrink toward the lower bounds; total slack always covers it.
            let slack: f64 = w.iter().zip(lo).map(|(x, l)| x - l).sum();
            if slack <= 0.0 {
                break;
            }
            let f = -residual / slack;
            for (x, &l) in w.iter_mut().zip(lo) {
                *x = (*x - f * (*x - l)).max(l);
            }
        } else {
            let excess: f64 = w
                .iter()
                .zip(lo)
                .zip(hi)
                .filter(|((x, _), u)| *x < *u)
                .map(|((x, l), _)| x - l)
                .sum();
            if excess > 0.0 {
                let f = residual / excess;
                for ((x, &l), &u) in w.iter_mut().zip(lo).zip(hi) {
                    if *x < u {
                        *x = (*x + f * (*x - l)).min(u);
                    }
                }
            } else {
                // Every free coordinate sits at its lower bound: fill headroom.
                let room: f64 = w.iter().zip(hi).map(|(x, u)| u - x).sum();
                if room <= 0.0 {
                    break;
                }
                let f = residual / room;
                for (x, &u) in w.iter_mut().zip(hi) {
                    *x = (*x + f * (u - *x)).min(u);
                }
            }
        }
    }
}

/// Draws a portfolio uniformly from the bounded simplex.
///
/// Samples a flat Dirichlet over the mass left after the lower bounds and
/// rejects draws that break an upper bound; after too many rejections the last
/// draw is repaired instead.
pub fn random_portfolio<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Portfolio {
    let n = bounds.len();
    if n == 1 {
        return Portfolio(vec![1.0]);
    }
    let (lo, hi) = (bounds.lower(), bounds.upper());
    let mass = (1.0 - lo.iter().sum::<f64>()).max(0.0);
    let mut w = vec![0.0; n];
    for _ in 0..MAX_REJECTION_DRAWS {
        let mut total = 0.0;
        for x in w.iter_mut() {
            let e: f64 = Exp1.sample(rng);
            *x = e;
            total += e;
        }
        for (x, &l) in w.iter_mut().zip(lo) {
            *x = l + mass * *x / total;
        }
        if w.iter().zip(hi).all(|(x, u)| *x <= *u) {
            if bounds.is_feasible(&w) {
                return Portfolio(w);
            }
            break;
        }
    }
    repair_in_place(&mut w, bounds);
    Portfolio(w)
}
