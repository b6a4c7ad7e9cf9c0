//! A-posteriori preferences: percentile aspiration levels, investor profiles,
//! the region of interest they cut out of a front, and its representative
//! portfolios.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::FrontEntry;

/// Linear-interpolation percentile: with the values sorted and
/// `h = (q / 100)(n - 1)`, interpolates between positions `floor(h)` and
/// `ceil(h)`. `q = 100` gives the maximum.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("percentile of an empty list"));
    }
    if !(q > 0.0 && q <= 100.0) {
        return Err(Error::InvalidConfig(format!("percentile {q} outside (0, 100]")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("percentile input {v}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenLabel {
    Weak,
    Moderate,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskLabel {
    Conservative,
    Cautious,
    Aggressive,
}

impl GreenLabel {
    pub const ALL: [GreenLabel; 3] = [GreenLabel::Weak, GreenLabel::Moderate, GreenLabel::Strong];

    pub fn as_str(self) -> &'static str {
        match self {
            GreenLabel::Weak => "weak",
            GreenLabel::Moderate => "moderate",
            GreenLabel::Strong => "strong",
        }
    }
}

impl RiskLabel {
    pub const ALL: [RiskLabel; 3] = [RiskLabel::Conservative, RiskLabel::Cautious, RiskLabel::Aggressive];

    pub fn as_str(self) -> &'static str {
        match self {
            RiskLabel::Conservative => "conservative",
            RiskLabel::Cautious => "cautious",
            RiskLabel::Aggressive => "aggressive",
        }
    }
}

impl fmt::Display for GreenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for RiskLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GreenLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GreenLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown green profile '{s}' (weak, moderate, strong)")))
    }
}

impl FromStr for RiskLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RiskLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown risk profile '{s}' (conservative, cautious, aggressive)"
                ))
            })
    }
}

/// Carbon percentile per green profile.
///
/// The defaults put the weak profile on the 25th percentile, i.e. the
/// tightest carbon bound; swap them in the profile file for the opposite
/// reading.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreenPercentiles {
    pub weak: f64,
    pub moderate: f64,
    pub strong: f64,
}

impl Default for GreenPercentiles {
    fn default() -> Self {
        GreenPercentiles {
            weak: 25.0,
            moderate: 55.0,
            strong: 75.0,
        }
    }
}

/// Risk percentile per loss-aversion profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiskPercentiles {
    pub conservative: f64,
    pub cautious: f64,
    pub aggressive: f64,
}

impl Default for RiskPercentiles {
    fn default() -> Self {
        RiskPercentiles {
            conservative: 50.0,
            cautious: 75.0,
            aggressive: 100.0,
        }
    }
}

/// Label-to-percentile maps for both preference dimensions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub green: GreenPercentiles,
    pub risk: RiskPercentiles,
}

impl ProfileConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, q) in self
            .green_percentiles()
            .iter()
            .zip(GreenLabel::ALL.map(GreenLabel::as_str))
            .map(|(q, l)| (l, *q))
            .chain(
                self.risk_percentiles()
                    .iter()
                    .zip(RiskLabel::ALL.map(RiskLabel::as_str))
                    .map(|(q, l)| (l, *q)),
            )
        {
            if !(q > 0.0 && q <= 100.0) {
                return Err(Error::InvalidConfig(format!(
                    "percentile for '{name}' must lie in (0, 100], got {q}"
                )));
            }
        }
        Ok(())
    }

    /// `[weak, moderate, strong]`.
    pub fn green_percentiles(&self) -> [f64; 3] {
        [self.green.weak, self.green.moderate, self.green.strong]
    }

    /// `[conservative, cautious, aggressive]`.
    pub fn risk_percentiles(&self) -> [f64; 3] {
        [self.risk.conservative, self.risk.cautious, self.risk.aggressive]
    }

    pub fn green(&self, label: GreenLabel) -> f64 {
        self.green_percentiles()[label as usize]
    }

    pub fn risk(&self, label: RiskLabel) -> f64 {
        self.risk_percentiles()[label as usize]
    }
}

/// Carbon and risk thresholds resolved on a particular front.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceVectors {
    /// Carbon thresholds for weak, moderate, strong.
    pub p_g: [f64; 3],
    /// Risk thresholds for conservative, cautious, aggressive.
    pub p_r: [f64; 3],
}

impl ReferenceVectors {
    pub fn filter(&self, green: GreenLabel, risk: RiskLabel) -> PreferenceFilter {
        PreferenceFilter {
            p_g: self.p_g[green as usize],
            p_r: self.p_r[risk as usize],
        }
    }
}

/// Percentiles of carbon and risk over the front.
pub fn reference_vectors(front: &[FrontEntry], green: [f64; 3], risk: [f64; 3]) -> Result<ReferenceVectors> {
    if front.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let carbon: Vec<f64> = front.iter().map(|e| e.carbon).collect();
    let risks: Vec<f64> = front.iter().map(|e| e.risk).collect();
    let mut p_g = [0.0; 3];
    let mut p_r = [0.0; 3];
    for k in 0..3 {
        p_g[k] = percentile(&carbon, green[k])?;
        p_r[k] = percentile(&risks, risk[k])?;
    }
    Ok(ReferenceVectors { p_g, p_r })
}

/// Upper bounds on carbon (`p_g`) and risk (`p_r`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceFilter {
    pub p_g: f64,
    pub p_r: f64,
}

impl PreferenceFilter {
    /// Rejects NaN thresholds. Infinite thresholds are allowed and disable
    /// that bound.
    pub fn new(p_g: f64, p_r: f64) -> Result<Self> {
        if p_g.is_nan() || p_r.is_nan() {
            return Err(Error::InvalidConfig("thresholds must be numbers".into()));
        }
        Ok(PreferenceFilter { p_g, p_r })
    }

    pub fn admits(&self, e: &FrontEntry) -> bool {
        e.carbon <= self.p_g && e.risk <= self.p_r
    }
}

/// Front members meeting both aspiration levels.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionOfInterest<'a> {
    pub entries: Vec<&'a FrontEntry>,
    pub filter: PreferenceFilter,
}

impl RegionOfInterest<'_> {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.id).collect()
    }
}

/// Members of `front` with `carbon <= p_g` and `risk <= p_r`, in front order.
pub fn filter_region<'a>(front: &'a [FrontEntry], filter: PreferenceFilter) -> RegionOfInterest<'a> {
    RegionOfInterest {
        entries: front.iter().filter(|e| filter.admits(e)).collect(),
        filter,
    }
}

/// The four portfolios reported for a region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Representatives<'a> {
    pub opt: &'a FrontEntry,
    pub min_var: &'a FrontEntry,
    pub min_emi: &'a FrontEntry,
    pub max_ret: &'a FrontEntry,
}

impl<'a> Representatives<'a> {
    /// `(label, entry)` in report order.
    pub fn rows(&self) -> [(&'static str, &'a FrontEntry); 4] {
        [
            ("opt", self.opt),
            ("min var", self.min_var),
            ("min emi", self.min_emi),
            ("max ret", self.max_ret),
        ]
    }
}

/// Tie-break: lowest risk, then lowest carbon, then highest return, then
/// lexicographically smallest weights.
fn tie_break(a: &FrontEntry, b: &FrontEntry) -> Ordering {
    a.risk
        .total_cmp(&b.risk)
        .then(a.carbon.total_cmp(&b.carbon))
        .then(b.ret.total_cmp(&a.ret))
        .then_with(|| {
            a.weights
                .iter()
                .zip(&b.weights)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

fn best_by<'a>(entries: &[&'a FrontEntry], primary: impl Fn(&FrontEntry, &FrontEntry) -> Ordering) -> &'a FrontEntry {
    entries
        .iter()
        .copied()
        .min_by(|a, b| primary(a, b).then_with(|| tie_break(a, b)))
        .expect("non-empty")
}

/// Normalized Chebyshev distance of each member to the region's ideal point,
/// with the region's nadir as scale. Axes where all members agree are
/// skipped.
pub fn chebyshev_distances(entries: &[&FrontEntry]) -> Vec<f64> {
    let gs: Vec<[f64; 3]> = entries.iter().map(|e| e.minimized().0).collect();
    let mut ideal = [f64::INFINITY; 3];
    let mut nadir = [f64::NEG_INFINITY; 3];
    for g in &gs {
        for i in 0..3 {
            ideal[i] = ideal[i].min(g[i]);
            nadir[i] = nadir[i].max(g[i]);
        }
    }
    gs.iter()
        .map(|g| {
            (0..3)
                .filter(|&i| nadir[i] > ideal[i])
                .map(|i| (g[i] - ideal[i]) / (nadir[i] - ideal[i]))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Chebyshev distances this close to the minimum count as tied for `opt`.
pub const DISTANCE_TIE_TOL: f64 = 1e-12;

/// Minimum-risk, minimum-carbon, maximum-return and compromise members of a
/// non-empty region.
pub fn representatives<'a>(region: &RegionOfInterest<'a>) -> Result<Representatives<'a>> {
    let entries = &region.entries;
    if entries.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let dist = chebyshev_distances(entries);
    let best = dist.iter().copied().fold(f64::INFINITY, f64::min);
    let opt_idx = (0..entries.len())
        .filter(|&i| dist[i] - best <= DISTANCE_TIE_TOL)
        .min_by(|&a, &b| tie_break(entries[a], entries[b]))
        .expect("non-empty");
    Ok(Representatives {
        opt: entries[opt_idx],
        min_var: best_by(entries, |a, b| a.risk.total_cmp(&b.risk)),
        min_emi: best_by(entries, |a, b| a.carbon.total_cmp(&b.carbon)),
        max_ret: best_by(entries, |a, b| b.ret.total_cmp(&a.ret)),
    })
}
