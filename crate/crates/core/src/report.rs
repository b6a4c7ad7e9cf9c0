//! Plain-text representative tables and scatter data for plotting.
//!
//! Tables follow the usual composition layout: one block per green profile,
//! four rows per risk profile (opt, min var, min emi, max ret), weights in
//! percent with one decimal and objectives with three.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::export::{FrontEntry, FrontExport};
use crate::preferences::{
    filter_region, reference_vectors, representatives, GreenLabel, PreferenceFilter, ProfileConfig,
    ReferenceVectors, Representatives, RiskLabel,
};

/// Message shown for a profile whose region is empty.
pub const EMPTY_REGION_NOTE: &str = "aspirations infeasible on this front";

/// Outcome of one (green, risk) profile.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileResult<'a> {
    Region {
        filter: PreferenceFilter,
        ids: Vec<usize>,
        reps: Representatives<'a>,
    },
    Empty {
        filter: PreferenceFilter,
    },
}

impl ProfileResult<'_> {
    pub fn filter(&self) -> PreferenceFilter {
        match self {
            ProfileResult::Region { filter, .. } | ProfileResult::Empty { filter } => *filter,
        }
    }
}

/// Region and representatives of one profile pair on `front`.
pub fn evaluate_profile<'a>(
    front: &'a FrontExport,
    refs: &ReferenceVectors,
    green: GreenLabel,
    risk: RiskLabel,
) -> Result<ProfileResult<'a>> {
    let filter = refs.filter(green, risk);
    let region = filter_region(&front.entries, filter);
    match representatives(&region) {
        Ok(reps) => Ok(ProfileResult::Region {
            filter,
            ids: region.ids(),
            reps,
        }),
        Err(Error::EmptyRegion) => Ok(ProfileResult::Empty { filter }),
        Err(e) => Err(e),
    }
}

/// Rendered report plus the profiles that produced an empty region.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub text: String,
    pub empty: Vec<(GreenLabel, RiskLabel)>,
}

fn green_title(g: GreenLabel) -> &'static str {
    match g {
        GreenLabel::Weak => "Weak",
        GreenLabel::Moderate => "Moderate",
        GreenLabel::Strong => "Strong",
    }
}

fn risk_title(r: RiskLabel) -> &'static str {
    match r {
        RiskLabel::Conservative => "Conservative",
        RiskLabel::Cautious => "Cautious",
        RiskLabel::Aggressive => "Aggressive",
    }
}

fn pct(w: f64) -> String {
    format!("{:.1}", 100.0 * w)
}

fn obj(v: f64) -> String {
    format!("{v:.3}")
}

/// Renders the tables for `selection`, grouped by green profile in the order
/// given.
pub fn render(front: &FrontExport, profiles: &ProfileConfig, selection: &[(GreenLabel, RiskLabel)]) -> Result<Report> {
    profiles.validate()?;
    let refs = reference_vectors(&front.entries, profiles.green_percentiles(), profiles.risk_percentiles())?;
    let mut greens: Vec<GreenLabel> = Vec::new();
    for (g, _) in selection {
        if !greens.contains(g) {
            greens.push(*g);
        }
    }

    let mut text = String::new();
    let mut empty = Vec::new();
    for (block, &g) in greens.iter().enumerate() {
        let risks: Vec<RiskLabel> = selection.iter().filter(|(sg, _)| *sg == g).map(|(_, r)| *r).collect();
        let mut results = Vec::new();
        for &r in &risks {
            let res = evaluate_profile(front, &refs, g, r)?;
            if matches!(res, ProfileResult::Empty { .. }) {
                empty.push((g, r));
            }
            results.push((r, res));
        }
        let printed: Vec<&FrontEntry> = results
            .iter()
            .flat_map(|(_, res)| match res {
                ProfileResult::Region { reps, .. } => reps.rows().map(|(_, e)| e).to_vec(),
                ProfileResult::Empty { .. } => Vec::new(),
            })
            .collect();
        let columns: Vec<usize> = (0..front.asset_ids.len())
            .filter(|&j| printed.iter().any(|e| pct(e.weights[j]) != "0.0"))
            .collect();

        if block > 0 {
            text.push('\n');
        }
        writeln!(
            text,
            "{} green investor (carbon <= {}, percentile {})",
            green_title(g),
            obj(refs.p_g[g as usize]),
            profiles.green(g)
        )
        .expect("write to string");

        let label_w = "Risk profile".len().max(risks.iter().map(|r| risk_title(*r).len()).max().unwrap_or(0));
        let widths: Vec<usize> = columns.iter().map(|&j| front.asset_ids[j].len().max(5)).collect();
        let obj_w = printed
            .iter()
            .flat_map(|e| [obj(e.risk).len(), obj(e.ret).len(), obj(e.carbon).len()])
            .max()
            .unwrap_or(0)
            .max(6);

        let mut header = format!("{:<label_w$}", "Risk profile");
        for (&j, w) in columns.iter().zip(&widths) {
            write!(header, "  {:>w$}", front.asset_ids[j]).expect("write to string");
        }
        for name in ["Risk", "Ret.", "Emiss"] {
            write!(header, "  {name:>obj_w$}").expect("write to string");
        }
        writeln!(text, "{}", header.trim_end()).expect("write to string");

        for (r, res) in &results {
            match res {
                ProfileResult::Empty { filter } => {
                    writeln!(
                        text,
                        "{:<label_w$}  risk <= {}: {EMPTY_REGION_NOTE}",
                        risk_title(*r),
                        obj(filter.p_r)
                    )
                    .expect("write to string");
                }
                ProfileResult::Region { reps, .. } => {
                    for (k, (name, e)) in reps.rows().iter().enumerate() {
                        let label = if k == 0 { risk_title(*r) } else { "" };
                        let mut line = format!("{label:<label_w$}");
                        for (&j, w) in columns.iter().zip(&widths) {
                            write!(line, "  {:>w$}", pct(e.weights[j])).expect("write to string");
                        }
                        for v in [e.risk, e.ret, e.carbon] {
                            write!(line, "  {:>obj_w$}", obj(v)).expect("write to string");
                        }
                        write!(line, "  {name}").expect("write to string");
                        writeln!(text, "{line}").expect("write to string");
                    }
                }
            }
        }
        let thresholds: Vec<String> = risks
            .iter()
            .map(|r| format!("{} <= {}", r.as_str(), obj(refs.p_r[*r as usize])))
            .collect();
        writeln!(text, "Risk thresholds: {}", thresholds.join(", ")).expect("write to string");
    }
    Ok(Report { text, empty })
}

/// CSV with one row per front entry: objectives, region membership and the
/// representative roles the entry plays (`;`-separated).
pub fn scatter_csv(front: &FrontExport, result: &ProfileResult<'_>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidFront(format!("writing scatter data: {e}"));
    w.write_record(["id", "risk", "ret", "carbon", "in_region", "representative"])
        .map_err(csv_err)?;
    let (ids, reps) = match result {
        ProfileResult::Region { ids, reps, .. } => (ids.as_slice(), Some(reps)),
        ProfileResult::Empty { .. } => (&[][..], None),
    };
    for e in &front.entries {
        let roles: Vec<&str> = reps
            .map(|r| {
                r.rows()
                    .iter()
                    .filter(|(_, x)| x.id == e.id)
                    .map(|(n, _)| *n)
                    .collect()
            })
            .unwrap_or_default();
        w.write_record([
            e.id.to_string(),
            e.risk.to_string(),
            e.ret.to_string(),
            e.carbon.to_string(),
            ids.binary_search(&e.id).is_ok().to_string(),
            roles.join(";"),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidFront(format!("writing scatter data: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
