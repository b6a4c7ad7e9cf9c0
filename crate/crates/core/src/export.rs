//! Canonical JSON file for a computed front.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::archive::{BoxIndex, EpsArchive, Grid, MinimizedObjectives};
use crate::engine::{Checkpoint, EvMogaConfig, RunResult};
use crate::error::{Error, Result};
use crate::market_data::AssetUniverse;
use crate::portfolio::{Bounds, ObjectiveVector, Portfolio};

pub const SCHEMA_VERSION: &str = "1";

/// One front member. `id` is the position in the export's entry list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontEntry {
    pub id: usize,
    pub weights: Vec<f64>,
    pub risk: f64,
    pub ret: f64,
    pub carbon: f64,
    #[serde(rename = "box")]
    pub box_index: BoxIndex,
}

impl FrontEntry {
    pub fn objectives(&self) -> ObjectiveVector {
        ObjectiveVector {
            risk: self.risk,
            ret: self.ret,
            carbon: self.carbon,
        }
    }

    pub fn minimized(&self) -> MinimizedObjectives {
        MinimizedObjectives::from(self.objectives())
    }
}

/// Ids of the entries holding the minimum risk, maximum return and minimum
/// carbon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorIds {
    pub risk: usize,
    pub ret: usize,
    pub carbon: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub config: EvMogaConfig,
    pub bounds: Bounds,
    pub evaluations: u64,
    pub iterations: u64,
    pub wall_time_secs: f64,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontExport {
    pub schema_version: String,
    /// Digest of the instance the front was computed on.
    pub instance_ref: String,
    pub asset_ids: Vec<String>,
    pub grid: Grid,
    pub entries: Vec<FrontEntry>,
    pub anchors: AnchorIds,
    pub run: RunMetadata,
}

impl FrontExport {
    /// Snapshot of an archive. Entries are ordered by box index and numbered
    /// from zero, so equal archives give equal exports.
    pub fn from_archive(
        universe: &AssetUniverse,
        archive: &EpsArchive,
        run: RunMetadata,
    ) -> Result<Self> {
        let grid = archive.grid().ok_or(Error::EmptyArchive)?.clone();
        let anchors = archive.anchors().ok_or(Error::EmptyArchive)?;
        let mut order: Vec<_> = archive.entries().iter().collect();
        order.sort_by_key(|e| e.box_index());
        let position = |box_index: BoxIndex| {
            order
                .binary_search_by_key(&box_index, |e| e.box_index())
                .expect("anchor is an entry")
        };
        let entries = order
            .iter()
            .enumerate()
            .map(|(id, e)| {
                let o = e.objectives();
                FrontEntry {
                    id,
                    weights: e.portfolio().weights().to_vec(),
                    risk: o.risk,
                    ret: o.ret,
                    carbon: o.carbon,
                    box_index: e.box_index(),
                }
            })
            .collect();
        Ok(FrontExport {
            schema_version: SCHEMA_VERSION.to_string(),
            instance_ref: universe.digest(),
            asset_ids: universe.asset_ids().to_vec(),
            grid,
            entries,
            anchors: AnchorIds {
                risk: position(anchors[0].box_index()),
                ret: position(anchors[1].box_index()),
                carbon: position(anchors[2].box_index()),
            },
            run,
        })
    }

    /// Export of a finished run.
    pub fn from_run(
        universe: &AssetUniverse,
        bounds: &Bounds,
        cfg: &EvMogaConfig,
        result: &RunResult,
    ) -> Result<Self> {
        let run = RunMetadata {
            seed: cfg.seed,
            config: cfg.clone(),
            bounds: bounds.clone(),
            evaluations: result.evaluations,
            iterations: result.iterations_done,
            wall_time_secs: result.wall_time_secs,
            checkpoints: result.checkpoints.clone(),
        };
        FrontExport::from_archive(universe, &result.archive, run)
    }

    /// Checks the structural invariants of a loaded export.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFront(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version '{}' (expected '{SCHEMA_VERSION}')",
                self.schema_version
            ));
        }
        if self.entries.is_empty() {
            return bad("no entries".into());
        }
        let n = self.asset_ids.len();
        if self.run.bounds.len() != n {
            return bad(format!("bounds cover {} assets, front has {n}", self.run.bounds.len()));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if e.id != i {
                return bad(format!("entry at position {i} has id {}", e.id));
            }
            if e.weights.len() != n {
                return bad(format!("entry {i} has {} weights for {n} assets", e.weights.len()));
            }
            Portfolio::new(e.weights.clone(), &self.run.bounds)
                .map_err(|err| Error::InvalidFront(format!("entry {i}: {err}")))?;
            if !e.objectives().is_finite() {
                return bad(format!("entry {i} has non-finite objectives"));
            }
            if self.grid.box_index(&e.minimized()) != e.box_index {
                return bad(format!("entry {i} box {:?} disagrees with the grid", e.box_index));
            }
        }
        let m = self.entries.len();
        let AnchorIds { risk, ret, carbon } = self.anchors;
        if risk >= m || ret >= m || carbon >= m {
            return bad("anchor id out of range".into());
        }
        Ok(())
    }

    /// Rebuilds the archive, checking box uniqueness and mutual
    /// non-dominance.
    pub fn to_archive(&self) -> Result<EpsArchive> {
        let items = self
            .entries
            .iter()
            .map(|e| {
                let p = Portfolio::new(e.weights.clone(), &self.run.bounds)?;
                Ok((e.id as u64, p, e.objectives()))
            })
            .collect::<Result<Vec<_>>>()?;
        EpsArchive::from_parts(self.grid.clone(), items)
    }

    /// Fails unless the export was computed on `universe`.
    pub fn check_instance(&self, universe: &AssetUniverse) -> Result<()> {
        let digest = universe.digest();
        if digest != self.instance_ref {
            return Err(Error::InvalidFront(format!(
                "front was computed on {} but the instance is {digest}",
                self.instance_ref
            )));
        }
        Ok(())
    }

    /// The entries section alone, for byte-level comparisons.
    pub fn entries_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.entries)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: FrontExport = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}
