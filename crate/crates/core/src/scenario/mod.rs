//! Synthetic warehouse scenarios with analytic ground truth, and controlled
//! corruption of ground-truth tracks for metric checks.

mod corrupt;
mod generate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{EntityClass, EntityModel, ModelError};
use crate::sync::{CameraLatency, SyncError};

pub use corrupt::{corrupt_tracks, CorruptionLedger, CorruptionSpec};
pub use generate::{
    default_roster, generate_scenario, simulate_images, EventKind, Scenario, ScenarioEvent, ACCEL, MAX_SPEED,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sync(#[from] SyncError),
    #[error("scenario spec is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    LanesBroad,
    LanesNarrow,
    #[serde(rename = "block_2x2")]
    Block2x2,
    #[serde(rename = "block_3x3")]
    Block3x3,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [Self::LanesBroad, Self::LanesNarrow, Self::Block2x2, Self::Block3x3];

    pub fn pallet_count(&self) -> usize {
        match self {
            Self::LanesBroad | Self::LanesNarrow | Self::Block2x2 => 4,
            Self::Block3x3 => 9,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LanesBroad => "lanes_broad",
            Self::LanesNarrow => "lanes_narrow",
            Self::Block2x2 => "block_2x2",
            Self::Block3x3 => "block_3x3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    EmptyPallets,
    LoadedPallets,
}

/// Spacing parameters in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Layout {
    pub lane_gap_broad: f64,
    pub lane_gap_narrow: f64,
    pub block_gap: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Self { lane_gap_broad: 2000.0, lane_gap_narrow: 200.0, block_gap: 50.0 }
    }
}

/// Small load carriers per pallet layer and layers per loaded pallet.
pub const CARRIERS_PER_LAYER: usize = 4;
pub const LOAD_LAYERS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub stage: Stage,
    /// Entity models; empty means [`default_roster`].
    #[serde(default)]
    pub roster: Vec<EntityModel>,
    /// Seconds.
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub layout: Layout,
    /// Per-camera capture latencies; empty means six cameras at a 50 ms cycle.
    #[serde(default)]
    pub capture: Vec<CameraLatency>,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, stage: Stage, duration: f64, seed: u64) -> Self {
        Self { kind, stage, roster: Vec::new(), duration, seed, layout: Layout::default(), capture: Vec::new() }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes") + "\n"
    }

    /// The roster actually used: the explicit one, or the default.
    pub fn effective_roster(&self) -> Vec<EntityModel> {
        if self.roster.is_empty() {
            default_roster(self.kind, self.stage)
        } else {
            self.roster.clone()
        }
    }

    pub fn effective_capture(&self) -> Vec<CameraLatency> {
        if self.capture.is_empty() {
            (1..=6).map(|id| CameraLatency::constant(id, 0.030, 0.020)).collect()
        } else {
            self.capture.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        if self.kind == ScenarioKind::Block3x3 && self.stage != Stage::LoadedPallets {
            return bad("block_3x3 is only defined for loaded_pallets".into());
        }
        if !self.duration.is_finite() || !(0.0..=3600.0).contains(&self.duration) {
            return bad(format!("duration {} s outside [0, 3600]", self.duration));
        }
        let l = &self.layout;
        if [l.lane_gap_broad, l.lane_gap_narrow, l.block_gap].iter().any(|g| !g.is_finite() || *g < 0.0) {
            return bad("layout gaps must be finite and non-negative".into());
        }
        let roster = self.effective_roster();
        crate::annotate::EntityCatalog::new(roster.iter().cloned())?;
        let count = |c: EntityClass| roster.iter().filter(|m| m.class == c).count();
        let pallets = count(EntityClass::Pallet);
        if pallets != self.kind.pallet_count() {
            return bad(format!(
                "{} needs {} pallets, roster has {pallets}",
                self.kind.as_str(),
                self.kind.pallet_count()
            ));
        }
        let needed = pallets * CARRIERS_PER_LAYER * LOAD_LAYERS;
        if self.stage == Stage::LoadedPallets && count(EntityClass::SmallLoadCarrier) < needed {
            return bad(format!("loaded pallets need {needed} small load carriers"));
        }
        Ok(())
    }
}
