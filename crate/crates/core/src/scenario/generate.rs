//! Pose-stream generation for the four warehouse layouts.
//!
//! Lanes: pallets start outside the loading area and are driven in along +y,
//! one lane each, with staggered starts. Blocks: pallets start pre-stacked
//! in a grid and are pulled out along −y one at a time, front row first, then
//! leave the stream. Loaded pallets carry three 2×2 layers of small load
//! carriers that move with them. Everything else waits in a static side row.

use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ScenarioError, ScenarioKind, ScenarioSpec, Stage, CARRIERS_PER_LAYER, LOAD_LAYERS};
use crate::annotate::{EntityCatalog, EntityClass, EntityModel};
use crate::geometry::EulerXyz;
use crate::sync::{simulate_capture, CaptureRun, PoseSample, POSE_RATE_HZ};

/// Cruise speed in mm/s.
pub const MAX_SPEED: f64 = 800.0;
/// Ramp acceleration in mm/s².
pub const ACCEL: f64 = 400.0;

const LANE_ENTRY_Y: f64 = -6000.0;
const LANE_START: f64 = 0.5;
const LANE_STAGGER: f64 = 2.0;
const BLOCK_EXIT_Y: f64 = -12000.0;
const BLOCK_START: f64 = 1.0;
const BLOCK_STAGGER: f64 = 3.0;
const SIDE_ROW_Y: f64 = 4500.0;
const SIDE_ROW_X: f64 = -4000.0;
const SIDE_ROW_GAP: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    MoveStart,
    MoveEnd,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEvent {
    pub time: f64,
    pub entity_name: String,
    pub kind: EventKind,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub catalog: EntityCatalog,
    /// Tick-major, entity name within a tick.
    pub poses: Vec<PoseSample>,
    /// Events up to the scenario duration, by time then entity.
    pub events: Vec<ScenarioEvent>,
}

impl Scenario {
    pub fn tick_count(&self) -> u64 {
        tick_count(self.spec.duration)
    }

    pub fn removed(&self) -> impl Iterator<Item = &ScenarioEvent> {
        self.events.iter().filter(|e| e.kind == EventKind::Removed)
    }
}

fn tick_count(duration: f64) -> u64 {
    (duration * POSE_RATE_HZ).ceil() as u64 + 1
}

/// Pallets, optional carrier load, and one of each remaining class.
pub fn default_roster(kind: ScenarioKind, stage: Stage) -> Vec<EntityModel> {
    let n = kind.pallet_count();
    let named =
        |class: EntityClass, i: usize| EntityModel::with_default_box(class, format!("{}_{i}", class.name_prefix()));
    let mut out: Vec<EntityModel> = (1..=n).map(|i| named(EntityClass::Pallet, i)).collect();
    if stage == Stage::LoadedPallets {
        out.extend((1..=n * CARRIERS_PER_LAYER * LOAD_LAYERS).map(|i| named(EntityClass::SmallLoadCarrier, i)));
    }
    for class in [EntityClass::MeshBox, EntityClass::CardboardBox, EntityClass::Barrel, EntityClass::Forklift] {
        out.push(named(class, 1));
    }
    out
}

/// Straight-line move with a trapezoidal speed profile.
#[derive(Debug, Clone, Copy)]
struct Move {
    start: f64,
    delta: Vector3<f64>,
}

impl Move {
    fn length(&self) -> f64 {
        self.delta.norm()
    }

    fn duration(&self) -> f64 {
        let d = self.length();
        if d >= MAX_SPEED * MAX_SPEED / ACCEL {
            d / MAX_SPEED + MAX_SPEED / ACCEL
        } else {
            2.0 * (d / ACCEL).sqrt()
        }
    }

    fn end(&self) -> f64 {
        self.start + self.duration()
    }

    /// Distance covered `t` seconds after the start.
    fn travelled(&self, t: f64) -> f64 {
        let d = self.length();
        let total = self.duration();
        if t <= 0.0 {
            return 0.0;
        }
        if t >= total {
            return d;
        }
        let ramp = (MAX_SPEED / ACCEL).min(total / 2.0);
        if t < ramp {
            0.5 * ACCEL * t * t
        } else if t <= total - ramp {
            0.5 * ACCEL * ramp * ramp + ACCEL * ramp * (t - ramp)
        } else {
            let r = total - t;
            d - 0.5 * ACCEL * r * r
        }
    }

    fn offset(&self, t: f64) -> Vector3<f64> {
        let d = self.length();
        if d == 0.0 {
            return Vector3::zeros();
        }
        self.delta * (self.travelled(t - self.start) / d)
    }
}

#[derive(Debug, Clone)]
struct Plan {
    name: String,
    base: Vector3<f64>,
    moves: Vec<Move>,
    removed_at: Option<f64>,
}

impl Plan {
    fn still(name: &str, base: Vector3<f64>) -> Self {
        Self { name: name.to_string(), base, moves: Vec::new(), removed_at: None }
    }

    fn position(&self, t: f64) -> Vector3<f64> {
        self.moves.iter().fold(self.base, |p, m| p + m.offset(t))
    }
}

/// Min and max model-frame vertex coordinates.
fn bounds(model: &EntityModel) -> (Vector3<f64>, Vector3<f64>) {
    let v = model.vertices();
    let lo = v.iter().fold(Vector3::repeat(f64::INFINITY), |a, b| a.inf(b));
    let hi = v.iter().fold(Vector3::repeat(f64::NEG_INFINITY), |a, b| a.sup(b));
    (lo, hi)
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario, ScenarioError> {
    spec.validate()?;
    let roster = spec.effective_roster();
    let catalog = EntityCatalog::new(roster.iter().cloned())?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let pallets: Vec<&EntityModel> = roster.iter().filter(|m| m.class == EntityClass::Pallet).collect();
    let mut carriers: Vec<&EntityModel> = Vec::new();
    if spec.stage == Stage::LoadedPallets {
        carriers = roster
            .iter()
            .filter(|m| m.class == EntityClass::SmallLoadCarrier)
            .take(pallets.len() * CARRIERS_PER_LAYER * LOAD_LAYERS)
            .collect();
    }
    let loaded: Vec<&str> = carriers.iter().map(|m| m.name.as_str()).collect();
    let others: Vec<&EntityModel> =
        roster.iter().filter(|m| m.class != EntityClass::Pallet && !loaded.contains(&m.name.as_str())).collect();

    let pitch = pallets.iter().fold(Vector3::zeros(), |acc: Vector3<f64>, m| {
        let (lo, hi) = bounds(m);
        acc.sup(&(hi - lo))
    });
    let floor = |m: &EntityModel| -bounds(m).0.z;

    let mut plans: Vec<Plan> = Vec::new();
    let mut pallet_plans: Vec<Plan> = Vec::new();
    match spec.kind {
        ScenarioKind::LanesBroad | ScenarioKind::LanesNarrow => {
            let gap = if spec.kind == ScenarioKind::LanesBroad {
                spec.layout.lane_gap_broad
            } else {
                spec.layout.lane_gap_narrow
            };
            let n = pallets.len();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for (i, m) in pallets.iter().enumerate() {
                let x = (i as f64 - (n as f64 - 1.0) / 2.0) * (pitch.x + gap);
                let rank = order.iter().position(|o| *o == i).expect("permutation");
                let mut plan = Plan::still(&m.name, Vector3::new(x, LANE_ENTRY_Y, floor(m)));
                plan.moves.push(Move {
                    start: LANE_START + rank as f64 * LANE_STAGGER,
                    delta: Vector3::new(0.0, -LANE_ENTRY_Y, 0.0),
                });
                pallet_plans.push(plan);
            }
        }
        ScenarioKind::Block2x2 | ScenarioKind::Block3x3 => {
            let side = if spec.kind == ScenarioKind::Block2x2 { 2 } else { 3 };
            let gap = spec.layout.block_gap;
            let mut removal = Vec::new();
            for row in 0..side {
                let mut cols: Vec<usize> = (0..side).collect();
                cols.shuffle(&mut rng);
                removal.extend(cols.into_iter().map(|c| row * side + c));
            }
            let centre = (side as f64 - 1.0) / 2.0;
            for (i, m) in pallets.iter().enumerate() {
                let (row, col) = (i / side, i % side);
                let x = (col as f64 - centre) * (pitch.x + gap);
                let y = (row as f64 - centre) * (pitch.y + gap);
                let rank = removal.iter().position(|r| *r == i).expect("permutation");
                let mut plan = Plan::still(&m.name, Vector3::new(x, y, floor(m)));
                let mv = Move {
                    start: BLOCK_START + rank as f64 * BLOCK_STAGGER,
                    delta: Vector3::new(0.0, BLOCK_EXIT_Y - y, 0.0),
                };
                plan.removed_at = Some(mv.end());
                plan.moves.push(mv);
                pallet_plans.push(plan);
            }
        }
    }

    for (j, c) in carriers.iter().enumerate() {
        let (pallet, pallet_model) =
            (&pallet_plans[j / (CARRIERS_PER_LAYER * LOAD_LAYERS)], pallets[j / (CARRIERS_PER_LAYER * LOAD_LAYERS)]);
        let k = j % (CARRIERS_PER_LAYER * LOAD_LAYERS);
        let (layer, cell) = (k / CARRIERS_PER_LAYER, k % CARRIERS_PER_LAYER);
        let (lo, hi) = bounds(c);
        let span = hi - lo;
        let (_, phi) = bounds(pallet_model);
        let top = pallet.base.z + phi.z;
        let sx = if cell % 2 == 0 { -0.5 } else { 0.5 };
        let sy = if cell / 2 == 0 { -0.5 } else { 0.5 };
        let base =
            Vector3::new(pallet.base.x + sx * span.x, pallet.base.y + sy * span.y, top + layer as f64 * span.z - lo.z);
        plans.push(Plan { name: c.name.clone(), base, moves: pallet.moves.clone(), removed_at: pallet.removed_at });
    }

    let mut x = SIDE_ROW_X;
    for m in others {
        let (lo, hi) = bounds(m);
        x -= lo.x;
        plans.push(Plan::still(&m.name, Vector3::new(x, SIDE_ROW_Y - (lo.y + hi.y) / 2.0, -lo.z)));
        x += hi.x + SIDE_ROW_GAP;
    }

    let mut events = Vec::new();
    for p in &pallet_plans {
        for m in &p.moves {
            events.push(ScenarioEvent { time: m.start, entity_name: p.name.clone(), kind: EventKind::MoveStart });
            events.push(ScenarioEvent { time: m.end(), entity_name: p.name.clone(), kind: EventKind::MoveEnd });
        }
    }
    plans.extend(pallet_plans);
    for p in &plans {
        if let Some(t) = p.removed_at {
            events.push(ScenarioEvent { time: t, entity_name: p.name.clone(), kind: EventKind::Removed });
        }
    }
    events.retain(|e| e.time <= spec.duration);
    events.sort_by(|a, b| {
        a.time.total_cmp(&b.time).then_with(|| a.entity_name.cmp(&b.entity_name)).then(a.kind.cmp(&b.kind))
    });

    plans.sort_by(|a, b| a.name.cmp(&b.name));
    let ticks = tick_count(spec.duration);
    let mut poses = Vec::with_capacity(ticks as usize * plans.len());
    for k in 0..ticks {
        let t = k as f64 / POSE_RATE_HZ;
        for p in &plans {
            if p.removed_at.is_some_and(|r| t > r) {
                continue;
            }
            let pos = p.position(t);
            poses.push(PoseSample {
                timestamp: t,
                entity_name: p.name.clone(),
                position: [pos.x, pos.y, pos.z],
                orientation: EulerXyz::ZERO,
                valid: true,
            });
        }
    }
    Ok(Scenario { spec: spec.clone(), catalog, poses, events })
}

/// Trigger-locked image capture over the scenario's duration.
pub fn simulate_images(spec: &ScenarioSpec) -> Result<CaptureRun, ScenarioError> {
    Ok(simulate_capture(&spec.effective_capture(), spec.duration, spec.seed)?)
}
