use std::path::{Path, PathBuf};

use serde::Deserialize;
use trackforge_core::dataset::{
    annotations_to_tracks, build_annotations, compute_stats, export_mot, import_tracker_results, read_annotations,
    write_annotations, AnnotationFile, AnnotationFormat, IdMap, StatsConfig,
};
use trackforge_core::metrics::{evaluate, format_table, EvalConfig, MetricReport};
use trackforge_core::scenario::{generate_scenario, simulate_images, ScenarioSpec};
use trackforge_core::sync::{
    read_image_log, read_matched, read_pose_stream, synchronize, write_image_log, write_matched, write_pose_stream,
    ImageEvent, StreamFormat, POSE_RATE_HZ,
};
use trackforge_core::{CameraRig, EntityCatalog, PoseFrame};

use crate::failure::{self, CmdResult, Failure, Kind, OrFail};
use crate::io::{emit, read, write_atomic};
use crate::{Cli, Command, Format};

/// Settings shared across commands; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub rig: Option<PathBuf>,
    pub models: Option<PathBuf>,
    pub iou_threshold: Option<f64>,
    /// Sync cutoff in seconds.
    pub max_dt: Option<f64>,
    pub pose_frame: Option<PoseFrame>,
    pub seconds_per_instance: Option<f64>,
}

impl RunConfig {
    fn load(path: Option<&Path>) -> CmdResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        serde_json::from_str(&read(path)?).or_fail(Kind::Parse, format!("reading config {}", path.display()))
    }
}

/// Default sync cutoff: one pose period.
const DEFAULT_MAX_DT: f64 = 1.0 / POSE_RATE_HZ;

pub fn run(cli: &Cli) -> CmdResult<()> {
    let config = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Simulate { spec, out } => simulate(cli, spec, out),
        Command::Sync { poses, images, out, max_dt } => sync(poses, images, out, max_dt.or(config.max_dt)),
        Command::Annotate { rig, models, matched, out, pose_frame } => {
            let rig = rig.as_ref().or(config.rig.as_ref()).ok_or_else(|| missing("--rig"))?;
            let models = models.as_ref().or(config.models.as_ref()).ok_or_else(|| missing("--models"))?;
            let frame = pose_frame.or(config.pose_frame).unwrap_or_default();
            annotate(cli.format, rig, models, matched, out, frame)
        }
        Command::Stats { annotations, models, out } => {
            let models = models.as_ref().or(config.models.as_ref());
            stats(cli.format, annotations, models, out.as_deref(), config.seconds_per_instance)
        }
        Command::ExportMot { annotations, out, id_map } => export(annotations, out, id_map.as_deref()),
        Command::Evaluate { gt, results, out, iou, name } => {
            let iou = iou.or(config.iou_threshold).unwrap_or(EvalConfig::default().iou_threshold);
            score(cli.format, gt, results, out.as_deref(), iou, name.as_deref())
        }
    }
}

fn missing(flag: &str) -> Failure {
    Failure::msg(Kind::Validation, format!("{flag} is required (or set it in --config)"))
}

fn simulate(cli: &Cli, spec_path: &Path, out: &Path) -> CmdResult<()> {
    let mut spec = ScenarioSpec::from_json(&read(spec_path)?)
        .map_err(|e| failure::scenario(e).context(format!("reading spec {}", spec_path.display())))?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    let scenario = generate_scenario(&spec).map_err(failure::scenario)?;
    let capture = simulate_images(&spec).map_err(failure::scenario)?;
    let mut images: Vec<ImageEvent> = capture.streams.iter().flatten().cloned().collect();
    images.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp).then(a.camera_id.cmp(&b.camera_id)));

    let (format, ext) = match cli.format {
        Some(Format::Json) => (StreamFormat::Jsonl, "jsonl"),
        _ => (StreamFormat::Csv, "csv"),
    };
    write_atomic(&out.join(format!("poses.{ext}")), &write_pose_stream(&scenario.poses, format))?;
    write_atomic(&out.join("images.csv"), &write_image_log(&images))?;
    write_atomic(&out.join("models.json"), &scenario.catalog.to_json())?;
    write_atomic(&out.join("rig.json"), &CameraRig::default_six().to_json())?;
    write_atomic(&out.join("spec.json"), &spec.to_json())?;
    let events = serde_json::json!({
        "schema": trackforge_core::SCHEMA_VERSION,
        "kind": spec.kind,
        "stage": spec.stage,
        "seed": spec.seed,
        "duration": spec.duration,
        "entities": scenario.catalog.len(),
        "pose_samples": scenario.poses.len(),
        "images_per_camera": capture.streams.first().map_or(0, Vec::len),
        "events": scenario.events,
    });
    write_atomic(&out.join("events.json"), &(serde_json::to_string_pretty(&events).expect("events serialize") + "\n"))?;
    log::info!("{} pose samples, {} images", scenario.poses.len(), images.len());
    Ok(())
}

fn sync(poses: &Path, images: &Path, out: &Path, max_dt: Option<f64>) -> CmdResult<()> {
    let max_dt = max_dt.unwrap_or(DEFAULT_MAX_DT);
    if !(max_dt.is_finite() && max_dt > 0.0) {
        return Err(Failure::msg(Kind::Validation, format!("sync cutoff must be positive, got {max_dt}")));
    }
    let samples = read_pose_stream(&read(poses)?, StreamFormat::from_path(poses))
        .or_fail(Kind::Parse, format!("reading poses {}", poses.display()))?;
    let events = read_image_log(&read(images)?).or_fail(Kind::Parse, format!("reading images {}", images.display()))?;
    let matched = synchronize(&events, &samples, Some(max_dt));
    log::info!("{} matched pairs from {} images", matched.len(), events.len());
    write_atomic(out, &write_matched(&matched))
}

fn annotate(
    format: Option<Format>,
    rig_path: &Path,
    models: &Path,
    matched: &Path,
    out: &Path,
    frame: PoseFrame,
) -> CmdResult<()> {
    let rig = CameraRig::from_json(&read(rig_path)?).map_err(|e| failure::camera(e, rig_path))?;
    let catalog = EntityCatalog::from_json(&read(models)?).map_err(|e| failure::model(e, models))?;
    let pairs = read_matched(&read(matched)?).or_fail(Kind::Parse, format!("reading matched {}", matched.display()))?;
    let rig_name =
        rig_path.file_name().map_or_else(|| rig_path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let files = build_annotations(&rig, &catalog, &pairs, &rig_name, frame).or_fail(Kind::Validation, "annotating")?;
    let fmt = if format == Some(Format::Csv) { AnnotationFormat::Csv } else { AnnotationFormat::Jsonl };
    for f in &files {
        let path = out.join(format!("camera_{}.{}", f.header.camera_id, fmt.extension()));
        write_atomic(&path, &write_annotations(f, fmt))?;
    }
    Ok(())
}

fn load_annotations(path: &Path) -> CmdResult<AnnotationFile> {
    read_annotations(&read(path)?, AnnotationFormat::from_path(path))
        .or_fail(Kind::Parse, format!("reading annotations {}", path.display()))
}

fn stats(
    format: Option<Format>,
    paths: &[PathBuf],
    models: Option<&PathBuf>,
    out: Option<&Path>,
    seconds_per_instance: Option<f64>,
) -> CmdResult<()> {
    let files = paths.iter().map(|p| load_annotations(p)).collect::<CmdResult<Vec<_>>>()?;
    let catalog = match models {
        Some(m) => EntityCatalog::from_json(&read(m)?).map_err(|e| failure::model(e, m))?,
        None => EntityCatalog::default(),
    };
    let mut config = StatsConfig::default();
    if let Some(s) = seconds_per_instance {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Failure::msg(Kind::Validation, format!("seconds_per_instance must be non-negative, got {s}")));
        }
        config.seconds_per_instance = s;
    }
    let stats = compute_stats(&files, &catalog, &config);
    let text = match format.unwrap_or(Format::Text) {
        Format::Text => stats.to_table(),
        Format::Json => serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n",
        Format::Csv => {
            let mut s = String::from("camera_id,instances,frames,annotation_time_min\n");
            for c in &stats.per_camera {
                s.push_str(&format!("{},{},{},{}\n", c.camera_id, c.instances, c.frames, c.annotation_time_min));
            }
            s
        }
    };
    emit(out, &text)
}

fn export(annotations: &Path, out: &Path, id_map: Option<&Path>) -> CmdResult<()> {
    let file = load_annotations(annotations)?;
    let mut ids = match id_map {
        Some(p) if p.exists() => {
            IdMap::from_json(&read(p)?).or_fail(Kind::Parse, format!("reading id map {}", p.display()))?
        }
        _ => IdMap::new(),
    };
    let tracks = annotations_to_tracks(&file, &mut ids)
        .or_fail(Kind::Validation, format!("converting {}", annotations.display()))?;
    write_atomic(out, &export_mot(&tracks))?;
    if let Some(p) = id_map {
        write_atomic(p, &ids.to_json())?;
    }
    Ok(())
}

fn score(
    format: Option<Format>,
    gt: &Path,
    results: &Path,
    out: Option<&Path>,
    iou: f64,
    name: Option<&str>,
) -> CmdResult<()> {
    let load = |p: &Path| import_tracker_results(&read(p)?).or_fail(Kind::Parse, format!("reading {}", p.display()));
    let (gt_seq, pred_seq) = (load(gt)?, load(results)?);
    let report = evaluate(&gt_seq, &pred_seq, &EvalConfig { iou_threshold: iou }).map_err(failure::metric)?;
    let label = name
        .map(str::to_string)
        .or_else(|| results.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "results".into());
    emit(out, &render_report(format.unwrap_or(Format::Json), &label, &report))
}

fn render_report(format: Format, label: &str, r: &MetricReport) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
        Format::Text => format_table(&[(label, r)]),
        Format::Csv => format!(
            "method,mota,idf1,hota,ids,ap50,ap75,ap,ar,f1\n{label},{},{},{},{},{},{},{},{},{}\n",
            r.mota,
            r.idf1,
            r.hota,
            r.id_switches,
            r.detection.ap50,
            r.detection.ap75,
            r.detection.ap,
            r.detection.ar,
            r.detection.f1
        ),
    }
}
