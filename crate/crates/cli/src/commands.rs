use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use drumline::complexity::{song_features, track_features, SongFeatures};
use drumline::eval::{
    evaluate, feature_correlations, mean_std, PerformanceReport, PerformanceScore, StrikeLog,
};
use drumline::midi::smf::parse_smf;
use drumline::midi::{
    collapse_articulations, extract_drum_events, quantize_to_track, CollapseMode,
};
use drumline::planner::{PerformMode, Planner, TipPlan};
use drumline::rhythm::{build_chain, decompose, export_json};
use drumline::sim::{rollout_jsonl, DrumEnv, InitMode};
use drumline::track::{DrumTrack, SCHEMA_VERSION};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{read_input, read_text, song_id, ProjectConfig};
use crate::io::{csv_bytes, write_atomic, write_json};
use crate::{
    AnalyzeArgs, Cli, Command, CorrelateArgs, EnvDemoArgs, IngestArgs, MappingArgs, PerformArgs,
    ScoreArgs, SegmentArgs, UsageError,
};

pub fn run(cli: Cli) -> Result<()> {
    let config = ProjectConfig::load(cli.config.as_deref())?;
    config.validate()?;
    match cli.command {
        Command::Ingest(a) => ingest(&config, a),
        Command::Analyze(a) => analyze(&config, a),
        Command::Segment(a) => segment(&config, a),
        Command::Perform(a) => perform(&config, a),
        Command::Score(a) => score(&config, a),
        Command::Correlate(a) => correlate(&config, a),
        Command::EnvDemo(a) => env_demo(&config, a, cli.seed),
    }
}

fn load_track(path: &Path) -> Result<DrumTrack> {
    DrumTrack::from_json(&read_text(path)?).with_context(|| format!("{}", path.display()))
}

fn track_from_midi(
    config: &ProjectConfig,
    path: &Path,
    args: &MappingArgs,
) -> Result<(drumline::midi::MidiSong, DrumTrack)> {
    let mapping = config.mapping(&args.mappings)?;
    let fps = args.fps.unwrap_or(config.fps);
    if fps == 0 {
        return Err(UsageError("fps must be positive".into()).into());
    }
    let bytes = read_input(path)?;
    let song = parse_smf(&bytes).with_context(|| format!("{}", path.display()))?;
    let mode = if args.remap_articulations {
        CollapseMode::Remap
    } else {
        CollapseMode::Discard
    };
    let events = collapse_articulations(&extract_drum_events(&song), &mapping, mode);
    let track = quantize_to_track(&events, &mapping, fps)?;
    Ok((song, track))
}

fn ingest(config: &ProjectConfig, args: IngestArgs) -> Result<()> {
    let (_, track) = track_from_midi(config, &args.midi, &args.mapping)?;
    if track.hit_count() == 0 {
        eprintln!(
            "warning: {} has no mapped percussion events",
            args.midi.display()
        );
    }
    let out = args
        .out
        .unwrap_or_else(|| config.default_output(&args.midi, "track.json"));
    let mut text = track.to_json();
    DrumTrack::from_json(&text).context("track failed schema validation")?;
    text.push('\n');
    write_atomic(&out, text.as_bytes())?;
    println!(
        "{}: {} hits over {} frames, {:.3} s",
        out.display(),
        track.hit_count(),
        track.n_frames(),
        track.duration_secs()
    );
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FeatureRow {
    song: String,
    bpm: Option<f64>,
    n_drums: usize,
    time_sig_changes: Option<usize>,
    npvi: Option<f64>,
    entropy: Option<f64>,
    polyphony: Option<f64>,
}

impl FeatureRow {
    fn new(song: String, f: SongFeatures) -> FeatureRow {
        FeatureRow {
            song,
            bpm: f.bpm,
            n_drums: f.n_drums,
            time_sig_changes: f.time_sig_changes,
            npvi: f.npvi,
            entropy: f.entropy,
            polyphony: f.polyphony_pct,
        }
    }

    fn features(&self) -> SongFeatures {
        SongFeatures {
            bpm: self.bpm,
            n_drums: self.n_drums,
            time_sig_changes: self.time_sig_changes,
            npvi: self.npvi,
            entropy: self.entropy,
            polyphony_pct: self.polyphony,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FeaturesJson {
    schema_version: u32,
    song: String,
    features: SongFeatures,
}

fn is_input_file(p: &Path) -> bool {
    matches!(
        p.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("json" | "mid" | "midi" | "smf")
    )
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<(Vec<PathBuf>, bool)> {
    let mut files = Vec::new();
    let mut batch = inputs.len() > 1;
    for p in inputs {
        if p.is_dir() {
            batch = true;
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_input_file(p))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok((files, batch))
}

fn analyze(config: &ProjectConfig, args: AnalyzeArgs) -> Result<()> {
    let (files, batch) = expand_inputs(&args.inputs)?;
    if files.is_empty() {
        return Err(UsageError("no track or MIDI files found".into()).into());
    }
    let mut rows = Vec::with_capacity(files.len());
    for path in &files {
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let features = if is_json {
            let track = load_track(path)?;
            track_features(&track, &build_chain(&track, song_id(path)))
        } else {
            let (song, track) = track_from_midi(config, path, &args.mapping)?;
            song_features(&song, &track, &build_chain(&track, song_id(path)))
        };
        rows.push(FeatureRow::new(song_id(path), features));
    }
    if batch {
        if args.json.is_some() {
            return Err(UsageError("--json needs a single input".into()).into());
        }
        let out = args
            .csv
            .unwrap_or_else(|| config.output_dir.join("features.csv"));
        write_atomic(&out, &csv_bytes(&rows)?)?;
        println!("{}: {} songs", out.display(), rows.len());
    } else {
        let row = rows.remove(0);
        let json_out = args
            .json
            .unwrap_or_else(|| config.default_output(&files[0], "features.json"));
        let csv_out = args
            .csv
            .unwrap_or_else(|| config.default_output(&files[0], "features.csv"));
        write_json(
            &json_out,
            &FeaturesJson {
                schema_version: SCHEMA_VERSION,
                song: row.song.clone(),
                features: row.features(),
            },
        )?;
        write_atomic(&csv_out, &csv_bytes(std::slice::from_ref(&row))?)?;
        println!("{}", serde_json::to_string(&row)?);
    }
    Ok(())
}

fn segment(config: &ProjectConfig, args: SegmentArgs) -> Result<()> {
    let track = load_track(&args.track)?;
    let steps = args.steps.unwrap_or(config.segment_steps);
    let chain = build_chain(&track, song_id(&args.track));
    let segments = decompose(&chain, steps).map_err(|e| UsageError(e.to_string()))?;
    let mut text = export_json(&chain, &segments);
    let check: serde_json::Value = serde_json::from_str(&text)?;
    if check.get("schema_version").is_none() {
        bail!("segment export lacks schema_version");
    }
    text.push('\n');
    let out = args
        .out
        .unwrap_or_else(|| config.default_output(&args.track, "segments.json"));
    write_atomic(&out, text.as_bytes())?;
    println!(
        "{}: {} steps in {} segments",
        out.display(),
        chain.len(),
        segments.len()
    );
    Ok(())
}

fn planner(config: &ProjectConfig) -> Result<Planner> {
    Planner::new(
        config.kit_layout()?,
        config.sim.clone(),
        config.planner.clone(),
    )
    .map_err(|e| UsageError(e.to_string()).into())
}

fn perform(config: &ProjectConfig, args: PerformArgs) -> Result<()> {
    let track = load_track(&args.track)?;
    if track.fps() != config.fps {
        return Err(UsageError(format!(
            "track is at {} fps but the configuration runs at {}",
            track.fps(),
            config.fps
        ))
        .into());
    }
    let planner = planner(config)?;
    let perf = planner.perform(&track, args.mode)?;
    let out = args
        .out
        .unwrap_or_else(|| config.default_output(&args.track, "strikes.json"));
    write_json(&out, &perf.log)?;
    if let Some(path) = &args.plan {
        write_json::<TipPlan>(path, &perf.plan)?;
    }
    if let Some(path) = &args.rollout {
        if args.mode == PerformMode::Kinematic {
            eprintln!("warning: kinematic mode has no rollout; writing an empty log");
        }
        write_atomic(path, rollout_jsonl(&perf.rollout).as_bytes())?;
    }
    println!(
        "{}: {} strikes for {} targets ({} planned, {} skipped, {} dropped)",
        out.display(),
        perf.log.strikes.len(),
        track.counts_per_drum().iter().sum::<usize>(),
        perf.plan.feasible_count(),
        perf.plan.skipped.len(),
        perf.plan.dropped.len()
    );
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ScoreRow {
    song: String,
    f1: f64,
    f1_std: f64,
    precision: f64,
    recall: f64,
    n_logs: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct BatchReport {
    schema_version: u32,
    song: String,
    tolerance: usize,
    n_logs: usize,
    f1_mean: f64,
    f1_std: f64,
    precision_mean: f64,
    recall_mean: f64,
    runs: Vec<PerformanceScore>,
}

fn score(config: &ProjectConfig, args: ScoreArgs) -> Result<()> {
    let track = load_track(&args.track)?;
    let tolerance = args.tolerance.unwrap_or(config.tolerance);
    let song = song_id(&args.track);
    let mut reports: Vec<PerformanceReport> = Vec::with_capacity(args.strikes.len());
    for path in &args.strikes {
        let log: StrikeLog = serde_json::from_str(&read_text(path)?)
            .with_context(|| format!("{}", path.display()))?;
        reports.push(
            evaluate(&song, &track, &log, tolerance)
                .with_context(|| format!("{}", path.display()))?,
        );
    }
    let f1: Vec<f64> = reports.iter().map(|r| r.score.f1()).collect();
    let (f1_mean, f1_std) = mean_std(&f1);
    let mean_of = |get: fn(&PerformanceReport) -> f64| {
        mean_std(&reports.iter().map(get).collect::<Vec<_>>()).0
    };
    let row = ScoreRow {
        song: song.clone(),
        f1: f1_mean,
        f1_std,
        precision: mean_of(|r| r.score.precision()),
        recall: mean_of(|r| r.score.recall()),
        n_logs: reports.len(),
    };
    let out = args
        .out
        .unwrap_or_else(|| config.default_output(&args.track, "report.json"));
    if reports.len() == 1 {
        write_json(&out, &reports[0])?;
        let s = &reports[0].score;
        println!(
            "{}: P {:.4} R {:.4} F1 {:.4}",
            out.display(),
            s.precision(),
            s.recall(),
            s.f1()
        );
    } else {
        let batch = BatchReport {
            schema_version: SCHEMA_VERSION,
            song,
            tolerance,
            n_logs: reports.len(),
            f1_mean,
            f1_std,
            precision_mean: row.precision,
            recall_mean: row.recall,
            runs: reports.into_iter().map(|r| r.score).collect(),
        };
        write_json(&out, &batch)?;
        println!(
            "{}: F1 {:.4} ± {:.4} over {} logs",
            out.display(),
            f1_mean,
            f1_std,
            batch.n_logs
        );
    }
    if let Some(path) = &args.csv {
        write_atomic(path, &csv_bytes(&[row])?)?;
    }
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .with_context(|| format!("{}", path.display()))
}

#[derive(Debug, Serialize, Deserialize)]
struct CorrelationRow {
    feature: String,
    rho: Option<f64>,
    #[serde(rename = "|rho|")]
    abs_rho: Option<f64>,
    n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScatterSeries {
    feature: String,
    rho: Option<f64>,
    /// `[feature value, F1]` per song.
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Scatter {
    schema_version: u32,
    songs: Vec<String>,
    series: Vec<ScatterSeries>,
}

fn correlate(config: &ProjectConfig, args: CorrelateArgs) -> Result<()> {
    let features: Vec<FeatureRow> = read_csv(&args.features)?;
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for path in &args.scores {
        for row in read_csv::<ScoreRow>(path)? {
            scores.insert(row.song, row.f1);
        }
    }
    let feature_ids: BTreeMap<&str, &FeatureRow> =
        features.iter().map(|r| (r.song.as_str(), r)).collect();
    let unmatched: Vec<&str> = feature_ids
        .keys()
        .copied()
        .filter(|s| !scores.contains_key(*s))
        .chain(
            scores
                .keys()
                .map(String::as_str)
                .filter(|s| !feature_ids.contains_key(s)),
        )
        .collect();
    if !unmatched.is_empty() {
        eprintln!("warning: unmatched song ids: {}", unmatched.join(", "));
    }
    let joined: Vec<(&str, SongFeatures, f64)> = feature_ids
        .iter()
        .filter_map(|(id, row)| scores.get(*id).map(|f1| (*id, row.features(), *f1)))
        .collect();
    if joined.is_empty() {
        return Err(anyhow!(
            "no song id appears in both the features and the scores"
        ));
    }
    let feats: Vec<SongFeatures> = joined.iter().map(|j| j.1.clone()).collect();
    let f1: Vec<f64> = joined.iter().map(|j| j.2).collect();
    let table = feature_correlations(&feats, &f1)?;
    let rows: Vec<CorrelationRow> = table
        .iter()
        .map(|c| CorrelationRow {
            feature: c.feature.name().to_string(),
            rho: c.rho,
            abs_rho: c.rho.map(f64::abs),
            n: c.n,
        })
        .collect();
    let out = args
        .out
        .unwrap_or_else(|| config.output_dir.join("correlations.csv"));
    write_atomic(&out, &csv_bytes(&rows)?)?;
    if let Some(path) = &args.scatter {
        let scatter = Scatter {
            schema_version: SCHEMA_VERSION,
            songs: joined.iter().map(|j| j.0.to_string()).collect(),
            series: table
                .into_iter()
                .map(|c| ScatterSeries {
                    feature: c.feature.name().to_string(),
                    rho: c.rho,
                    points: c.points,
                })
                .collect(),
        };
        write_json(path, &scatter)?;
    }
    for r in &rows {
        match r.rho {
            Some(rho) => println!("{:<18} rho {:+.4}  n {}", r.feature, rho, r.n),
            None => println!("{:<18} undefined  n {}", r.feature, r.n),
        }
    }
    Ok(())
}

fn env_demo(config: &ProjectConfig, args: EnvDemoArgs, seed: u64) -> Result<()> {
    let random = match args.policy.as_str() {
        "zero" => false,
        "random" => true,
        other => {
            return Err(
                UsageError(format!("unknown policy {other:?}; expected zero or random")).into(),
            )
        }
    };
    let track = load_track(&args.track)?;
    let mut env = DrumEnv::new(
        track,
        config.kit_layout()?,
        config.sim.clone(),
        config.reward,
        config.lookahead,
    )?;
    let segments = decompose(env.chain(), config.segment_steps)?;
    let segment = segments
        .get(args.segment.wrapping_sub(1))
        .cloned()
        .ok_or_else(|| {
            UsageError(format!(
                "segment {} does not exist ({} segments)",
                args.segment,
                segments.len()
            ))
        })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = if args.random_start {
        InitMode::MusicStateInit
    } else {
        InitMode::Start
    };
    env.enable_log();
    env.reset(&segment, mode, &mut rng)?;
    let n = config.sim.n;
    let mut frames = 0;
    while !env.is_done() && args.frames.is_none_or(|limit| frames < limit) {
        let action: Vec<f64> = if random {
            (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
        } else {
            vec![0.0; n]
        };
        env.step(&action)?;
        frames += 1;
    }
    let text = rollout_jsonl(&env.take_log());
    match &args.out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            eprintln!("{}: {} frames", path.display(), frames);
        }
        None => print!("{text}"),
    }
    Ok(())
}
