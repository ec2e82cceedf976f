//! End-to-end acceptance checks, one line per criterion.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use drumline::complexity::{
    compute_bpm, compute_entropy, compute_npvi, compute_polyphony, count_time_sig_changes,
    song_features,
};
use drumline::eval::{match_events, score, spearman, StrikeLog};
use drumline::midi::smf::parse_smf;
use drumline::midi::{
    collapse_articulations, extract_drum_events, quantize_to_track, CollapseMode, DrumMapping,
    MidiSong, TempoEvent, TimeSigEvent,
};
use drumline::planner::{PerformMode, Planner, PlannerLimits};
use drumline::reward::{contact_reward, RewardWeights, StepContactState};
use drumline::rhythm::{build_chain, decompose, Segment, DEFAULT_LOOKAHEAD};
use drumline::sim::{
    integrate, pd_control, rollout_jsonl, DrumEnv, DrumKitLayout, InitMode, SimConfig, SimState,
    StrikeEvent,
};
use drumline::synth::{isochronous_song, sweep};
use drumline::{DrumId, DrumSet, DrumTrack, Stick};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

type Check = Result<String, String>;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn planner() -> Planner {
    Planner::new(
        DrumKitLayout::default(),
        SimConfig::default(),
        PlannerLimits::default(),
    )
    .expect("default planner")
}

fn track_of_song(song: &MidiSong) -> DrumTrack {
    let mapping = DrumMapping::general_midi();
    let events =
        collapse_articulations(&extract_drum_events(song), &mapping, CollapseMode::Discard);
    quantize_to_track(&events, &mapping, 50).expect("quantize")
}

#[derive(Deserialize)]
struct MetricCase {
    name: String,
    ticks_per_quarter: u16,
    tempos: Vec<(u64, u32)>,
    time_sigs: Vec<(u64, u8, u16)>,
    end_tick: u64,
    fps: u32,
    hits: Vec<(usize, Vec<u8>)>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    expected: Expected,
}

#[derive(Deserialize)]
struct Expected {
    bpm: f64,
    npvi: Option<f64>,
    entropy: Option<f64>,
    polyphony_pct: Option<f64>,
    time_sig_changes: usize,
    spearman: Option<f64>,
}

fn close(name: &str, what: &str, got: Option<f64>, want: Option<f64>) -> Result<(), String> {
    match (got, want) {
        (None, None) => Ok(()),
        (Some(g), Some(w)) if (g - w).abs() <= 1e-9 => Ok(()),
        _ => Err(format!("{name}: {what} {got:?} vs oracle {want:?}")),
    }
}

fn metric_oracles() -> Check {
    let text = std::fs::read_to_string(fixtures().join("metrics_cases.json"))
        .map_err(|e| e.to_string())?;
    let cases: Vec<MetricCase> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    ensure(cases.len() >= 20, "fewer than 20 cases")?;
    for c in &cases {
        let song = MidiSong {
            ticks_per_quarter: c.ticks_per_quarter,
            events: Vec::new(),
            tempo_events: c
                .tempos
                .iter()
                .map(|&(tick, us_per_quarter)| TempoEvent {
                    tick,
                    us_per_quarter,
                })
                .collect(),
            time_sig_events: c
                .time_sigs
                .iter()
                .map(|&(tick, numerator, denominator)| TimeSigEvent {
                    tick,
                    numerator,
                    denominator,
                })
                .collect(),
            end_tick: c.end_tick,
        };
        let track = DrumTrack::from_hits(
            c.fps,
            c.hits.iter().map(|(f, ids)| {
                (
                    *f,
                    ids.iter()
                        .map(|&i| DrumId::new(i).expect("drum id"))
                        .collect::<DrumSet>(),
                )
            }),
        )
        .map_err(|e| e.to_string())?;
        let chain = build_chain(&track, c.name.as_str());
        close(
            &c.name,
            "bpm",
            Some(compute_bpm(&song)),
            Some(c.expected.bpm),
        )?;
        close(&c.name, "npvi", compute_npvi(&chain).ok(), c.expected.npvi)?;
        close(
            &c.name,
            "entropy",
            compute_entropy(&track).ok(),
            c.expected.entropy,
        )?;
        close(
            &c.name,
            "polyphony",
            compute_polyphony(&track).ok(),
            c.expected.polyphony_pct,
        )?;
        close(
            &c.name,
            "spearman",
            spearman(&c.xs, &c.ys).ok(),
            c.expected.spearman,
        )?;
        ensure(
            count_time_sig_changes(&song) == c.expected.time_sig_changes,
            format!("{}: time signature changes", c.name),
        )?;
    }
    let by_name = |n: &str| cases.iter().find(|c| c.name == n).expect("named case");
    let iso = by_name("isochronous");
    let iso_track = DrumTrack::from_hits(
        50,
        iso.hits
            .iter()
            .map(|(f, ids)| (*f, ids.iter().map(|&i| DrumId::new(i).unwrap()).collect())),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        compute_npvi(&build_chain(&iso_track, "iso")) == Ok(0.0),
        "isochronous nPVI is not exactly 0",
    )?;
    let single = by_name("single-drum");
    let single_track = DrumTrack::from_hits(
        50,
        single
            .hits
            .iter()
            .map(|(f, _)| (*f, DrumSet::single(DrumId::TOM_2))),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        compute_entropy(&single_track) == Ok(0.0),
        "single-drum entropy is not exactly 0",
    )?;
    let two = by_name("at-most-two");
    let two_track = DrumTrack::from_hits(
        50,
        two.hits
            .iter()
            .map(|(f, ids)| (*f, ids.iter().map(|&i| DrumId::new(i).unwrap()).collect())),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        compute_polyphony(&two_track) == Ok(0.0),
        "two-drum polyphony is not exactly 0",
    )?;
    Ok(format!(
        "{} oracle cases within 1e-9, extremes exact",
        cases.len()
    ))
}

fn ingestion_golden() -> Check {
    let bytes = std::fs::read(fixtures().join("groove.mid")).map_err(|e| e.to_string())?;
    let mapping_text = std::fs::read_to_string(fixtures().join("groove-mapping.toml"))
        .map_err(|e| e.to_string())?;
    let golden =
        std::fs::read_to_string(fixtures().join("groove.track.json")).map_err(|e| e.to_string())?;
    let song = parse_smf(&bytes).map_err(|e| e.to_string())?;
    let mapping = DrumMapping::from_toml(&mapping_text).map_err(|e| e.to_string())?;
    let raw = extract_drum_events(&song);
    let kept = collapse_articulations(&raw, &mapping, CollapseMode::Discard);
    let track = quantize_to_track(&kept, &mapping, 50).map_err(|e| e.to_string())?;
    ensure(
        format!("{}\n", track.to_json()) == golden,
        "track JSON differs from golden file",
    )?;
    let count = |events: &[drumline::midi::NoteOnEvent], note: u8| {
        events.iter().filter(|e| e.note == note).count()
    };
    ensure(
        count(&raw, 42) == 50 && count(&raw, 46) == 3,
        "fixture hi-hat counts changed",
    )?;
    ensure(
        count(&kept, 42) == 50 && count(&kept, 46) == 0,
        "collapse did not keep exactly the majority hi-hat",
    )?;
    Ok(format!(
        "{} hits byte-exact, hi-hat 42:50 kept, 46:3 dropped",
        track.hit_count()
    ))
}

fn random_track(rng: &mut ChaCha8Rng, max_steps: usize) -> DrumTrack {
    let n = rng.gen_range(1..=max_steps);
    let mut frame = rng.gen_range(0..30);
    let mut hits = Vec::with_capacity(n);
    for _ in 0..n {
        let bits: u8 = rng.gen_range(1..64);
        hits.push((
            frame,
            DrumId::ALL
                .into_iter()
                .filter(|d| bits & (1 << d.index()) != 0)
                .collect::<DrumSet>(),
        ));
        frame += rng.gen_range(1..20);
    }
    DrumTrack::from_hits(50, hits).expect("track")
}

fn chain_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let track = random_track(&mut rng, 120);
        let chain = build_chain(&track, "rt");
        let back = chain
            .to_track(track.n_frames())
            .map_err(|e| e.to_string())?;
        ensure(back == track, "rebuild is not the identity")?;
        let n = chain.len();
        for p in [1, 7, 32, n, n + 5] {
            let segs = decompose(&chain, p).map_err(|e| e.to_string())?;
            ensure(
                segs.len() == n.div_ceil(p),
                format!("P={p}: wrong segment count"),
            )?;
            let mut next = 0;
            for s in &segs {
                ensure(
                    s.steps.start == next && s.steps.end > s.steps.start,
                    format!("P={p}: segments do not tile"),
                )?;
                next = s.steps.end;
            }
            ensure(next == n, format!("P={p}: segments do not cover [0, N)"))?;
        }
    }
    Ok("100 tracks round-trip, partitions hold for P in {1, 7, 32, N, N+5}".into())
}

fn reward_evaluator_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let planner = planner();
    let mut total_tp = 0;
    for k in 0..50 {
        let track = random_track(&mut rng, 40);
        let (records, log) = if k % 2 == 0 {
            let perf = planner
                .perform(&track, PerformMode::Pd)
                .map_err(|e| e.to_string())?;
            (perf.rollout, perf.log)
        } else {
            let config = SimConfig::default();
            let mut env = DrumEnv::new(
                track.clone(),
                DrumKitLayout::default(),
                config.clone(),
                RewardWeights::default(),
                DEFAULT_LOOKAHEAD,
            )
            .map_err(|e| e.to_string())?;
            env.enable_log();
            env.reset(&Segment::whole(env.chain()), InitMode::Start, &mut rng)
                .map_err(|e| e.to_string())?;
            let mut strikes = Vec::new();
            while !env.is_done() {
                let action: Vec<f64> = (0..config.n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                strikes.extend(env.step(&action).map_err(|e| e.to_string())?.strikes);
            }
            (env.take_log(), StrikeLog::new(50, strikes))
        };
        let mut correct = 0;
        for r in &records {
            let executed: DrumSet = r.strikes.iter().map(|s| s.drum).collect();
            let b = &r.reward;
            ensure(
                b.correct_count + b.missed_count == r.targets.len(),
                format!("frame {}: correct + missed", r.frame),
            )?;
            ensure(
                b.correct_count + b.wrong_count == executed.len(),
                format!("frame {}: correct + wrong", r.frame),
            )?;
            correct += b.correct_count;
        }
        let tp = score(&match_events(&track, &log, 0).map_err(|e| e.to_string())?)
            .overall
            .tp;
        ensure(
            correct == tp,
            format!("rollout {k}: reward counted {correct} correct, evaluator {tp}"),
        )?;
        total_tp += tp;
    }
    ensure(total_tp > 0, "no correct hits at all")?;
    Ok(format!(
        "50 rollouts, {total_tp} correct hits agree with tolerance-0 matching"
    ))
}

fn weight_semantics() -> Check {
    let w: RewardWeights = toml::from_str("").map_err(|e| e.to_string())?;
    ensure(
        w == RewardWeights::default(),
        "empty config does not give default weights",
    )?;
    ensure(
        (
            w.w_correct,
            w.w_wrong,
            w.w_missed,
            w.w_prox,
            w.w_action_rate,
            w.w_dof_acc,
        ) == (1.0, -0.5, -2.0, -1.0, -1e-3, -2.5e-7),
        "default weights differ from the reference table",
    )?;
    let kit = DrumKitLayout::default();
    let centers = kit.centers();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for frame in 0..40 {
        let target = DrumId::ALL[frame % 6];
        let tips = [
            [
                rng.gen_range(0.2..0.8),
                rng.gen_range(-0.4..0.4),
                rng.gen_range(0.6..1.1),
            ],
            [
                rng.gen_range(0.2..0.8),
                rng.gen_range(-0.4..0.4),
                rng.gen_range(0.6..1.1),
            ],
        ];
        let base = StepContactState {
            targets: DrumSet::single(target),
            executed: DrumSet::single(target),
            stick_positions: tips,
            drum_positions: centers,
        };
        let good = contact_reward(&base, &w);
        let dist = |p: [f64; 3], q: [f64; 3]| {
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
        };
        let prox: f64 = tips.iter().map(|t| dist(*t, centers[target.index()])).sum();
        ensure(
            good.contact_total() == 1.0 - prox,
            format!("step {frame}: correct-hit reward"),
        )?;

        let wrong = DrumId::ALL[(frame + 1 + frame % 5) % 6];
        let moved = [centers[wrong.index()], tips[1]];
        let swapped = StepContactState {
            executed: DrumSet::single(wrong),
            stick_positions: moved,
            ..base
        };
        let bad = contact_reward(&swapped, &w);
        let prox_bad: f64 = moved
            .iter()
            .map(|t| dist(*t, centers[target.index()]))
            .sum();
        ensure(
            bad.contact_total() == -0.5 - 2.0 - prox_bad,
            format!("step {frame}: wrong-hit reward"),
        )?;
        let delta = bad.contact_total() - good.contact_total();
        let expected = -1.0 - 0.5 - 2.0 - 1.0 * (prox_bad - prox);
        ensure(
            (delta - expected).abs() < 1e-12,
            format!("step {frame}: substitution delta {delta} vs {expected}"),
        )?;
    }
    Ok("default weights verbatim; correct and substituted steps score as specified".into())
}

fn simulator_convergence() -> Check {
    let config = SimConfig::default();
    let mut state = SimState::at_rest(&config, 0);
    let target: Vec<f64> = config
        .q0
        .iter()
        .enumerate()
        .map(|(i, q)| q + if i % 3 == 2 { -0.2 } else { 0.15 })
        .collect();
    let mut reached = None;
    let steps = (2.0 / config.sim_dt).round() as usize;
    for k in 1..=steps {
        let f = pd_control(&target, &state.q, &state.qdot, &config.kp, &config.kd)
            .map_err(|e| e.to_string())?;
        integrate(&mut state, &f, &config).map_err(|e| e.to_string())?;
        let err = state
            .q
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if err < 1e-3 && reached.is_none() {
            reached = Some(k as f64 * config.sim_dt);
        }
    }
    let t = reached.ok_or("PD response did not settle within 2 s")?;

    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut track_rng = ChaCha8Rng::seed_from_u64(12);
        let track = random_track(&mut track_rng, 60);
        let mut env = DrumEnv::new(
            track,
            DrumKitLayout::default(),
            config.clone(),
            RewardWeights::default(),
            DEFAULT_LOOKAHEAD,
        )
        .map_err(|e| e.to_string())?;
        env.enable_log();
        let segs = decompose(env.chain(), 16).map_err(|e| e.to_string())?;
        let mut out = String::new();
        for seg in &segs {
            env.reset(seg, InitMode::MusicStateInit, &mut rng)
                .map_err(|e| e.to_string())?;
            while !env.is_done() {
                let a: Vec<f64> = (0..config.n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                env.step(&a).map_err(|e| e.to_string())?;
            }
            out.push_str(&rollout_jsonl(&env.take_log()));
        }
        Ok(out)
    };
    let (a, b) = (run()?, run()?);
    ensure(
        !a.is_empty() && a == b,
        "equal seeds gave different rollout logs",
    )?;
    Ok(format!(
        "settled in {t:.3} s, rollout logs identical ({} bytes)",
        a.len()
    ))
}

fn easy_material() -> Check {
    let song = isochronous_song(120.0, 2, &[DrumId::HI_HAT, DrumId::SNARE], 60.0, 1.0);
    let track = track_of_song(&song);
    let perf = planner()
        .perform(&track, PerformMode::Pd)
        .map_err(|e| e.to_string())?;
    let f1 = score(&match_events(&track, &perf.log, 1).map_err(|e| e.to_string())?).f1();
    ensure(f1 >= 0.95, format!("F1 {f1:.4} below 0.95"))?;
    Ok(format!("F1 {f1:.4} over {} hits", track.hit_count()))
}

fn trend_reproduction() -> Check {
    let planner = planner();
    let mut npvi = Vec::new();
    let mut drums = Vec::new();
    let mut bpm = Vec::new();
    let mut f1 = Vec::new();
    for s in sweep(24, 30.0, 0) {
        let track = track_of_song(&s.song);
        let feats = song_features(&s.song, &track, &build_chain(&track, s.id.as_str()));
        let perf = planner
            .perform(&track, PerformMode::Pd)
            .map_err(|e| e.to_string())?;
        f1.push(score(&match_events(&track, &perf.log, 1).map_err(|e| e.to_string())?).f1());
        npvi.push(feats.npvi.ok_or("nPVI undefined")?);
        drums.push(feats.n_drums as f64);
        bpm.push(feats.bpm.ok_or("bpm undefined")?);
    }
    let rho = |xs: &[f64]| spearman(xs, &f1).map_err(|e| e.to_string());
    let (r_npvi, r_drums, r_bpm) = (rho(&npvi)?, rho(&drums)?, rho(&bpm)?);
    let line = format!("rho(nPVI) {r_npvi:.3}, rho(n_drums) {r_drums:.3}, rho(bpm) {r_bpm:.3}");
    ensure(
        r_npvi < -0.3 && r_drums < -0.3 && r_bpm.abs() < 0.3,
        line.clone(),
    )?;
    Ok(line)
}

fn polyphony_cap() -> Check {
    let sets = [
        [DrumId::HI_HAT, DrumId::SNARE, DrumId::TOM_1],
        [DrumId::SNARE, DrumId::TOM_1, DrumId::TOM_2],
        [DrumId::HI_HAT, DrumId::CYMBAL_1, DrumId::SNARE],
        [DrumId::TOM_2, DrumId::CYMBAL_2, DrumId::TOM_1],
    ];
    let track = DrumTrack::from_hits(
        50,
        (0..60).map(|i| (50 + 25 * i, sets[i % 4].into_iter().collect::<DrumSet>())),
    )
    .map_err(|e| e.to_string())?;
    let bound = 2.0 * (2.0 / 3.0) / (1.0 + 2.0 / 3.0);
    let mut worst = (0.0f64, 0.0f64);
    for mode in [PerformMode::Kinematic, PerformMode::Pd] {
        let perf = planner().perform(&track, mode).map_err(|e| e.to_string())?;
        let s = score(&match_events(&track, &perf.log, 1).map_err(|e| e.to_string())?);
        ensure(
            s.recall() <= 0.68,
            format!("{mode:?}: recall {:.4}", s.recall()),
        )?;
        ensure(
            s.f1() <= bound + 1e-12,
            format!("{mode:?}: F1 {:.4} above {bound}", s.f1()),
        )?;
        worst = (worst.0.max(s.recall()), worst.1.max(s.f1()));
    }
    Ok(format!(
        "max recall {:.4}, max F1 {:.4} (bound {bound:.4})",
        worst.0, worst.1
    ))
}

/// Largest one-to-one matching of `targets` to `strikes` within `tol`, by exhaustive search.
fn optimal_matching(targets: &[usize], strikes: &[usize], tol: usize) -> usize {
    fn go(
        i: usize,
        used: u32,
        targets: &[usize],
        strikes: &[usize],
        tol: usize,
        memo: &mut Vec<Option<usize>>,
    ) -> usize {
        if i == targets.len() {
            return 0;
        }
        let key = i * (1 << strikes.len()) + used as usize;
        if let Some(v) = memo[key] {
            return v;
        }
        let mut best = go(i + 1, used, targets, strikes, tol, memo);
        for (j, &s) in strikes.iter().enumerate() {
            if used & (1 << j) == 0 && s.abs_diff(targets[i]) <= tol {
                best = best.max(1 + go(i + 1, used | (1 << j), targets, strikes, tol, memo));
            }
        }
        memo[key] = Some(best);
        best
    }
    let mut memo = vec![None; (targets.len() + 1) << strikes.len()];
    go(0, 0, targets, strikes, tol, &mut memo)
}

fn matching_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut instances = 0;
    for _ in 0..300 {
        let span = rng.gen_range(5..40);
        let mut hits: Vec<(usize, DrumSet)> = Vec::new();
        let mut strikes = Vec::new();
        let mut per_drum: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for drum in DrumId::ALL {
            let nt = rng.gen_range(0..=12.min(span));
            let mut frames: Vec<usize> = rand::seq::index::sample(&mut rng, span, nt).into_vec();
            frames.sort_unstable();
            let ns = rng.gen_range(0..=12);
            let struck: Vec<usize> = (0..ns).map(|_| rng.gen_range(0..span + 2)).collect();
            for &f in &frames {
                hits.push((f, DrumSet::single(drum)));
            }
            for &f in &struck {
                strikes.push(StrikeEvent {
                    frame: f,
                    drum,
                    stick: if f % 2 == 0 {
                        Stick::Left
                    } else {
                        Stick::Right
                    },
                    impact_speed: 1.0,
                });
            }
            per_drum.push((frames, struck));
        }
        let track = DrumTrack::from_hits(50, hits).map_err(|e| e.to_string())?;
        let log = StrikeLog::new(50, strikes);
        for tol in 0..=2 {
            let greedy = score(&match_events(&track, &log, tol).map_err(|e| e.to_string())?)
                .overall
                .tp;
            let best: usize = per_drum
                .iter()
                .map(|(t, s)| optimal_matching(t, s, tol))
                .sum();
            ensure(
                greedy == best,
                format!("greedy {greedy} vs optimal {best} at tolerance {tol}"),
            )?;
            instances += 1;
        }
    }
    Ok(format!(
        "{instances} instances, greedy tp equals exhaustive optimum"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("metric oracles", metric_oracles, Duration::from_secs(5)),
        (
            "ingestion golden files",
            ingestion_golden,
            Duration::from_secs(1),
        ),
        (
            "chain and segment round-trip",
            chain_round_trip,
            Duration::from_secs(5),
        ),
        (
            "reward and evaluator agreement",
            reward_evaluator_agreement,
            Duration::from_secs(30),
        ),
        (
            "reward weight semantics",
            weight_semantics,
            Duration::from_secs(5),
        ),
        (
            "simulator convergence and determinism",
            simulator_convergence,
            Duration::from_secs(10),
        ),
        (
            "baseline on easy material",
            easy_material,
            Duration::from_secs(120),
        ),
        (
            "trend reproduction",
            trend_reproduction,
            Duration::from_secs(600),
        ),
        ("polyphony cap", polyphony_cap, Duration::from_secs(60)),
        ("matching oracle", matching_oracle, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (status, detail) = match (&result, took <= *budget) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; took {took:.2?}, budget {budget:?}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "acceptance {:>2} {status} {name}: {detail} [{took:.2?}]",
            i + 1
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
