use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use drumline::eval::DEFAULT_TOLERANCE;
use drumline::midi::DrumMapping;
use drumline::planner::PlannerLimits;
use drumline::reward::RewardWeights;
use drumline::rhythm::{DEFAULT_LOOKAHEAD, DEFAULT_SEGMENT_STEPS};
use drumline::sim::{DrumKitLayout, SimConfig};
use drumline::track::DEFAULT_FPS;
use serde::Deserialize;

use crate::UsageError;

/// Project settings read from `--config`. Relative paths resolve against the
/// config file's directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub kit: Option<PathBuf>,
    pub mappings: Vec<PathBuf>,
    pub fps: u32,
    pub lookahead: usize,
    pub segment_steps: usize,
    pub tolerance: usize,
    pub output_dir: PathBuf,
    pub reward: RewardWeights,
    pub sim: SimConfig,
    pub planner: PlannerLimits,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        ProjectConfig {
            kit: None,
            mappings: Vec::new(),
            fps: DEFAULT_FPS,
            lookahead: DEFAULT_LOOKAHEAD,
            segment_steps: DEFAULT_SEGMENT_STEPS,
            tolerance: DEFAULT_TOLERANCE,
            output_dir: PathBuf::from("."),
            reward: RewardWeights::default(),
            sim: SimConfig::default(),
            planner: PlannerLimits::default(),
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String> {
    let bytes = read_input(path)?;
    String::from_utf8(bytes).map_err(|_| usage(format!("{} is not UTF-8 text", path.display())))
}

impl ProjectConfig {
    pub fn load(path: Option<&Path>) -> Result<ProjectConfig> {
        let Some(path) = path else {
            return Ok(ProjectConfig::default());
        };
        let text = read_text(path)?;
        let mut config: ProjectConfig =
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(kit) = config.kit.as_mut() {
            *kit = base.join(&*kit);
        }
        for m in &mut config.mappings {
            *m = base.join(&*m);
        }
        config.output_dir = base.join(&config.output_dir);
        for p in config.kit.iter().chain(&config.mappings) {
            if !p.is_file() {
                return Err(usage(format!(
                    "{}: referenced file {} does not exist",
                    path.display(),
                    p.display()
                )));
            }
        }
        Ok(config)
    }

    /// Range checks across all sections.
    pub fn validate(&self) -> Result<()> {
        if !(1..=1000).contains(&self.fps) {
            return Err(usage(format!("fps {} outside 1..=1000", self.fps)));
        }
        if self.segment_steps == 0 {
            return Err(usage("segment_steps must be at least 1"));
        }
        if self.lookahead > 10_000 {
            return Err(usage("lookahead must be at most 10000 frames"));
        }
        if self.tolerance > 1000 {
            return Err(usage("tolerance must be at most 1000 frames"));
        }
        if self.sim.control_fps != self.fps {
            return Err(usage(format!(
                "sim.control_fps ({}) must equal fps ({})",
                self.sim.control_fps, self.fps
            )));
        }
        self.reward.validate().map_err(|e| usage(e.to_string()))?;
        self.sim.validate().map_err(|e| usage(e.to_string()))?;
        self.planner.validate().map_err(|e| usage(e.to_string()))?;
        self.kit_layout()?
            .validate()
            .map_err(|e| usage(e.to_string()))?;
        Ok(())
    }

    pub fn kit_layout(&self) -> Result<DrumKitLayout> {
        match &self.kit {
            None => Ok(DrumKitLayout::default()),
            Some(p) => DrumKitLayout::from_toml(&read_text(p)?)
                .map_err(|e| usage(format!("{}: {e}", p.display()))),
        }
    }

    /// General MIDI unless mapping files are given; later files override earlier ones.
    pub fn mapping(&self, extra: &[PathBuf]) -> Result<DrumMapping> {
        let paths: Vec<&PathBuf> = if extra.is_empty() {
            self.mappings.iter().collect()
        } else {
            extra.iter().collect()
        };
        if paths.is_empty() {
            return Ok(DrumMapping::general_midi());
        }
        let mut merged = std::collections::BTreeMap::new();
        for p in paths {
            let m = DrumMapping::from_toml(&read_text(p)?)
                .map_err(|e| usage(format!("{}: {e}", p.display())))?;
            merged.extend(m.iter());
        }
        DrumMapping::new(merged).context("merging mappings")
    }

    pub fn default_output(&self, input: &Path, suffix: &str) -> PathBuf {
        self.output_dir.join(format!("{}.{suffix}", song_id(input)))
    }
}

/// File name up to its first dot.
pub fn song_id(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}
