//! Layered settings: built-in defaults, then a `key = value` config file
//! (the `--config` flag, falling back to `$DIP_CONFIG`), then repeated
//! `--set KEY=VALUE` flags. Later layers win; unknown keys are rejected
//! before any work starts.

use anyhow::{anyhow, bail, Context, Result};
use dip_core::pipeline::DipConfig;
use dip_core::sim::SimParams;
use dip_core::tracking::TrackerParams;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone)]
pub struct Settings {
    pub dip: DipConfig,
    pub tracker: TrackerParams,
    /// Whether `run` hands a confirmed detection to the tracker.
    pub track: bool,
    /// Simulation tuning; its seeding detector is independent of the
    /// pipeline detector keys.
    pub sim: SimParams,
    /// Truth-box dilation for `eval`, in pixels.
    pub detection_tolerance: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            dip: DipConfig::default(),
            tracker: TrackerParams::default(),
            track: true,
            sim: SimParams::default(),
            detection_tolerance: 10.0,
        }
    }
}

impl Settings {
    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| anyhow!("invalid value '{value}' for key '{key}'"))
        }
        let v = value;
        match key {
            "sf" => self.dip.sf = parse(key, v)?,
            "c" => self.dip.c = parse(key, v)?,
            "eps" => self.dip.eps = parse(key, v)?,
            "min_conf" => self.dip.min_conf = parse(key, v)?,
            "min_forearm" => self.dip.min_forearm = parse(key, v)?,
            "method" => self.dip.strategy = parse(key, v)?,
            "perpendicular_mode" => self.dip.perpendicular_mode = parse(key, v)?,
            "confirm_frames" => self.dip.confirm_frames = parse(key, v)?,
            "canny_low" => self.dip.detector.canny.low = parse(key, v)?,
            "canny_high" => self.dip.detector.canny.high = parse(key, v)?,
            "canny_sigma" => self.dip.detector.canny.sigma = parse(key, v)?,
            "min_area" => self.dip.detector.min_area = parse(key, v)?,
            "harris_k" => self.dip.detector.harris_k = parse(key, v)?,
            "window_sigma" => self.dip.detector.window_sigma = parse(key, v)?,
            "keypoint_threshold" => self.dip.detector.keypoint_threshold = parse(key, v)?,
            "nms_radius" => self.dip.detector.nms_radius = parse(key, v)?,
            "seed_box" => self.dip.detector.seed_box = parse(key, v)?,
            "bins" => {
                self.tracker.bins = parse(key, v)?;
                self.sim.tracker.bins = self.tracker.bins;
            }
            "lost_threshold" => {
                self.tracker.lost_threshold = parse(key, v)?;
                self.sim.tracker.lost_threshold = self.tracker.lost_threshold;
            }
            "max_iterations" => {
                self.tracker.max_iterations = parse(key, v)?;
                self.sim.tracker.max_iterations = self.tracker.max_iterations;
            }
            "min_window" => {
                self.tracker.min_window = parse(key, v)?;
                self.sim.tracker.min_window = self.tracker.min_window;
            }
            "track" => self.track = parse(key, v)?,
            "kp" => {
                self.sim.pids.yaw.kp = parse(key, v)?;
                self.sim.pids.surge.kp = self.sim.pids.yaw.kp;
            }
            "ki" => {
                self.sim.pids.yaw.ki = parse(key, v)?;
                self.sim.pids.surge.ki = self.sim.pids.yaw.ki;
            }
            "kd" => {
                self.sim.pids.yaw.kd = parse(key, v)?;
                self.sim.pids.surge.kd = self.sim.pids.yaw.kd;
            }
            "output_limit" => {
                self.sim.pids.yaw.output_limit = parse(key, v)?;
                self.sim.pids.surge.output_limit = self.sim.pids.yaw.output_limit;
            }
            "target_ratio" => self.sim.target_ratio = parse(key, v)?,
            "dt" => self.sim.dt = parse(key, v)?,
            "v_max" => self.sim.v_max = parse(key, v)?,
            "omega_max" => self.sim.omega_max = parse(key, v)?,
            "max_steps" => self.sim.max_steps = parse(key, v)?,
            "converge_tol" => self.sim.converge_tol = parse(key, v)?,
            "converge_steps" => self.sim.converge_steps = parse(key, v)?,
            "detection_tolerance" => self.detection_tolerance = parse(key, v)?,
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        self.dip.validate().map_err(|msg| anyhow!(msg))?;
        let s = &self.sim;
        if !(s.target_ratio > 0.0 && s.target_ratio < 1.0) {
            bail!("target_ratio must be in (0, 1)");
        }
        if !(s.dt > 0.0 && s.v_max > 0.0 && s.omega_max > 0.0) {
            bail!("dt, v_max and omega_max must be positive");
        }
        if s.max_steps == 0 || s.converge_steps == 0 {
            bail!("max_steps and converge_steps must be at least 1");
        }
        if !(s.converge_tol > 0.0) {
            bail!("converge_tol must be positive");
        }
        if !(s.pids.yaw.output_limit > 0.0 && s.pids.surge.output_limit > 0.0) {
            bail!("output_limit must be positive");
        }
        let t = &self.tracker;
        if t.bins == 0 {
            bail!("bins must be at least 1");
        }
        if !(0.0..=1.0).contains(&t.lost_threshold) {
            bail!("lost_threshold must be in [0, 1]");
        }
        if t.max_iterations == 0 {
            bail!("max_iterations must be at least 1");
        }
        if !(t.min_window >= 1.0) {
            bail!("min_window must be at least 1 px");
        }
        if !(self.detection_tolerance >= 0.0) {
            bail!("detection_tolerance must be non-negative");
        }
        Ok(())
    }
}

fn apply_file(settings: &mut Settings, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected 'key = value'", path.display(), i + 1))?;
        settings
            .apply(key.trim(), value.trim())
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
    }
    Ok(())
}

/// Resolves the full settings stack for one invocation.
pub fn load(config_flag: Option<&PathBuf>, sets: &[String]) -> Result<Settings> {
    let mut settings = Settings::default();
    let env_path = std::env::var_os("DIP_CONFIG").map(PathBuf::from);
    if let Some(path) = config_flag.or(env_path.as_ref()) {
        apply_file(&mut settings, path)?;
    }
    for entry in sets {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got '{entry}'"))?;
        settings.apply(key.trim(), value.trim())?;
    }
    settings.validate()?;
    Ok(settings)
}
