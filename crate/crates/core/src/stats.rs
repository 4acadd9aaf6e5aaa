//! Dataset-level counts and duration statistics.
//!
//! Durations are accumulated as integer nanoseconds so partial aggregates
//! merge exactly, whatever the order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::scenario::{CameraBehavior, DayPhase, Environment, HumanModel, Recipe, Variation, Weather};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatasetStats {
    pub clips: u64,
    pub frames: u64,
    pub per_class: BTreeMap<String, u64>,
    pub weather: BTreeMap<Weather, u64>,
    pub day_phase: BTreeMap<DayPhase, u64>,
    pub environment: BTreeMap<Environment, u64>,
    pub variation: BTreeMap<Variation, u64>,
    pub camera: BTreeMap<CameraBehavior, u64>,
    pub human_model: BTreeMap<HumanModel, u64>,
    duration_ns_sum: i128,
    duration_ns_sq_sum: i128,
}

fn bump<K: Ord>(map: &mut BTreeMap<K, u64>, key: K, by: u64) {
    *map.entry(key).or_insert(0) += by;
}

fn merge_map<K: Ord + Clone>(into: &mut BTreeMap<K, u64>, from: &BTreeMap<K, u64>) {
    for (k, v) in from {
        bump(into, k.clone(), *v);
    }
}

impl DatasetStats {
    pub fn add(&mut self, r: &Recipe) {
        self.clips += 1;
        self.frames += r.frame_count() as u64;
        bump(&mut self.per_class, r.action.clone(), 1);
        bump(&mut self.weather, r.weather, 1);
        bump(&mut self.day_phase, r.day_phase, 1);
        bump(&mut self.environment, r.environment, 1);
        bump(&mut self.variation, r.variation, 1);
        bump(&mut self.camera, r.camera, 1);
        bump(&mut self.human_model, r.human_model, 1);
        let ns = (r.duration_s * 1e9).round() as i128;
        self.duration_ns_sum += ns;
        self.duration_ns_sq_sum += ns * ns;
    }

    pub fn merge(&mut self, other: &DatasetStats) {
        self.clips += other.clips;
        self.frames += other.frames;
        merge_map(&mut self.per_class, &other.per_class);
        merge_map(&mut self.weather, &other.weather);
        merge_map(&mut self.day_phase, &other.day_phase);
        merge_map(&mut self.environment, &other.environment);
        merge_map(&mut self.variation, &other.variation);
        merge_map(&mut self.camera, &other.camera);
        merge_map(&mut self.human_model, &other.human_model);
        self.duration_ns_sum += other.duration_ns_sum;
        self.duration_ns_sq_sum += other.duration_ns_sq_sum;
    }

    pub fn merged(mut self, other: DatasetStats) -> DatasetStats {
        self.merge(&other);
        self
    }

    pub fn mean_duration_s(&self) -> f64 {
        if self.clips == 0 {
            return 0.0;
        }
        self.duration_ns_sum as f64 / self.clips as f64 / 1e9
    }

    /// Sample standard deviation (n - 1 denominator).
    pub fn sd_duration_s(&self) -> f64 {
        let n = self.clips as i128;
        if n < 2 {
            return 0.0;
        }
        let num = n * self.duration_ns_sq_sum - self.duration_ns_sum * self.duration_ns_sum;
        (num as f64 / (n * (n - 1)) as f64).sqrt() / 1e9
    }

    pub fn mean_frames_per_clip(&self) -> f64 {
        if self.clips == 0 {
            return 0.0;
        }
        self.frames as f64 / self.clips as f64
    }

    /// Mean over the classes present.
    pub fn mean_clips_per_class(&self) -> f64 {
        if self.per_class.is_empty() {
            return 0.0;
        }
        self.clips as f64 / self.per_class.len() as f64
    }

    /// `(variable, value, count)` rows for every histogram.
    pub fn histogram_rows(&self) -> Vec<(&'static str, String, u64)> {
        fn rows<K: ToString>(name: &'static str, m: &BTreeMap<K, u64>) -> Vec<(&'static str, String, u64)> {
            m.iter().map(|(k, v)| (name, k.to_string(), *v)).collect()
        }
        let mut out = rows("action", &self.per_class);
        out.extend(rows("weather", &self.weather));
        out.extend(rows("day_phase", &self.day_phase));
        out.extend(rows("environment", &self.environment));
        out.extend(rows("variation", &self.variation));
        out.extend(rows("camera", &self.camera));
        out.extend(rows("human_model", &self.human_model));
        out
    }

    pub fn write_histograms_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "variable,value,count")?;
        for (var, value, count) in self.histogram_rows() {
            writeln!(out, "{var},{value},{count}")?;
        }
        Ok(())
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "clips: {}", self.clips);
        let _ = writeln!(s, "frames: {}", self.frames);
        let _ = writeln!(s, "classes: {}", self.per_class.len());
        let _ = writeln!(s, "mean clips per class: {:.1}", self.mean_clips_per_class());
        if let Some(min) = self.per_class.values().min() {
            let _ = writeln!(s, "min clips per class: {min}");
        }
        let _ = writeln!(s, "mean duration s: {:.3}", self.mean_duration_s());
        let _ = writeln!(s, "sd duration s: {:.3}", self.sd_duration_s());
        let _ = writeln!(s, "mean frames per clip: {:.2}", self.mean_frames_per_clip());
        let mut current = "";
        for (var, value, count) in self.histogram_rows() {
            if var != current {
                let _ = writeln!(s, "\n[{var}]");
                current = var;
            }
            let share = count as f64 / self.clips.max(1) as f64;
            let _ = writeln!(s, "{value:>24} {count:>8} {share:>8.4}");
        }
        s
    }
}

pub fn aggregate_stats<'a>(recipes: impl IntoIterator<Item = &'a Recipe>) -> Result<DatasetStats> {
    let mut stats = DatasetStats::default();
    for r in recipes {
        stats.add(r);
    }
    if stats.clips == 0 {
        return Err(Error::ParameterDomain("cannot aggregate an empty recipe list".into()));
    }
    Ok(stats)
}
