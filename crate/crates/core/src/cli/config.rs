//! TOML run configuration for `sweep`.

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::sampler::ShotPlan;
use crate::trajectory::{phi_grid, NoiseSchedule, Scenario, ScheduleSegment};

/// Machine-readable description of the configuration document.
pub const CONFIG_SCHEMA: &str = r##"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "ghz-phase sweep configuration (TOML)",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "seed": { "type": "integer", "minimum": 0, "default": 0 },
    "grid": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "start": { "type": "number", "default": 0.0, "description": "radians" },
        "end": { "type": "number", "default": 6.283185307179586, "description": "radians, exclusive" },
        "count": { "type": "integer", "minimum": 1, "default": 64 }
      }
    },
    "sampling": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "exact": { "type": "boolean", "default": false },
        "shots": { "type": "integer", "minimum": 1, "default": 1024 },
        "repetitions": { "type": "integer", "minimum": 1, "default": 5 }
      }
    },
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "csv": { "type": "string", "description": "defaults to standard output" },
        "svg": { "type": "string" }
      }
    },
    "scenario": { "$ref": "#/$defs/scenario" },
    "segment": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["phi_start", "phi_end", "scenario"],
        "properties": {
          "phi_start": { "type": "number" },
          "phi_end": { "type": "number" },
          "scenario": { "$ref": "#/$defs/scenario" }
        }
      }
    }
  },
  "oneOf": [ { "required": ["scenario"] }, { "required": ["segment"] } ],
  "$defs": {
    "scenario": {
      "oneOf": [
        { "properties": { "type": { "const": "noiseless" } }, "required": ["type"], "additionalProperties": false },
        { "properties": {
            "type": { "const": "channel" },
            "kind": { "enum": ["depolarizing", "dephasing", "amplitude_damping"] },
            "location": { "enum": ["before_cnot", "after_cnot", "after_phase"] },
            "p1": { "type": "number", "minimum": 0, "maximum": 1 },
            "p2": { "type": "number", "minimum": 0, "maximum": 1 } },
          "required": ["type", "kind", "location", "p1", "p2"], "additionalProperties": false },
        { "properties": {
            "type": { "const": "rho_prime" },
            "a": { "type": "number", "minimum": 0, "maximum": 1 },
            "r": { "type": "number", "minimum": 0 } },
          "required": ["type", "a", "r"], "additionalProperties": false },
        { "properties": {
            "type": { "const": "dissipative" },
            "gamma0_t": { "type": "number", "minimum": 0 },
            "gamma1_t": { "type": "number", "minimum": 0 } },
          "required": ["type", "gamma0_t", "gamma1_t"], "additionalProperties": false },
        { "properties": {
            "type": { "const": "t1t2" },
            "t": { "type": "number", "minimum": 0 },
            "t1_q0": { "type": "number", "exclusiveMinimum": 0 },
            "t2_q0": { "type": "number", "exclusiveMinimum": 0 },
            "t1_q1": { "type": "number", "exclusiveMinimum": 0 },
            "t2_q1": { "type": "number", "exclusiveMinimum": 0 } },
          "required": ["type", "t", "t1_q0", "t2_q0", "t1_q1", "t2_q1"], "additionalProperties": false }
      ]
    }
  }
}
"##;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub scenario: Option<Scenario>,
    #[serde(default, rename = "segment", skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<ScheduleSegment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            start: 0.0,
            end: TAU,
            count: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub exact: bool,
    pub shots: u32,
    pub repetitions: u32,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        let d = ShotPlan::default();
        Self {
            exact: false,
            shots: d.shots,
            repetitions: d.repetitions,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// A validated configuration, ready to run.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepJob {
    pub grid: Vec<f64>,
    pub schedule: NoiseSchedule,
    pub plan: ShotPlan,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Parses TOML; unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Checks every constraint, reporting all violations together.
    pub fn validate(&self) -> Result<SweepJob, Vec<String>> {
        let mut problems = Vec::new();

        let grid = match phi_grid(self.grid.start, self.grid.end, self.grid.count) {
            Ok(g) => Some(g),
            Err(e) => {
                problems.push(format!("grid: {e}"));
                None
            }
        };

        let plan = ShotPlan {
            shots: self.sampling.shots,
            repetitions: self.sampling.repetitions,
            seed: self.seed,
            exact: self.sampling.exact,
        };
        if let Err(e) = plan.validate() {
            problems.push(format!("sampling: {e}"));
        }

        let segments = match (&self.scenario, self.segments.is_empty()) {
            (Some(_), false) => {
                problems.push("give either [scenario] or [[segment]] entries, not both".into());
                None
            }
            (None, true) => {
                problems.push("missing [scenario] or [[segment]] entries".into());
                None
            }
            (Some(s), true) => Some(vec![ScheduleSegment {
                phi_start: self.grid.start,
                phi_end: self.grid.end,
                scenario: *s,
            }]),
            (None, false) => Some(self.segments.clone()),
        };

        let schedule = segments.and_then(|segs| match NoiseSchedule::check(&segs) {
            Ok(()) => NoiseSchedule::new(segs).ok(),
            Err(v) => {
                problems.extend(v.into_iter().map(|p| format!("schedule: {p}")));
                None
            }
        });

        if let (Some(g), Some(s)) = (&grid, &schedule) {
            if let Some(phi) = g.iter().find(|&&phi| s.scenario_at(phi).is_err()) {
                problems.push(format!("schedule: grid phase {phi} is not covered by any segment"));
            }
        }

        match (grid, schedule) {
            (Some(grid), Some(schedule)) if problems.is_empty() => Ok(SweepJob {
                grid,
                schedule,
                plan,
                output: self.output.clone(),
            }),
            _ => Err(problems),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::from_toml("[scenario]\ntype = \"noiseless\"\n").unwrap();
        let job = c.validate().unwrap();
        assert_eq!(job.grid.len(), 64);
        assert!(!job.plan.exact);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(RunConfig::from_toml("colour = 1\n[scenario]\ntype = \"noiseless\"\n").is_err());
        assert!(RunConfig::from_toml("[grid]\nstep = 1\n[scenario]\ntype = \"noiseless\"\n").is_err());
    }

    #[test]
    fn all_violations_listed() {
        let c = RunConfig::from_toml(
            "[grid]\ncount = 0\n[sampling]\nshots = 0\n\n[[segment]]\nphi_start = 0.0\nphi_end = 1.0\nscenario = { type = \"noiseless\" }\n\n[[segment]]\nphi_start = 2.0\nphi_end = 7.0\nscenario = { type = \"rho_prime\", a = 0.5, r = 0.9 }\n",
        )
        .unwrap();
        let v = c.validate().unwrap_err();
        assert!(v.len() >= 4, "{v:?}");
        assert!(v.iter().any(|p| p.contains("gap")));
    }

    #[test]
    fn schema_is_json() {
        let v: serde_json::Value = serde_json::from_str(CONFIG_SCHEMA).unwrap();
        assert_eq!(v["additionalProperties"], false);
    }
}
