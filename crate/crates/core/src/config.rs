//! TOML planner configuration with dotted-key overrides.
//!
//! ```toml
//! [terrain]
//! obstacle_threshold = 0.25
//! [cost.body]
//! terrain = 1.0
//! [search]
//! heuristic = "guarded"
//! [search.schedule]
//! epsilon_0 = 3.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, CostParams};
use crate::error::ConfigError;
use crate::lattice::{PrimitiveSet, RegionParams, StanceGeometry};
use crate::search::{AnytimeSchedule, Budget, HeuristicKind};
use crate::terrain::{TerrainMaps, TerrainParams};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub heuristic: HeuristicKind,
    pub schedule: AnytimeSchedule,
    pub budget: Budget,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub terrain: TerrainParams,
    pub geometry: StanceGeometry,
    pub regions: RegionParams,
    pub cost: CostParams,
    pub search: SearchConfig,
    /// Replaces the default primitive set when present.
    #[serde(rename = "primitive", skip_serializing_if = "Option::is_none")]
    pub primitives: Option<Vec<crate::lattice::MotionPrimitive>>,
}

impl PlannerConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: PlannerConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.geometry.validate()?;
        self.cost.validate()?;
        self.search.schedule.validate()?;
        self.primitive_set().validate(&self.geometry)
    }

    pub fn primitive_set(&self) -> PrimitiveSet {
        match &self.primitives {
            Some(p) => PrimitiveSet { primitives: p.clone() },
            None => PrimitiveSet::default_set(&self.geometry, &self.regions),
        }
    }

    pub fn cost_model(&self, maps: &TerrainMaps) -> Result<CostModel, ConfigError> {
        CostModel::new(maps, self.primitive_set(), self.geometry.clone(), self.cost.clone())
    }

    /// Applies `key=value` overrides. Keys are dotted paths from the config
    /// root (`search.schedule.epsilon_0`); keys that are not found there are
    /// looked up under `cost` (`body.terrain`).
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<(), ConfigError> {
        if overrides.is_empty() {
            return Ok(());
        }
        let mut root = toml::Value::try_from(&*self).map_err(|e| ConfigError::invalid(e.to_string()))?;
        for o in overrides {
            let o = o.as_ref();
            let (key, raw) =
                o.split_once('=').ok_or_else(|| ConfigError::invalid(format!("override `{o}` is not key=value")))?;
            let value = parse_value(raw.trim());
            let path: Vec<&str> = key.trim().split('.').collect();
            let prefixed: Vec<&str> = std::iter::once("cost").chain(path.iter().copied()).collect();
            if !set_path(&mut root, &path, value.clone()) && !set_path(&mut root, &prefixed, value) {
                return Err(ConfigError::invalid(format!("unknown config key `{key}`")));
            }
        }
        let updated: PlannerConfig =
            root.try_into().map_err(|e: toml::de::Error| ConfigError::invalid(e.to_string()))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }
}

/// The primitive set as `[[primitive]]` tables, ready to paste into a config file.
pub fn primitives_toml(set: &PrimitiveSet) -> String {
    toml::to_string(set).expect("primitives serialize")
}

fn parse_value(raw: &str) -> toml::Value {
    if let Ok(i) = raw.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return toml::Value::Float(f);
    }
    if let Ok(b) = raw.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    toml::Value::String(raw.trim_matches('"').to_string())
}

/// Replaces an existing leaf; integers written into float fields are widened.
fn set_path(root: &mut toml::Value, path: &[&str], value: toml::Value) -> bool {
    let Some((last, parents)) = path.split_last() else { return false };
    let mut cur = root;
    for p in parents {
        match cur.get_mut(*p) {
            Some(v) => cur = v,
            None => return false,
        }
    }
    let Some(table) = cur.as_table_mut() else { return false };
    let Some(slot) = table.get_mut(*last) else { return false };
    *slot = match (&*slot, value) {
        (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    true
}
