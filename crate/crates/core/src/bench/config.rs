//! Experiment configuration files.
//!
//! A config is a TOML document (or JSON, chosen by the `.json` extension)
//! describing one instance, one starting point and a list of methods. Unknown
//! keys are rejected so that typos surface as errors instead of silently
//! falling back to defaults.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::instance::RandomSpec;
use super::BenchError;
use crate::isometry::OperatorLiteral;
use crate::methods::MethodTag;
use crate::numerics::Tolerance;
use crate::subspace::SubspaceLiteral;

fn default_max_iters() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub ambient_dim: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Early stop on step length; 0 runs every iteration.
    #[serde(default)]
    pub stop_tol: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerance: Tolerance,
    pub instance: InstanceSource,
    #[serde(default)]
    pub x0: StartSource,
    pub methods: Vec<MethodEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    /// Linear subspaces given by literals.
    Explicit { subspaces: Vec<SubspaceLiteral> },
    Random {
        count: usize,
        dim_range: [usize; 2],
        #[serde(default)]
        common_dim: usize,
        /// Overrides the top-level seed for the instance draw.
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum StartSource {
    Explicit {
        point: Vec<f64>,
    },
    #[default]
    RandomSphere,
}

/// How the operator set of a circumcentered method is assembled from the
/// instance reflectors `R_1, …, R_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// All increasing products of `R_1, …, R_m`, identity included.
    Psi,
    /// Products over the palindromic list `R_1, …, R_m, …, R_1`.
    PsiSymmetric,
    /// `{Id, R_1, …, R_m}`.
    IdentityPlusReflectors,
    /// `{Id, R_1, R_2 R_1, …, R_m ⋯ R_1}`.
    IdentityPlusPrefixProducts,
    /// Operators listed in the method entry.
    Custom,
}

impl Recipe {
    pub fn as_str(&self) -> &'static str {
        match self {
            Recipe::Psi => "psi",
            Recipe::PsiSymmetric => "psi_symmetric",
            Recipe::IdentityPlusReflectors => "identity_plus_reflectors",
            Recipe::IdentityPlusPrefixProducts => "identity_plus_prefix_products",
            Recipe::Custom => "custom",
        }
    }
}

/// Projector products available as the operator of accelerated MAP and as
/// prefixes applied to the starting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    /// `P_1 ⋯ P_m ⋯ P_1`.
    SymProduct,
    /// `P_m ⋯ P_1`.
    MapProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockModeKind {
    Compose,
    Convex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodEntry {
    pub name: String,
    pub method: MethodTag,
    #[serde(default)]
    pub recipe: Option<Recipe>,
    #[serde(default)]
    pub prefix: Option<ProductKind>,
    #[serde(default)]
    pub operator: Option<ProductKind>,
    #[serde(default)]
    pub mode: Option<BlockModeKind>,
    #[serde(default)]
    pub operators: Vec<OperatorLiteral>,
    #[serde(default)]
    pub max_iters: Option<usize>,
}

impl ExperimentConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        let cfg = if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        };
        cfg.map_err(|message| BenchError::Config {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.ambient_dim == 0 {
            return Err("ambient_dim must be at least 1".into());
        }
        if !(self.stop_tol.is_finite() && self.stop_tol >= 0.0) {
            return Err(format!("stop_tol must be finite and >= 0, got {}", self.stop_tol));
        }
        self.tolerance.validate().map_err(|e| e.to_string())?;
        match &self.instance {
            InstanceSource::Explicit { subspaces } => {
                if subspaces.is_empty() {
                    return Err("instance.subspaces must not be empty".into());
                }
                for (i, s) in subspaces.iter().enumerate() {
                    let bad = s.anchor.len() != self.ambient_dim
                        || s.span.iter().any(|v| v.len() != self.ambient_dim);
                    if bad {
                        return Err(format!(
                            "instance.subspaces[{i}]: vectors must have length {}",
                            self.ambient_dim
                        ));
                    }
                }
            }
            InstanceSource::Random {
                count,
                dim_range,
                common_dim,
                ..
            } => RandomSpec {
                count: *count,
                dim_range: *dim_range,
                common_dim: *common_dim,
            }
            .validate(self.ambient_dim)
            .map_err(|e| format!("instance: {e}"))?,
        }
        if let StartSource::Explicit { point } = &self.x0 {
            if point.len() != self.ambient_dim {
                return Err(format!("x0.point must have length {}", self.ambient_dim));
            }
        }
        if self.methods.is_empty() {
            return Err("at least one [[methods]] entry is required".into());
        }
        let mut names = BTreeSet::new();
        for (i, m) in self.methods.iter().enumerate() {
            let ok_name = !m.name.is_empty()
                && m.name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if !ok_name {
                return Err(format!(
                    "methods[{i}].name {:?} must be nonempty and use only [A-Za-z0-9_-]",
                    m.name
                ));
            }
            if !names.insert(m.name.as_str()) {
                return Err(format!("methods[{i}]: duplicate name {:?}", m.name));
            }
            m.validate().map_err(|e| format!("methods[{i}] ({}): {e}", m.name))?;
        }
        Ok(())
    }
}

impl MethodEntry {
    fn validate(&self) -> Result<(), String> {
        use MethodTag::*;
        let recipe_ok = match self.method {
            Cim => true,
            AveragedIter => matches!(
                self.recipe,
                None | Some(Recipe::IdentityPlusReflectors | Recipe::IdentityPlusPrefixProducts)
            ),
            _ => self.recipe.is_none(),
        };
        if !recipe_ok {
            return Err(format!("recipe is not valid for method {}", self.method));
        }
        if self.operator.is_some() && self.method != AccelMap {
            return Err("operator applies to accel_map only".into());
        }
        if self.mode.is_some() && self.method != BlockwiseCim {
            return Err("mode applies to blockwise_cim only".into());
        }
        if self.prefix.is_some() && self.method == Dr {
            return Err("dr does not take a prefix".into());
        }
        let custom = self.method == Cim && self.recipe == Some(Recipe::Custom);
        if custom && self.operators.is_empty() {
            return Err("recipe custom needs a nonempty operators list".into());
        }
        if !custom && !self.operators.is_empty() {
            return Err("operators are only read by recipe custom".into());
        }
        Ok(())
    }

    pub fn recipe(&self) -> Recipe {
        self.recipe.unwrap_or(match self.method {
            MethodTag::AveragedIter => Recipe::IdentityPlusReflectors,
            _ => Recipe::Psi,
        })
    }
}
