//! System files: structure, copula and an optional component marginal.

use std::fmt;
use std::path::Path;

use relage_core::distortion::build_distortion;
use relage_core::structures::build_structure;
use relage_core::{
    CopulaError, Distortion, DistortionError, LifetimeError, Marginal, StructureError, StructureFunction, StructureSpec,
    SurvivalCopula,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};

/// An input problem, located by a dotted JSON path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub file: String,
    pub path: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}: {}", self.file, self.message)
        } else {
            write!(f, "{}: at {}: {}", self.file, self.path, self.message)
        }
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureJson {
    PathSets { n: usize, path_sets: Vec<Vec<usize>> },
    KOutOfN { k: usize, n: usize },
    Series { n: usize },
    Parallel { n: usize },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CopulaJson {
    Independence {
        n: Option<usize>,
    },
    Fgm {
        theta: f64,
        n: Option<usize>,
    },
    Gumbel {
        theta: f64,
        n: Option<usize>,
    },
    Clayton {
        theta: f64,
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalJson {
    Weibull { rate: f64, shape: f64 },
    Frechet { scale: f64, shape: f64 },
    Exponential { rate: f64 },
}

/// The raw contents of a system file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub structure: StructureJson,
    pub copula: CopulaJson,
    #[serde(default)]
    pub marginal: Option<MarginalJson>,
}

/// A validated system.
#[derive(Debug, Clone)]
pub struct System {
    pub structure: StructureFunction,
    pub copula: SurvivalCopula,
    pub distortion: Distortion,
    pub marginal: Option<Marginal>,
}

/// A system file read from disk, with the digest of its bytes.
#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub file: String,
    pub sha256: String,
    pub system: System,
}

impl LoadedSystem {
    /// The marginal, or an error naming the missing field.
    pub fn marginal(&self, command: &str) -> Result<Marginal, SpecError> {
        self.system.marginal.ok_or_else(|| SpecError {
            file: self.file.clone(),
            path: "marginal".into(),
            message: format!("missing; `{command}` needs a component lifetime"),
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load(path: &Path) -> Result<LoadedSystem, SpecError> {
    let file = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| SpecError { file: file.clone(), path: String::new(), message: e.to_string() })?;
    let system = parse(&bytes).map_err(|(path, message)| SpecError { file: file.clone(), path, message })?;
    Ok(LoadedSystem { file, sha256: sha256_hex(&bytes), system })
}

/// Parses and validates a system file; errors carry `(json path, message)`.
pub fn parse(bytes: &[u8]) -> Result<System, (String, String)> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let spec: SystemSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        (path, e.into_inner().to_string())
    })?;
    spec.validate()
}

fn structure_path(e: &StructureError) -> &'static str {
    match e {
        StructureError::BadThreshold { .. } => "structure.k",
        StructureError::NoComponents | StructureError::TooManyComponents { .. } => "structure.n",
        _ => "structure.path_sets",
    }
}

fn copula_path(e: &CopulaError) -> String {
    match e {
        CopulaError::InvalidParameter { name, .. } => format!("copula.{name}"),
        CopulaError::ZeroDimension => "structure.n".into(),
        _ => "copula".into(),
    }
}

fn marginal_path(e: &LifetimeError) -> String {
    match e {
        LifetimeError::BadParameter { name, .. } => format!("marginal.{name}"),
        _ => "marginal".into(),
    }
}

impl SystemSpec {
    pub fn validate(&self) -> Result<System, (String, String)> {
        let structure_spec = match &self.structure {
            StructureJson::PathSets { n, path_sets } => StructureSpec::PathSets { n: *n, path_sets: path_sets.clone() },
            StructureJson::KOutOfN { k, n } => StructureSpec::KOutOfN { k: *k, n: *n },
            StructureJson::Series { n } => StructureSpec::KOutOfN { k: *n, n: *n },
            StructureJson::Parallel { n } => StructureSpec::KOutOfN { k: 1, n: *n },
        };
        let structure = build_structure(&structure_spec).map_err(|e| (structure_path(&e).into(), e.to_string()))?;
        let n = structure.n();

        let (declared, copula) = match &self.copula {
            CopulaJson::Independence { n: d } => (*d, SurvivalCopula::independence(n)),
            CopulaJson::Fgm { theta, n: d } => (*d, SurvivalCopula::fgm(*theta, n)),
            CopulaJson::Gumbel { theta, n: d } => (*d, SurvivalCopula::gumbel(*theta, n)),
            CopulaJson::Clayton { theta, n: d } => (*d, SurvivalCopula::clayton(*theta, n)),
        };
        if let Some(d) = declared {
            if d != n {
                return Err(("copula.n".into(), format!("copula dimension {d} differs from structure.n = {n}")));
            }
        }
        let copula = copula.map_err(|e| (copula_path(&e), e.to_string()))?;

        let distortion = build_distortion(&structure, &copula).map_err(|e| {
            let path = match &e {
                DistortionError::InvalidCopula(c) => copula_path(c),
                DistortionError::Structure(s) => structure_path(s).into(),
                _ => "structure".into(),
            };
            (path, e.to_string())
        })?;

        let marginal = self
            .marginal
            .as_ref()
            .map(|m| match *m {
                MarginalJson::Weibull { rate, shape } => Marginal::weibull(rate, shape),
                MarginalJson::Frechet { scale, shape } => Marginal::frechet(scale, shape),
                MarginalJson::Exponential { rate } => Marginal::exponential(rate),
            })
            .transpose()
            .map_err(|e| (marginal_path(&e), e.to_string()))?;

        Ok(System { structure, copula, distortion, marginal })
    }
}
