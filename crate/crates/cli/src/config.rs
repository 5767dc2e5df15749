//! Experiment configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toda_lab::{ConformalPair, Hamiltonian, Resolution, C64};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub mu: i32,
    pub nu: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Complex numbers are written `[re, im]`.
pub type Pair2 = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    /// `g[k]` multiplies `w^(1−k)`, `f[k]` multiplies `w^k`.
    Explicit {
        g: Vec<Pair2>,
        f: Vec<Pair2>,
    },
    SigmaFromG {
        g: Vec<Pair2>,
    },
    Random {
        seed: u64,
        decay: f64,
        real: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub target: String,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub hamiltonian: Vec<TermSpec>,
    pub pair: PairSpec,
    pub order: usize,
    #[serde(rename = "samples_M")]
    pub samples_m: usize,
    pub eps_fd: f64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

fn complex(v: &[Pair2]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad =
            |field: &str, msg: String| Err(CliError::Usage(format!("field `{field}`: {msg}")));
        if self.order < 4 {
            return bad("order", format!("must be at least 4, got {}", self.order));
        }
        let min = 4 * (2 * self.order + 1);
        if !self.samples_m.is_power_of_two() || self.samples_m < min {
            return bad(
                "samples_M",
                format!("must be a power of two ≥ {min}, got {}", self.samples_m),
            );
        }
        if !(self.eps_fd > 1e-8 && self.eps_fd < 1e-2) {
            return bad(
                "eps_fd",
                format!("must lie in (1e-8, 1e-2), got {}", self.eps_fd),
            );
        }
        if self.hamiltonian.is_empty() {
            return bad("hamiltonian", "needs at least one term".into());
        }
        for (name, tol) in &self.tolerances {
            if tol.is_nan() || *tol < 0.0 {
                return bad(
                    "tolerances",
                    format!("`{name}` must be a nonnegative number"),
                );
            }
        }
        if let PairSpec::Random { decay, .. } = self.pair {
            if !(0.0..1.0).contains(&decay) {
                return bad(
                    "pair.random.decay",
                    format!("must lie in [0, 1), got {decay}"),
                );
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian, CliError> {
        let triples: Vec<(i32, i32, C64)> = self
            .hamiltonian
            .iter()
            .map(|t| (t.mu, t.nu, C64::new(t.re, t.im)))
            .collect();
        Hamiltonian::from_triples(&triples)
            .map_err(|e| CliError::Usage(format!("field `hamiltonian`: {e}")))
    }

    /// The configured pair on a grid of `samples_M` points.
    pub fn pair(&self) -> Result<ConformalPair, CliError> {
        let pair = match &self.pair {
            PairSpec::Explicit { g, f } => {
                ConformalPair::from_coefficients(&complex(g), &complex(f), self.order)
            }
            PairSpec::SigmaFromG { g } => ConformalPair::sigma_conjugate(&complex(g), self.order),
            PairSpec::Random { seed, decay, real } => {
                Ok(ConformalPair::random_pair(*seed, *decay, self.order, *real))
            }
        }
        .map_err(|e| CliError::Usage(format!("field `pair`: {e}")))?;
        let need = Resolution::samples_for(self.order, pair.depth());
        if self.samples_m < need {
            return Err(CliError::Usage(format!(
                "field `samples_M`: {} points cannot resolve series depth {} at order {} (need ≥ {need})",
                self.samples_m,
                pair.depth(),
                self.order
            )));
        }
        Ok(pair.with_samples(self.samples_m))
    }

    /// The `g` coefficients of a `sigma_from_g` pair.
    pub fn sigma_g(&self) -> Result<Vec<C64>, CliError> {
        match &self.pair {
            PairSpec::SigmaFromG { g } => Ok(complex(g)),
            _ => Err(CliError::Usage(
                "field `pair`: this command needs `sigma_from_g`".into(),
            )),
        }
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ID: &str = r#"{
        "hamiltonian": [{"mu": 1, "nu": 1, "re": 1.0, "im": 0.0}],
        "pair": {"explicit": {"g": [[1, 0]], "f": [[0, 0], [1, 0]]}},
        "order": 8, "samples_M": 1024, "eps_fd": 1e-5
    }"#;

    #[test]
    fn parses_identity() {
        let c = ExperimentConfig::from_json(ID).unwrap();
        assert_eq!(c.order, 8);
        assert!(c.pair().is_ok());
        assert!(c.hamiltonian().is_ok());
    }

    #[test]
    fn rejects_unknown_field() {
        let text = ID.replace("\"order\"", "\"ordr\": 3, \"order\"");
        let e = ExperimentConfig::from_json(&text).unwrap_err();
        assert!(e.to_string().contains("line"), "{e}");
    }

    #[test]
    fn invariants() {
        for (from, to) in [
            ("\"order\": 8", "\"order\": 3"),
            ("1024", "1000"),
            ("1e-5", "0.1"),
        ] {
            assert!(
                ExperimentConfig::from_json(&ID.replace(from, to)).is_err(),
                "{to}"
            );
        }
        let small = ExperimentConfig::from_json(&ID.replace("1024", "128")).unwrap();
        assert!(small.pair().is_err());
    }
}
