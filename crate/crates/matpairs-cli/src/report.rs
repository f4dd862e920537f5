//! Seeded plant-and-recover runs. The report depends only on the flags, so two
//! runs with the same seed produce identical bytes.

use matpairs::blocks::Flavor;
use matpairs::congruence::EigenBackend;
use matpairs::fuzz;
use matpairs::pairs::{pair_canonical, structured_pair_canonical};
use matpairs::Kind;
use serde::{Deserialize, Serialize};

use crate::dto::{FlavorTag, KindTag, PairFile, StructureFile, StructuredFormDto};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Planted {
    Structure(StructureFile),
    Structured(StructuredFormDto),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub trial: u64,
    pub planted: Planted,
    pub recovered: Option<Planted>,
    pub error: Option<String>,
    /// Structured runs only: the returned witness maps the input onto the canonical pair exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_exact: Option<bool>,
    /// The scrambled input, kept only for failing trials.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PairFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessResiduals {
    /// Some returned witness failed to reproduce its canonical pair entry for entry.
    pub max_exact_mismatch: bool,
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub schema_version: String,
    pub seed: u64,
    pub trials: u64,
    pub max_dim: usize,
    pub bound: i64,
    pub kind: KindTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flavor: Option<FlavorTag>,
    pub results: Vec<Trial>,
    pub mismatches: Vec<u64>,
    pub witness_residuals: WitnessResiduals,
}

pub struct FuzzConfig {
    pub seed: u64,
    pub trials: u64,
    pub max_dim: usize,
    pub bound: i64,
    pub kind: Kind,
    pub flavor: Option<Flavor>,
}

pub fn run(cfg: &FuzzConfig) -> Result<FuzzReport, CliError> {
    if cfg.max_dim == 0 {
        return Err(CliError::Parse("--max-dim must be at least 1".into()));
    }
    if let Some(f) = cfg.flavor {
        if f.kind() != cfg.kind {
            return Err(CliError::Parse(format!("flavor {} belongs to kind {}", f.name(), f.kind().name())));
        }
        if f == Flavor::SkewSymT && cfg.max_dim < 2 {
            return Err(CliError::Parse("skew-sym needs --max-dim of at least 2".into()));
        }
    }
    let mut results = Vec::new();
    let mut residuals = WitnessResiduals { max_exact_mismatch: false, checked: 0 };
    for trial in 0..cfg.trials {
        let mut rng = fuzz::trial_rng(cfg.seed, trial);
        let t = match cfg.flavor {
            None => structure_trial(cfg, trial, &mut rng)?,
            Some(flavor) => {
                let t = structured_trial(cfg, flavor, trial, &mut rng);
                if let Some(ok) = t.witness_exact {
                    residuals.checked += 1;
                    residuals.max_exact_mismatch |= !ok;
                }
                t
            }
        };
        results.push(t);
    }
    let mismatches = results
        .iter()
        .filter(|t| t.recovered.as_ref() != Some(&t.planted) || t.witness_exact == Some(false))
        .map(|t| t.trial)
        .collect();
    Ok(FuzzReport {
        schema_version: crate::dto::SCHEMA_VERSION.into(),
        seed: cfg.seed,
        trials: cfg.trials,
        max_dim: cfg.max_dim,
        bound: cfg.bound,
        kind: cfg.kind.into(),
        flavor: cfg.flavor.map(Into::into),
        results,
        mismatches,
        witness_residuals: residuals,
    })
}

fn structure_trial(cfg: &FuzzConfig, trial: u64, rng: &mut fuzz::FuzzRng) -> Result<Trial, CliError> {
    let s = fuzz::random_structure(rng, cfg.kind, cfg.max_dim);
    let (plant, e, q) = fuzz::planted_pair(rng, &s, cfg.bound);
    let planted = Planted::Structure(StructureFile::from_pair_structure(&plant)?);
    let (recovered, error) = match pair_canonical(&e, &q, cfg.kind, EigenBackend::ExactCandidates) {
        Ok(p) => (Some(Planted::Structure(StructureFile::from_pair_structure(&p)?)), None),
        Err(err) => (None, Some(err.to_string())),
    };
    let failed = recovered.as_ref() != Some(&planted);
    Ok(Trial { trial, planted, recovered, error, witness_exact: None, input: failed.then(|| PairFile::from_pair(&e, &q)) })
}

fn structured_trial(cfg: &FuzzConfig, flavor: Flavor, trial: u64, rng: &mut fuzz::FuzzRng) -> Trial {
    let f = fuzz::random_structured_form(rng, flavor, cfg.max_dim);
    let (e, q) = fuzz::planted_structured(rng, &f, cfg.bound);
    let planted = Planted::Structured(StructuredFormDto::from_form(&f));
    let (recovered, error, witness_exact) = match structured_pair_canonical(&e, &q, cfg.kind, Some(flavor)) {
        Ok(got) => {
            let exact = match (&got.witness, got.form.realize()) {
                (Some(w), Ok((ce, cq))) => w.maps((&e, &q), (&ce, &cq)),
                _ => false,
            };
            (Some(Planted::Structured(StructuredFormDto::from_form(&got.form))), got.witness_note, Some(exact))
        }
        Err(err) => (None, Some(err.to_string()), None),
    };
    let failed = recovered.as_ref() != Some(&planted) || witness_exact != Some(true);
    Trial { trial, planted, recovered, error, witness_exact, input: failed.then(|| PairFile::from_pair(&e, &q)) }
}
