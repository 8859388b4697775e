use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pdmap::{DeltaFloor, EpsilonSchedule, PdMap};
use crate::problems::{DEFAULT_BATCH, DEFAULT_KAPPA, SKEWED_QUARTIC_NOISE_VARIANCE};
use crate::schedule::{GainSchedule, WeightSchedule};
use crate::solvers::SecondPerturbation;
use crate::solvers::SolverConfig;

/// Environment variable that replaces `base_seed` when set.
pub const SEED_ENV: &str = "STEINZO_SEED";

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    SkewedQuartic {
        dim: usize,
        noise_variance: f64,
    },
    /// Diagonal quadratic `theta^T diag(h) theta / 2`.
    Quadratic {
        diagonal: Vec<f64>,
        noise_variance: f64,
    },
    CorrEntropy {
        data: DataSource,
        kappa: f64,
        batch: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Libsvm { path: PathBuf, dim: Option<usize> },
    Synthetic { dim: usize, samples: usize, separation: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    FirstOrder,
    Stein2,
    Spsa2,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::FirstOrder => "first_order",
            SolverKind::Stein2 => "stein2",
            SolverKind::Spsa2 => "2spsa",
        }
    }
}

/// Starting point, shared by all replicates unless it is random.
#[derive(Clone, Debug, PartialEq)]
pub enum InitSpec {
    Constant(f64),
    /// Independent `U(-r, r)` entries, drawn per replicate.
    Uniform(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub solver: SolverKind,
    pub schedule: GainSchedule,
    /// Second 2SPSA perturbation; defaults to the `c`, `gamma` of `schedule`.
    pub second_perturbation: SecondPerturbation,
    pub pd_map: PdMap,
    pub queries_per_iter: u64,
    pub iterations: usize,
    pub replicates: usize,
    pub base_seed: u64,
    pub theta0: InitSpec,
    pub blocking: Option<f64>,
    pub warm_start: usize,
    pub output_dir: PathBuf,
}

const KEYS: &[&str] = &[
    "problem",
    "dim",
    "noise_variance",
    "diagonal",
    "data_path",
    "samples",
    "separation",
    "kappa",
    "batch",
    "solver",
    "a",
    "A",
    "alpha",
    "c",
    "gamma",
    "weights",
    "c_tilde",
    "gamma_tilde",
    "pd_map",
    "queries_per_iter",
    "iterations",
    "replicates",
    "base_seed",
    "theta0",
    "blocking",
    "warm_start",
    "output_dir",
];

/// Raw `key = value` pairs before interpretation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are
    /// skipped; repeated keys are an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_pair(line).map_err(|message| Error::Parse {
                line: i + 1,
                message,
            })?;
            if entries.insert(k.clone(), v).is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("duplicate key `{k}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = split_pair(assignment).map_err(Error::Config)?;
        self.entries.insert(k, v);
        Ok(())
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

fn split_pair(s: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected `key = value`, got `{s}`"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(format!("empty key in `{s}`"));
    }
    if !KEYS.contains(&k) {
        return Err(format!("unknown key `{k}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

struct Reader<'a>(&'a RawConfig);

impl Reader<'_> {
    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key)
    }
}

fn float_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}`: bad number `{x}`")))
        })
        .collect()
}

fn parse_weights(s: &str) -> Result<WeightSchedule> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["harmonic"] => Ok(WeightSchedule::Harmonic),
        ["frozen"] => Ok(WeightSchedule::Frozen),
        ["polynomial", w0, omega] => {
            let v = float_list("weights", &format!("{w0},{omega}"))?;
            Ok(WeightSchedule::Polynomial {
                w0: v[0],
                omega: v[1],
            })
        }
        _ => Err(Error::Config(format!(
            "`weights`: expected harmonic, frozen or polynomial:w0:omega, got `{s}`"
        ))),
    }
}

/// `sqrt`, `sqrt:scale:exponent`, `clamp` (tiny relative floor),
/// `clamp:floor`, `damp`, `damp:floor`.
pub fn parse_pd_map(s: &str) -> Result<PdMap> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| {
        x.parse::<f64>()
            .map_err(|_| Error::Config(format!("`pd_map`: bad number `{x}`")))
    };
    let map = match parts.as_slice() {
        ["sqrt"] => PdMap::SqrtMap {
            epsilon: EpsilonSchedule::default(),
        },
        ["sqrt", scale, exponent] => PdMap::SqrtMap {
            epsilon: EpsilonSchedule {
                scale: num(scale)?,
                exponent: num(exponent)?,
            },
        },
        ["clamp"] => PdMap::EigenClamp {
            floor: DeltaFloor::tiny(),
        },
        ["clamp", f] => PdMap::EigenClamp {
            floor: DeltaFloor::absolute(num(f)?),
        },
        ["damp"] => PdMap::DampShift {
            floor: DeltaFloor::tiny(),
        },
        ["damp", f] => PdMap::DampShift {
            floor: DeltaFloor::absolute(num(f)?),
        },
        _ => {
            return Err(Error::Config(format!(
                "`pd_map`: expected sqrt[:scale:exponent], clamp[:floor] or damp[:floor], got `{s}`"
            )))
        }
    };
    map.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(map)
}

fn parse_init(s: &str) -> Result<InitSpec> {
    let bad = || Error::Config(format!("`theta0`: expected ones, zeros, const:x or uniform:r, got `{s}`"));
    match s.split_once(':') {
        None if s == "ones" => Ok(InitSpec::Constant(1.0)),
        None if s == "zeros" => Ok(InitSpec::Constant(0.0)),
        Some(("const", x)) => x
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(InitSpec::Constant)
            .ok_or_else(bad),
        Some(("uniform", r)) => r
            .parse::<f64>()
            .ok()
            .filter(|r| r.is_finite() && *r > 0.0)
            .map(InitSpec::Uniform)
            .ok_or_else(bad),
        _ => Err(bad()),
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidInput(m) => Error::Config(m),
        other => other,
    }
}

impl ExperimentConfig {
    /// Reads a config file, applies `STEINZO_SEED` from the environment, then
    /// the `--set` overrides in order.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let mut raw = RawConfig::load(path)?;
        if let Ok(seed) = std::env::var(SEED_ENV) {
            raw.insert("base_seed", seed);
        }
        for o in overrides {
            raw.set(o)?;
        }
        Self::from_raw(&raw)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let r = Reader(raw);
        let problem = match r.str("problem") {
            Some("skewed_quartic") => ProblemSpec::SkewedQuartic {
                dim: r.or("dim", 20)?,
                noise_variance: r.or("noise_variance", SKEWED_QUARTIC_NOISE_VARIANCE)?,
            },
            Some("quadratic") => ProblemSpec::Quadratic {
                diagonal: float_list(
                    "diagonal",
                    r.str("diagonal")
                        .ok_or_else(|| Error::Config("quadratic needs `diagonal`".into()))?,
                )?,
                noise_variance: r.or("noise_variance", 0.0)?,
            },
            Some("correntropy") => {
                let data = match r.str("data_path") {
                    Some(p) => DataSource::Libsvm {
                        path: PathBuf::from(p),
                        dim: r.parse("dim")?,
                    },
                    None => DataSource::Synthetic {
                        dim: r.or("dim", 10)?,
                        samples: r.or("samples", 1000)?,
                        separation: r.or("separation", 5.0)?,
                    },
                };
                ProblemSpec::CorrEntropy {
                    data,
                    kappa: r.or("kappa", DEFAULT_KAPPA)?,
                    batch: r.or("batch", DEFAULT_BATCH)?,
                }
            }
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown problem `{other}` (expected skewed_quartic, quadratic or correntropy)"
                )))
            }
            None => return Err(Error::Config("missing required key `problem`".into())),
        };
        let solver = match r.str("solver").unwrap_or("stein2") {
            "first_order" => SolverKind::FirstOrder,
            "stein2" => SolverKind::Stein2,
            "2spsa" => SolverKind::Spsa2,
            other => {
                return Err(Error::Config(format!(
                    "unknown solver `{other}` (expected first_order, stein2 or 2spsa)"
                )))
            }
        };
        let iterations: usize = r.required("iterations")?;
        let weights = parse_weights(r.str("weights").unwrap_or("harmonic"))?;
        let schedule = GainSchedule::new(
            r.or("a", 1.0)?,
            r.or("A", 0.1 * iterations as f64)?,
            r.or("alpha", 0.602)?,
            r.or("c", 1.0)?,
            r.or("gamma", 0.101)?,
            weights,
        )
        .map_err(config_err)?;
        let second_perturbation = SecondPerturbation {
            c: r.or("c_tilde", schedule.c())?,
            gamma: r.or("gamma_tilde", schedule.gamma())?,
        };
        second_perturbation.validate().map_err(config_err)?;
        let blocking = match r.str("blocking") {
            None | Some("off") => None,
            Some(v) => Some(
                v.parse::<f64>()
                    .ok()
                    .filter(|t| *t > 0.0)
                    .ok_or_else(|| Error::Config(format!("`blocking`: expected off or a positive tolerance, got `{v}`")))?,
            ),
        };
        let config = Self {
            problem,
            solver,
            schedule,
            second_perturbation,
            pd_map: parse_pd_map(r.str("pd_map").unwrap_or("sqrt"))?,
            queries_per_iter: r.or("queries_per_iter", 12)?,
            iterations,
            replicates: r.or("replicates", 1)?,
            base_seed: r.or("base_seed", 0)?,
            theta0: parse_init(r.str("theta0").unwrap_or("ones"))?,
            blocking,
            warm_start: r.or("warm_start", 0)?,
            output_dir: PathBuf::from(r.str("output_dir").unwrap_or("out")),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("`replicates` must be positive".into()));
        }
        match &self.problem {
            ProblemSpec::SkewedQuartic { dim, noise_variance }
                if *dim == 0 || !(*noise_variance >= 0.0) =>
            {
                return Err(Error::Config("skewed_quartic needs dim > 0 and noise_variance >= 0".into()))
            }
            ProblemSpec::Quadratic { diagonal, noise_variance }
                if diagonal.is_empty()
                    || diagonal.iter().any(|h| !(*h > 0.0 && h.is_finite()))
                    || !(*noise_variance >= 0.0) =>
            {
                return Err(Error::Config(
                    "quadratic needs a positive finite diagonal and noise_variance >= 0".into(),
                ))
            }
            ProblemSpec::CorrEntropy { kappa, batch, .. } if !(*kappa > 0.0) || *batch == 0 => {
                return Err(Error::Config("correntropy needs kappa > 0 and batch > 0".into()))
            }
            _ => {}
        }
        self.solver_config().validate_for(self.bundle_cost())?;
        Ok(())
    }

    pub fn bundle_cost(&self) -> u64 {
        match self.solver {
            SolverKind::FirstOrder => 2,
            SolverKind::Stein2 => crate::estimators::SHARED_BUNDLE_QUERIES,
            SolverKind::Spsa2 => crate::solvers::spsa2::BUNDLE_QUERIES,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        let mut c = SolverConfig::new(self.schedule, self.iterations, self.queries_per_iter)
            .with_pd_map(self.pd_map)
            .with_warm_start(self.warm_start);
        if let Some(t) = self.blocking {
            c = c.with_blocking(t);
        }
        c
    }
}
