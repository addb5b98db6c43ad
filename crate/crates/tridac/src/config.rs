//! Run configuration: TOML file sections overridden field by field by
//! command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tridac_core::analysis::{Direction, Sign};
use tridac_core::lattice::Parallelogram;

use crate::error::{Error, Result};
use crate::sampler::RunSpec;

macro_rules! section {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $($(#[$fm])* #[serde(default, skip_serializing_if = "Option::is_none")] pub $field: Option<$ty>,)*
        }

        impl $name {
            /// Fields set in `over` replace those of `self`.
            pub fn merge(self, over: Self) -> Self {
                $name { $($field: over.$field.or(self.$field),)* }
            }
        }
    };
}

section!(
    /// Model parameters.
    Model {
        beta: f64,
        r: f64,
        r_grid: Vec<f64>,
        /// Oracle edge density (exact and audit commands).
        p: f64,
        q: f64,
    }
);

section!(
    /// Where to measure.
    Window {
        /// `"Sa,b,c,d"`, `"S n m"` or `"square n"`.
        region: String,
        /// Box dimensions `[n, m]`, meaning `S_{n,m}`.
        #[serde(rename = "box")]
        box_dims: [u32; 2],
        n: u32,
        n_list: Vec<u32>,
        m_grid: Vec<u32>,
        direction: String,
        sign: String,
        shape: String,
        graph: String,
        spacing: u32,
    }
);

section!(
    /// Chain settings.
    Sampler {
        samples: u32,
        chains: u32,
        burn_in: u32,
        thin: u32,
        seed: u64,
        buffer: u32,
        bootstrap: u32,
        count: u32,
    }
);

section!(
    /// Thresholds and audit settings.
    Check {
        epsilon: f64,
        dr: f64,
        tol: f64,
        mode: String,
    }
);

section!(
    Output {
        out: PathBuf,
    }
);

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default)]
    pub model: Model,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub sampler: Sampler,
    #[serde(default)]
    pub check: Check,
    #[serde(default, skip_serializing)]
    pub output: Output,
}

pub const DEFAULT_CHAINS: u32 = 8;
pub const DEFAULT_SAMPLES: u32 = 100;
pub const DEFAULT_SEED: u64 = 1;
pub const ENV_OUT: &str = "TRIDAC_OUT";

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Flags (`over`) win over the file (`self`).
    pub fn merge(self, over: RunConfig) -> RunConfig {
        RunConfig {
            command: over.command.or(self.command),
            model: self.model.merge(over.model),
            window: self.window.merge(over.window),
            sampler: self.sampler.merge(over.sampler),
            check: self.check.merge(over.check),
            output: self.output.merge(over.output),
        }
    }

    /// `--out`, else `$TRIDAC_OUT`, else `./tridac-out`.
    pub fn out_dir(&self) -> PathBuf {
        self.output
            .out
            .clone()
            .or_else(|| std::env::var_os(ENV_OUT).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("tridac-out"))
    }

    pub fn beta(&self) -> Result<f64> {
        let beta = self.model.beta.ok_or_else(|| missing("model.beta"))?;
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("model.beta: {beta} must be a finite number >= 0")));
        }
        Ok(beta)
    }

    pub fn r(&self) -> Result<f64> {
        let r = self.model.r.ok_or_else(|| missing("model.r"))?;
        unit("model.r", r)
    }

    pub fn r_grid(&self) -> Result<Vec<f64>> {
        let grid = match (&self.model.r_grid, self.model.r) {
            (Some(g), _) => g.clone(),
            (None, Some(r)) => vec![r],
            (None, None) => return Err(missing("model.r_grid")),
        };
        grid.into_iter().map(|r| unit("model.r_grid", r)).collect()
    }

    /// The region from `window.region`, else `window.box`.
    pub fn region(&self) -> Result<Parallelogram> {
        if let Some(s) = &self.window.region {
            return parse_region(s);
        }
        if let Some([n, m]) = self.window.box_dims {
            return Ok(Parallelogram::s(n, m));
        }
        Err(missing("window.region"))
    }

    pub fn n(&self) -> Result<u32> {
        let n = self.window.n.ok_or_else(|| missing("window.n"))?;
        if n == 0 {
            return Err(Error::Config("window.n: must be at least 1".into()));
        }
        Ok(n)
    }

    pub fn direction(&self) -> Result<Direction> {
        match self.window.direction.as_deref().unwrap_or("horizontal") {
            "horizontal" | "h" => Ok(Direction::Horizontal),
            "vertical" | "v" => Ok(Direction::Vertical),
            other => Err(Error::Config(format!("window.direction: {other:?} is not horizontal or vertical"))),
        }
    }

    pub fn sign(&self) -> Result<Sign> {
        match self.window.sign.as_deref().unwrap_or("plus") {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Config(format!("window.sign: {other:?} is not plus or minus"))),
        }
    }

    /// Sampler settings for the given measurement window; `buffer` is used
    /// when the config leaves it unset.
    pub fn run_spec(&self, inner: Parallelogram, buffer: u32) -> Result<RunSpec> {
        let s = &self.sampler;
        let spec = RunSpec {
            beta: self.beta()?,
            inner,
            buffer: s.buffer.unwrap_or(buffer),
            burn_in: s.burn_in.unwrap_or(200),
            thin: s.thin.unwrap_or(10),
            samples: s.samples.unwrap_or(DEFAULT_SAMPLES),
            chains: s.chains.unwrap_or(DEFAULT_CHAINS),
            seed: s.seed.unwrap_or(DEFAULT_SEED),
        };
        if spec.burn_in == 0 {
            return Err(Error::Config("sampler.burn_in: must be at least 1".into()));
        }
        if spec.thin == 0 {
            return Err(Error::Config("sampler.thin: must be at least 1".into()));
        }
        if spec.chains == 0 || spec.samples == 0 {
            return Err(Error::Config("sampler.chains and sampler.samples: must be at least 1".into()));
        }
        Ok(spec)
    }
}

fn missing(field: &str) -> Error {
    Error::Config(format!("{field}: required for this command"))
}

fn unit(field: &str, r: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(Error::Config(format!("{field}: {r} is outside [0, 1]")))
    }
}

/// `"square n"`, `"S n m"` or `"Sa,b,c,d"`.
pub fn parse_region(s: &str) -> Result<Parallelogram> {
    let t: Vec<&str> = s.split_whitespace().collect();
    if t.len() == 2 && t[0] == "square" {
        let n = t[1].parse().map_err(|_| Error::Config(format!("window.region: bad size in {s:?}")))?;
        return Ok(Parallelogram::square(n));
    }
    s.parse().map_err(|e| Error::Config(format!("window.region: {s:?}: {e}")))
}
