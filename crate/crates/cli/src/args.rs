//! Command-line arguments and their validation.

use std::fmt;
use std::str::FromStr;

use bounds_core::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::Failure;

/// Smallest accepted exactness threshold in bits.
pub const MIN_THRESHOLD_BITS: u64 = 1 << 10;
/// Largest number of points in a parameter grid.
pub const MAX_GRID_POINTS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "bounds", version, about = "Effective finiteness bounds and desk-scale geometry checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Seed for every random choice; recorded in the output.
    #[arg(long, global = true, env = "BOUNDS_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Values predicted to need more bits than this are kept as towers.
    #[arg(long, global = true, default_value_t = 1 << 24)]
    pub exact_threshold_bits: u64,
    /// Significant decimal digits kept in tower endpoints.
    #[arg(long, global = true, default_value_t = 30)]
    pub precision_digits: u32,
    /// Largest tower height before reporting capacity exceeded.
    #[arg(long, global = true, default_value_t = 256)]
    pub max_tower_height: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// How much of the trace to emit.
    #[arg(long, global = true, value_enum, default_value_t = Verbosity::Full)]
    pub trace: Verbosity,
}

impl Common {
    pub fn context(&self) -> Result<Context, Failure> {
        if self.exact_threshold_bits < MIN_THRESHOLD_BITS {
            return Err(Failure::Invalid(format!(
                "--exact-threshold-bits must be at least {MIN_THRESHOLD_BITS} (got {})",
                self.exact_threshold_bits
            )));
        }
        if self.precision_digits < 6 {
            return Err(Failure::Invalid(format!("--precision-digits must be at least 6 (got {})", self.precision_digits)));
        }
        if self.max_tower_height == 0 {
            return Err(Failure::Invalid("--max-tower-height must be positive".into()));
        }
        Ok(Context {
            exact_threshold_bits: self.exact_threshold_bits,
            precision_digits: self.precision_digits,
            max_height: self.max_tower_height,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    /// Every entry, including the nested inner-bound trace.
    Full,
    /// Top-level entries only.
    Summary,
    /// No trace.
    None,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound on nonisotrivial families of genus-g curves over a genus-q base with s bad places.
    Shafarevich(BoundArgs),
    /// Bound on rational points of a nonisotrivial genus-g curve over a function field.
    Mordell(BoundArgs),
    /// Run the seeded geometry property suites.
    GeomVerify(GeomArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundArgs {
    /// Fiber genus, a value or an inclusive range `a..b`.
    #[arg(long)]
    pub g: Option<Range>,
    /// Base genus, a value or an inclusive range `a..b`.
    #[arg(long)]
    pub q: Option<Range>,
    /// Number of degenerate fibers, a value or an inclusive range `a..b`.
    #[arg(long, default_value = "0")]
    pub s: Range,
    /// Ranges for several parameters at once, e.g. `g=2..3,q=2..4,s=0`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Toy mode: evaluate from hand-injected constants, e.g. `S=1,P=1,cover_sum=36`.
    #[arg(long)]
    pub inject: Option<String>,
}

/// A parameter grid resolved from `--g --q --s` and `--grid`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub g: Range,
    pub q: Range,
    pub s: Range,
}

impl Grid {
    pub fn points(&self) -> Vec<(u64, u64, u64)> {
        let mut out = Vec::new();
        for g in self.g.lo..=self.g.hi {
            for q in self.q.lo..=self.q.hi {
                for s in self.s.lo..=self.s.hi {
                    out.push((g, q, s));
                }
            }
        }
        out
    }

    pub fn is_single(&self) -> bool {
        self.g.is_single() && self.q.is_single() && self.s.is_single()
    }
}

impl BoundArgs {
    pub fn grid(&self) -> Result<Grid, Failure> {
        let (mut g, mut q, mut s) = (self.g, self.q, self.s);
        if let Some(text) = &self.grid {
            for (key, value) in parse_pairs(text)? {
                let r: Range = value.parse().map_err(Failure::Invalid)?;
                match key.as_str() {
                    "g" => g = Some(r),
                    "q" => q = Some(r),
                    "s" => s = r,
                    other => return Err(Failure::Invalid(format!("unknown grid parameter `{other}`; expected g, q or s"))),
                }
            }
        }
        let g = g.ok_or_else(|| Failure::Invalid("missing fiber genus: pass --g or --grid g=...".into()))?;
        let q = q.ok_or_else(|| Failure::Invalid("missing base genus: pass --q or --grid q=...".into()))?;
        let grid = Grid { g, q, s };
        let count = [g, q, s].iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len()));
        if count.map_or(true, |n| n > MAX_GRID_POINTS) {
            return Err(Failure::Invalid(format!("grid has more than {MAX_GRID_POINTS} points")));
        }
        Ok(grid)
    }

    pub fn injections(&self) -> Result<Option<Vec<(String, String)>>, Failure> {
        self.inject.as_deref().map(parse_pairs).transpose()
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeomArgs {
    /// A suite name, a comma-separated list, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Trials per suite; each suite has its own default.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Fixed curve degree for the recovery suite.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Two named curves to compare under the matching projections,
    /// e.g. `twisted-cubic,line`.
    #[arg(long)]
    pub curves: Option<String>,
}

/// Inclusive range of nonnegative integers, written `a` or `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub lo: u64,
    pub hi: u64,
}

impl Range {
    pub fn is_single(&self) -> bool {
        self.lo == self.hi
    }

    fn len(&self) -> usize {
        usize::try_from(self.hi - self.lo).ok().and_then(|n| n.checked_add(1)).unwrap_or(usize::MAX)
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("`{}` is not a nonnegative integer: {e}", t.trim()));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(Range { lo, hi })
    }
}

impl Serialize for Range {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

/// `key=value` pairs separated by commas.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, Failure> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::Invalid(format!("expected key=value, got `{}`", p.trim())))
        })
        .collect()
}
