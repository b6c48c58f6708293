//! Command-line arguments and the validated run configuration built from them.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use tate_core::algebra::Ring;
use tate_core::catalog::WeightRule;
use tate_core::complex::format::parse_fraction;
use tate_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "tate",
    version,
    about = "Tate homology of equivariant filtered complexes"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The four Tate groups and their canonical maps, degree by degree.
    Diagram(ComplexArgs),
    /// Homology of one truncation window.
    Homology {
        #[command(flatten)]
        input: ComplexArgs,
        /// Lower action cut, as a level.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        /// Upper Hamiltonian action cut, `p/q`.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        /// Upper action cut, as a level.
        #[arg(long, allow_hyphen_values = true)]
        ceiling: Option<i64>,
    },
    /// Eventual image of the Euler-class action on equivariant homology.
    Localize {
        #[command(flatten)]
        input: ComplexArgs,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        a: i64,
        /// Powers of the action tried before a degree counts as undecided.
        #[arg(long, default_value_t = 6)]
        probe_depth: usize,
    },
    /// Direct and inverse limits over a grid of cuts.
    Towers {
        #[command(flatten)]
        input: ComplexArgs,
        /// Comma-separated lower action levels, increasing.
        #[arg(long, allow_hyphen_values = true, default_value = "-4,-3,-2,-1,0")]
        a_list: String,
        /// Comma-separated Hamiltonian cuts `p/q`, increasing; `inf` for no cut.
        #[arg(long, allow_hyphen_values = true, default_value = "0,1,2,inf")]
        b_list: String,
    },
    /// Split of a window into its negative-action part and the rest.
    Backwards {
        #[command(flatten)]
        input: ComplexArgs,
        #[arg(long, allow_hyphen_values = true, default_value_t = -2)]
        a: i64,
    },
    /// Numerical checks of the gradient flows.
    Flow {
        #[command(subcommand)]
        system: FlowSystem,
    },
    /// Divisibility, torsion, rank and the rationals criterion for a sequence presentation.
    GroupQa {
        /// `k+1`, `ones`, `primorial`, `repeat:N`, a constant, or a comma-separated cycle.
        #[arg(long)]
        seq: String,
        #[arg(long, default_value_t = 50)]
        depth: usize,
        /// Divisibility is probed for every prime up to this bound.
        #[arg(long, default_value_t = 23)]
        prime_bound: u64,
        /// Fail unless the group is found to be this one.
        #[arg(long, value_enum)]
        expect: Option<GroupKind>,
    },
    /// Rank comparison for the closed 4-manifold family.
    XnReport {
        /// Largest `n` reported.
        #[arg(long, default_value_t = 10)]
        max_n: u32,
    },
    /// Write an example complex in the JSON complex format.
    Export(ComplexArgs),
}

#[derive(Debug, Subcommand)]
pub enum FlowSystem {
    /// Heat flow of loops on the two-sphere, against the closed form.
    Heat {
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -0.2)]
        s_min: f64,
        #[arg(long, default_value_t = 1.0)]
        s_max: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Connecting orbit between consecutive critical circles.
    Rabinowitz {
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["FROM", "TO"])]
        modes: Vec<i64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    /// The additive rationals.
    Rationals,
    /// Infinite cyclic.
    Integers,
    /// Rank one and torsion-free, but neither of the above.
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleName {
    Cn,
    TStarS2,
    Rabinowitz,
    RabinowitzEquivariant,
    Orbit,
    Torus,
}

#[derive(Clone, Debug, Args)]
pub struct ComplexArgs {
    #[arg(
        long,
        value_enum,
        conflicts_with = "file",
        required_unless_present = "file"
    )]
    pub example: Option<ExampleName>,
    /// A complex in the JSON complex format.
    #[arg(long)]
    pub file: Option<std::path::PathBuf>,
    #[arg(long, default_value = "q")]
    pub ring: String,
    #[arg(long, default_value_t = 6)]
    pub horizon: usize,
    /// Dimension for `cn`, torus dimension for `torus`.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Weights for `t-star-s2`: a constant, a comma-separated cycle, or `affine:SLOPE,INTERCEPT`.
    #[arg(long, default_value = "2")]
    pub weights: String,
    #[arg(long, default_value_t = 1)]
    pub covering: u64,
    /// Make the orbit bad; needs an even covering number.
    #[arg(long)]
    pub bad: bool,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub shift: i64,
    #[arg(long, default_value_t = 2)]
    pub class_bound: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -2)]
    pub d_min: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 8)]
    pub d_max: i64,
}

/// Where the complex comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Source {
    Example {
        name: ExampleName,
        n: usize,
        weights: WeightRule,
        covering: u64,
        good: bool,
        shift: i64,
        class_bound: i64,
    },
    File {
        path: String,
    },
    None,
}

/// Cuts for the tower grid; `None` in `b` is no cut.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridSpec {
    pub a_levels: Vec<i64>,
    pub b_values: Vec<Option<BigRational>>,
}

/// Everything a command needs, checked once before dispatch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub source: Source,
    pub ring: Ring,
    pub horizon: usize,
    pub grid: GridSpec,
    pub degree_window: (i64, i64),
    pub tolerance: Option<f64>,
    pub format: Format,
}

impl RunConfig {
    pub fn bare(command: &str, format: Format) -> Self {
        RunConfig {
            command: command.into(),
            source: Source::None,
            ring: Ring::Rat,
            horizon: 0,
            grid: GridSpec::default(),
            degree_window: (0, 0),
            tolerance: None,
            format,
        }
    }

    pub fn from_complex_args(command: &str, args: &ComplexArgs, format: Format) -> Result<Self> {
        let source = match (&args.example, &args.file) {
            (Some(name), None) => Source::Example {
                name: *name,
                n: args.n,
                weights: parse_weights(&args.weights)?,
                covering: args.covering,
                good: !args.bad,
                shift: args.shift,
                class_bound: args.class_bound,
            },
            (None, Some(path)) => Source::File {
                path: path.display().to_string(),
            },
            _ => {
                return Err(Error::BadParams(
                    "give exactly one of --example and --file".into(),
                ))
            }
        };
        Ok(RunConfig {
            source,
            ring: args.ring.parse()?,
            horizon: args.horizon,
            degree_window: (args.d_min, args.d_max),
            ..RunConfig::bare(command, format)
        })
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.degree_window;
        if lo > hi {
            return Err(Error::BadParams(format!(
                "empty degree window [{lo}, {hi}]"
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::BadParams(format!("tolerance {t} must be positive")));
            }
        }
        if let Source::Example {
            name, n, covering, ..
        } = &self.source
        {
            if matches!(name, ExampleName::Cn | ExampleName::Torus) && *n == 0 {
                return Err(Error::BadParams("--n must be positive".into()));
            }
            if *name == ExampleName::Orbit && *covering == 0 {
                return Err(Error::BadParams("--covering must be positive".into()));
            }
            if matches!(name, ExampleName::Cn | ExampleName::TStarS2) && self.horizon == 0 {
                return Err(Error::BadParams("--horizon must be positive".into()));
            }
        }
        let g = &self.grid;
        if !g.a_levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::BadParams("a levels must increase".into()));
        }
        let key = |b: &Option<BigRational>| (b.is_none(), b.clone());
        if !g.b_values.windows(2).all(|w| key(&w[0]) < key(&w[1])) {
            return Err(Error::BadParams("b values must increase".into()));
        }
        Ok(())
    }
}

pub fn parse_weights(s: &str) -> Result<WeightRule> {
    let bad = || Error::Parse(format!("cannot read weights `{s}`"));
    let ints = |t: &str| -> Result<Vec<i64>> {
        t.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect()
    };
    if let Some(rest) = s.strip_prefix("affine:") {
        let v = ints(rest)?;
        let [slope, intercept] = v[..] else {
            return Err(bad());
        };
        return Ok(WeightRule::Affine { slope, intercept });
    }
    let v = ints(s)?;
    Ok(match v.len() {
        1 => WeightRule::Constant { value: v[0] },
        _ => WeightRule::Cycle { values: v },
    })
}

pub fn parse_a_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad a level `{x}`")))
        })
        .collect()
}

pub fn parse_b_list(s: &str) -> Result<Vec<Option<BigRational>>> {
    s.split(',')
        .map(|x| match x.trim() {
            "inf" | "infinity" => Ok(None),
            t => parse_fraction(t).map(Some),
        })
        .collect()
}
