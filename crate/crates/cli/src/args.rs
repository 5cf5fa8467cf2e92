use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub const DEFAULT_TOL: f64 = 1e-7;

/// Coherence costs of quantum channels under maximally incoherent operations.
#[derive(Debug, Parser)]
#[command(name = "miocoh", version, about, long_about = None)]
pub struct Cli {
    /// Solver and rounding tolerance.
    #[arg(long, global = true, env = "MIOCOH_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; figures default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Seed for sampled quantities.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence measures of a state, e.g. `flagpole:d=3,p=0.6`.
    MeasureState { state: String },

    /// Robustness, log-robustness and MIO check of a channel, e.g. `unitary:theta=0.3`.
    MeasureChannel {
        channel: String,
        /// Also estimate the cohering power from this many Haar-random pure inputs.
        #[arg(long)]
        samples: Option<usize>,
    },

    /// One-shot simulation cost in bits.
    SimCost {
        channel: String,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },

    /// Amortized (log-robustness) cost in bits.
    AmortizedCost {
        channel: String,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },

    /// Coherence left after implementing a channel with a rank-k cosdit.
    Recycle {
        channel: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },

    /// Smallest half diamond-norm error reachable with a given resource.
    DiamondError { channel: String, resource: String },

    /// Largest gate fidelity reachable with a given resource.
    GateFidelity { channel: String, resource: String },

    /// Upper bound on the robustness left in the output resource.
    CohLeft {
        channel: String,
        resource: String,
        #[arg(long)]
        epsilon: f64,
        /// Dimension of the returned resource.
        #[arg(long = "ds", default_value_t = 2)]
        d_s: usize,
    },

    /// Flagpole weight that guarantees an exact implementation.
    FlagpoleThreshold {
        channel: String,
        /// Build the implementing operation with a flagpole of this dimension.
        #[arg(long)]
        d: Option<usize>,
    },

    /// Whether one pure state converts into another under MIO.
    Convertible { source: String, target: String },

    /// Reproduce a figure as a sweep table.
    Figure {
        #[arg(value_enum)]
        name: Figure,
        /// Grid steps along θ (fig6, fig7) or resource coherence (fig4).
        #[arg(long)]
        steps: Option<usize>,
        /// Simplex spacing for fig5.
        #[arg(long)]
        resolution: Option<f64>,
    },
}
