use miocoh::descriptor::{ChannelDescriptor, StateDescriptor};
use miocoh::implementation::{
    coherence_left_sdp, cost_robustness, gate_fidelity, implementation_error, required_rank, CostReport,
};
use miocoh::measures::{sampled_cohering_power, ChannelReport, CoherenceReport};
use miocoh::resources::{construct_flagpole_simulation, conversion_verdict, flagpole_threshold, Possibility};
use miocoh::{Channel64, FlagpoleSpec64, Hermitian64, PureState64, SimulationQuery64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::{Cli, Command};
use crate::error::CliError;
use crate::figures;
use crate::output::Artifact;

/// Result of a command: what to write and whether the answer was a negative or open verdict.
pub struct Outcome {
    pub artifact: Artifact,
    pub inconclusive: bool,
}

impl Outcome {
    fn done(artifact: Artifact) -> Self {
        Self { artifact, inconclusive: false }
    }
}

fn channel(text: &str) -> Result<Channel64, CliError> {
    Ok(text.parse::<ChannelDescriptor>()?.build()?)
}

fn state(text: &str) -> Result<Hermitian64, CliError> {
    Ok(text.parse::<StateDescriptor>()?.build()?)
}

fn pure_state(text: &str) -> Result<PureState64, CliError> {
    text.parse::<StateDescriptor>()?
        .pure()?
        .ok_or_else(|| CliError::Usage(format!("`{text}` does not name a pure state")))
}

#[derive(Serialize)]
struct ChannelMeasures {
    #[serde(flatten)]
    report: ChannelReport<f64>,
    cohering_power_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled_cohering_power_bits: Option<f64>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = cli.tol;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let record = |v| Artifact::record(v).map(Outcome::done);
    match &cli.command {
        Command::MeasureState { state: s } => record(json!(CoherenceReport::of_state(&state(s)?, tol)?)),
        Command::MeasureChannel { channel: c, samples } => {
            let n = channel(c)?;
            let report = ChannelReport::of_channel(&n, tol)?;
            let sampled = samples
                .map(|k| sampled_cohering_power(&n, k, &mut ChaCha8Rng::seed_from_u64(cli.seed), tol))
                .transpose()?;
            record(json!(ChannelMeasures {
                cohering_power_bits: report.c_lr,
                report,
                sampled_cohering_power_bits: sampled,
            }))
        }
        Command::SimCost { channel: c, epsilon } => {
            let c_r = cost_robustness(&channel(c)?, *epsilon, tol)?;
            let rank = required_rank(c_r, tol);
            record(json!({
                "epsilon": epsilon,
                "robustness": c_r,
                "required_rank": rank,
                "sim_cost_bits": (rank as f64).log2(),
            }))
        }
        Command::AmortizedCost { channel: c, epsilon } => {
            let c_r = cost_robustness(&channel(c)?, *epsilon, tol)?;
            record(json!({ "epsilon": epsilon, "robustness": c_r, "amortized_cost_bits": (1.0 + c_r).log2() }))
        }
        Command::Recycle { channel: c, k, epsilon } => {
            record(json!(CostReport::new(&channel(c)?, *epsilon, Some(*k), tol)?))
        }
        Command::DiamondError { channel: c, resource } => {
            let q = SimulationQuery64::new(channel(c)?, state(resource)?, 0.0)?;
            record(json!({ "error": implementation_error(&q, tol)?.value }))
        }
        Command::GateFidelity { channel: c, resource } => {
            let q = SimulationQuery64::new(channel(c)?, state(resource)?, 0.0)?;
            record(json!({ "fidelity": gate_fidelity(&q, tol)?.value }))
        }
        Command::CohLeft { channel: c, resource, epsilon, d_s } => {
            let q = SimulationQuery64::new(channel(c)?, state(resource)?, *epsilon)?;
            record(json!({ "epsilon": epsilon, "d_s": d_s, "coherence_left": coherence_left_sdp(&q, *d_s, tol)? }))
        }
        Command::FlagpoleThreshold { channel: c, d } => {
            let n = channel(c)?;
            let p = flagpole_threshold(&n, tol)?;
            let mut out = json!({ "threshold": p });
            if let Some(d) = d {
                let sim = construct_flagpole_simulation(&n, &FlagpoleSpec64::new(*d, p)?, tol)?;
                out["d"] = json!(d);
                out["residual"] = json!(sim.residual);
                out["mio_violation"] = json!(sim.mio_violation);
            }
            record(out)
        }
        Command::Convertible { source, target } => {
            let verdict = conversion_verdict(&pure_state(source)?, &pure_state(target)?);
            Ok(Outcome {
                inconclusive: verdict.possible == Possibility::Undetermined,
                artifact: Artifact::record(verdict)?,
            })
        }
        Command::Figure { name, steps, resolution } => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build()?;
            let settings = figures::Settings { tol, seed: cli.seed, steps: *steps, resolution: *resolution };
            let sweep = pool.install(|| figures::figure(*name, &settings))?;
            Ok(Outcome::done(Artifact::Sweep(sweep)))
        }
    }
}
