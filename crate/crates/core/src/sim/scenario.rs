//! Scripted protocol runs loaded from TOML.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::network::{Field, Rule, Scripted};
use super::transcript::Transcript;
use super::world::{rn_name, user_name, World, WorldConfig, WorldError};
use crate::codec::MessageKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    InitialAuth {
        rn: String,
        pool: usize,
    },
    Reauth {
        rn: String,
        pool: usize,
    },
    Group {
        user: String,
        rns: Vec<String>,
    },
    KeyUpdate {
        group: usize,
        #[serde(default)]
        exclude: Vec<usize>,
        #[serde(default)]
        replace: Vec<String>,
    },
    Traffic {
        group: usize,
        frames: u32,
    },
    Handoff {
        pool: usize,
    },
    Resync {
        rn: String,
    },
    Replay {
        kind: MessageKind,
    },
    Adversary {
        rules: Vec<Rule>,
    },
    Corrupt {
        group: usize,
        party: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub world: WorldConfig,
    #[serde(default)]
    pub steps: Vec<Step>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("step {step}: {source}")]
    Step { step: usize, source: WorldError },
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("scenario file: {0}")]
    Parse(#[from] toml::de::Error),
}

/// Result of a scripted run.
#[derive(Debug)]
pub struct ScenarioRun {
    pub world: World,
    pub transcript: Transcript,
    /// Whether every verdict in the run accepted.
    pub all_accepted: bool,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serialises")
    }

    /// Every RN of pool 0 joins, `rn-0-0` moves to pool 1, the user forms a
    /// group with `group_size` RNs, exchanges traffic, replaces party 1 with
    /// a fresh RN and exchanges traffic again.
    pub fn demo(seed: u64, pool_size: u32, group_size: usize) -> Self {
        let pool_size = pool_size.max(group_size as u32 + 2);
        let world = WorldConfig { seed, pools: 2, rns_per_pool: pool_size, users: 1, ..WorldConfig::default() };
        let mut steps: Vec<Step> =
            (0..pool_size as usize).map(|j| Step::InitialAuth { rn: rn_name(0, j), pool: 0 }).collect();
        steps.push(Step::Reauth { rn: rn_name(0, 0), pool: 1 });
        let rns: Vec<String> = (1..=group_size).map(|j| rn_name(0, j)).collect();
        steps.push(Step::Group { user: user_name(0), rns });
        steps.push(Step::Traffic { group: 0, frames: 4 });
        steps.push(Step::KeyUpdate { group: 0, exclude: vec![1], replace: vec![rn_name(0, group_size + 1)] });
        steps.push(Step::Traffic { group: 0, frames: 4 });
        Scenario { world, steps }
    }

    /// Inserts an adversary that corrupts `field` the first time it is sent.
    pub fn with_tamper(mut self, field: Field) -> Self {
        self.steps.insert(0, Step::Adversary { rules: vec![Rule::Tamper { field, nth: Some(0) }] });
        self
    }
}

/// Runs `scenario`; protocol failures become reject verdicts, harness errors
/// (unknown names, bad indices) abort.
pub fn run_protocol_scenario(scenario: &Scenario) -> Result<ScenarioRun, ScenarioError> {
    let mut world = World::new(&scenario.world)?;
    let mut all = true;
    for (i, step) in scenario.steps.iter().enumerate() {
        world.begin_step(i);
        all &= apply(&mut world, i, step).map_err(|source| ScenarioError::Step { step: i, source })?;
    }
    let transcript = world.transcript.clone();
    Ok(ScenarioRun { world, transcript, all_accepted: all })
}

fn apply(world: &mut World, index: usize, step: &Step) -> Result<bool, WorldError> {
    match step {
        Step::InitialAuth { rn, pool } => world.initial_auth(rn, *pool),
        Step::Reauth { rn, pool } => world.reauth(rn, *pool),
        Step::Group { user, rns } => world.form_group(user, rns).map(|(_, ok)| ok),
        Step::KeyUpdate { group, exclude, replace } => world.key_update(*group, exclude, replace),
        Step::Traffic { group, frames } => world.traffic(*group, *frames),
        Step::Handoff { pool } => world.handoff(*pool).map(|_| true),
        Step::Resync { rn } => world.resync(rn).map(|_| true),
        Step::Replay { kind } => world.replay(*kind),
        Step::Adversary { rules } => {
            let seed = world.seed().wrapping_add(index as u64);
            world.net.set_adversary(Box::new(Scripted::new(rules.clone(), seed)));
            world.note(format!("adversary installed with {} rule(s)", rules.len()));
            Ok(true)
        }
        Step::Corrupt { group, party } => world.corrupt(*group, party).map(|_| true),
    }
}
