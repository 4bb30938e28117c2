use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codec::MessageKind;
use crate::group::GroupError;
use crate::pool::{PoolError, Reject};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accept,
    Reject(String),
}

impl Outcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, Outcome::Accept)
    }

    pub fn reject(reason: impl Into<String>) -> Self {
        Outcome::Reject(reason.into())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Accept => f.write_str("accept"),
            Outcome::Reject(r) => write!(f, "reject({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Message { step: usize, seq: u64, label: String, from: String, to: String, kind: String, bytes: String },
    Verdict { step: usize, label: String, subject: String, outcome: Outcome },
    Note { step: usize, text: String },
}

/// Ordered record of every message and decision in a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn verdicts(&self) -> impl Iterator<Item = (&str, &str, &Outcome)> {
        self.events.iter().filter_map(|e| match e {
            Event::Verdict { label, subject, outcome, .. } => Some((label.as_str(), subject.as_str(), outcome)),
            _ => None,
        })
    }

    pub fn rejects(&self) -> usize {
        self.verdicts().filter(|(_, _, o)| !o.is_accept()).count()
    }

    pub fn messages(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Message { .. })).count()
    }

    /// One line per event.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            match e {
                Event::Message { step, seq, label, from, to, kind, bytes } => {
                    out.push_str(&format!(
                        "[{step:>3}] #{seq:<4} {label:<28} {from} -> {to} {kind} ({} bytes)\n",
                        bytes.len() / 2
                    ));
                }
                Event::Verdict { step, label, subject, outcome } => {
                    out.push_str(&format!("[{step:>3}]       {label:<28} {subject}: {outcome}\n"));
                }
                Event::Note { step, text } => out.push_str(&format!("[{step:>3}]       {text}\n")),
            }
        }
        out
    }
}

pub(crate) fn kind_name(kind: Option<MessageKind>) -> String {
    kind.map_or_else(|| "unknown".to_string(), |k| k.label().to_string())
}

/// Short machine-friendly reason for a rejection.
pub trait Reason {
    fn reason(&self) -> String;
}

impl Reason for Reject {
    fn reason(&self) -> String {
        match self {
            Reject::Replayed => "replayed",
            Reject::Unregistered => "unregistered",
            Reject::Malformed => "malformed",
            Reject::PseudonymReplayed => "pseudonym-replayed",
            Reject::NoChain => "no-chain",
            Reject::NoEpoch => "no-epoch",
        }
        .into()
    }
}

impl Reason for PoolError {
    fn reason(&self) -> String {
        match self {
            PoolError::Rejected(r) => r.reason(),
            PoolError::InvalidReport => "invalid-report".into(),
            PoolError::RpmAuthFailed => "rpm-auth-failed".into(),
            PoolError::NoOpenSession => "no-open-session".into(),
            PoolError::NoPriorAuthentication => "no-prior-authentication".into(),
            PoolError::Codec(_) => "malformed".into(),
            other => format!("error: {other}"),
        }
    }
}

impl Reason for GroupError {
    fn reason(&self) -> String {
        match self {
            GroupError::MembershipFailed => "membership-failed",
            GroupError::KeyMismatch => "key-mismatch",
            GroupError::UpdateVerifyFailed => "update-verify-failed",
            GroupError::Decrypt => "decrypt",
            GroupError::WrongSession { .. } => "wrong-session",
            GroupError::Missing(_) => "missing-message",
            GroupError::Phase(_) => "out-of-phase",
            GroupError::Codec(_) => "malformed",
            GroupError::Unregistered => "unregistered",
            _ => return format!("error: {self}"),
        }
        .into()
    }
}
