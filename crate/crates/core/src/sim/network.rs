//! In-process message network with an adversary between every send and
//! delivery.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{peek_kind, MessageKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub seq: u64,
    pub from: String,
    pub to: String,
    /// Protocol step the sender was executing.
    pub label: String,
    pub bytes: Vec<u8>,
    /// Set on messages the adversary injected rather than forwarded.
    pub injected: bool,
}

impl Envelope {
    pub fn kind(&self) -> Option<MessageKind> {
        peek_kind(&self.bytes)
    }
}

/// What the adversary does with one message in flight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tap {
    Pass,
    Drop,
    Replace(Vec<u8>),
}

/// Sees every message before delivery. The network keeps a copy of every
/// message regardless, so eavesdropping needs no hook.
pub trait Adversary {
    fn intercept(&mut self, env: &Envelope) -> Tap;
}

/// Forwards everything unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct PassThrough;

impl Adversary for PassThrough {
    fn intercept(&mut self, _env: &Envelope) -> Tap {
        Tap::Pass
    }
}

/// Named byte ranges inside encoded messages, for scripted tampering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "msg1.c1")]
    Msg1C1,
    #[serde(rename = "msg1.c2")]
    Msg1C2,
    #[serde(rename = "msg1.pid")]
    Msg1Pid,
    #[serde(rename = "reauth.c2")]
    ReauthC2,
    #[serde(rename = "reauth.next_pid")]
    ReauthNextPid,
    #[serde(rename = "confirm.a")]
    ConfirmA,
    #[serde(rename = "membership.share")]
    MembershipShare,
    #[serde(rename = "membership.c")]
    MembershipC,
    #[serde(rename = "masked.payload")]
    MaskedPayload,
    #[serde(rename = "update.ciphertext")]
    UpdateCiphertext,
}

impl Field {
    pub const ALL: [Field; 10] = [
        Field::Msg1C1,
        Field::Msg1C2,
        Field::Msg1Pid,
        Field::ReauthC2,
        Field::ReauthNextPid,
        Field::ConfirmA,
        Field::MembershipShare,
        Field::MembershipC,
        Field::MaskedPayload,
        Field::UpdateCiphertext,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Msg1C1 => "msg1.c1",
            Field::Msg1C2 => "msg1.c2",
            Field::Msg1Pid => "msg1.pid",
            Field::ReauthC2 => "reauth.c2",
            Field::ReauthNextPid => "reauth.next_pid",
            Field::ConfirmA => "confirm.a",
            Field::MembershipShare => "membership.share",
            Field::MembershipC => "membership.c",
            Field::MaskedPayload => "masked.payload",
            Field::UpdateCiphertext => "update.ciphertext",
        }
    }

    pub fn parse(name: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Message kind carrying the field and its byte range in the encoding.
    pub fn location(self) -> (MessageKind, std::ops::Range<usize>) {
        use crate::crypto::curve::{POINT_BYTES as PT, SCALAR_BYTES as SC};
        use crate::crypto::PSEUDONYM_BYTES as ID;
        match self {
            Field::Msg1C1 => (MessageKind::InitialAuthRequest, 1..1 + PT),
            Field::Msg1C2 => (MessageKind::InitialAuthRequest, 1 + PT..1 + PT + SC),
            Field::Msg1Pid => (MessageKind::InitialAuthRequest, 1 + PT + SC..1 + PT + SC + ID),
            Field::ReauthC2 => (MessageKind::ReauthRequest, 1 + PT..1 + PT + 2 * SC),
            Field::ReauthNextPid => (MessageKind::ReauthRequest, 1 + PT + 2 * SC + ID..1 + PT + 2 * SC + 2 * ID),
            Field::ConfirmA => (MessageKind::AuthConfirm, 1..1 + PT),
            Field::MembershipShare => (MessageKind::MembershipShare, 10..10 + PT),
            Field::MembershipC => (MessageKind::MembershipShare, 10 + PT..10 + 2 * PT),
            Field::MaskedPayload => (MessageKind::MaskedShare, 11..11 + SC),
            Field::UpdateCiphertext => (MessageKind::KeyUpdate, 9..crate::group::KEY_UPDATE_BYTES),
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One scripted interference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Rule {
    /// Overwrite the field with random bytes.
    Tamper {
        field: Field,
        nth: Option<usize>,
    },
    /// Flip one bit of the field.
    FlipBit {
        field: Field,
        bit: usize,
        nth: Option<usize>,
    },
    Drop {
        kind: MessageKind,
        nth: Option<usize>,
    },
}

impl Rule {
    fn kind(&self) -> MessageKind {
        match self {
            Rule::Tamper { field, .. } | Rule::FlipBit { field, .. } => field.location().0,
            Rule::Drop { kind, .. } => *kind,
        }
    }

    fn nth(&self) -> Option<usize> {
        match self {
            Rule::Tamper { nth, .. } | Rule::FlipBit { nth, .. } | Rule::Drop { nth, .. } => *nth,
        }
    }
}

/// Applies [`Rule`]s to matching messages. `nth` (0-based, counted per
/// kind) restricts a rule to one occurrence; `None` hits every occurrence.
#[derive(Clone, Debug)]
pub struct Scripted {
    rules: Vec<Rule>,
    seen: BTreeMap<MessageKind, usize>,
    rng: ChaCha20Rng,
    /// Rules that fired, in order.
    pub fired: Vec<(u64, Rule)>,
}

impl Scripted {
    pub fn new(rules: Vec<Rule>, seed: u64) -> Self {
        Scripted { rules, seen: BTreeMap::new(), rng: ChaCha20Rng::seed_from_u64(seed), fired: Vec::new() }
    }
}

impl Adversary for Scripted {
    fn intercept(&mut self, env: &Envelope) -> Tap {
        let Some(kind) = env.kind() else { return Tap::Pass };
        let count = self.seen.entry(kind).or_insert(0);
        let index = *count;
        *count += 1;
        let mut bytes = env.bytes.clone();
        let mut touched = false;
        for rule in &self.rules {
            if rule.kind() != kind || rule.nth().is_some_and(|n| n != index) {
                continue;
            }
            self.fired.push((env.seq, rule.clone()));
            match rule {
                Rule::Drop { .. } => return Tap::Drop,
                Rule::Tamper { field, .. } => {
                    let range = field.location().1;
                    let original = bytes[range.clone()].to_vec();
                    loop {
                        self.rng.fill(&mut bytes[range.clone()]);
                        if bytes[range.clone()] != original[..] {
                            break;
                        }
                    }
                }
                Rule::FlipBit { field, bit, .. } => {
                    let range = field.location().1;
                    let bit = bit % (8 * range.len());
                    bytes[range.start + bit / 8] ^= 1 << (bit % 8);
                }
            }
            touched = true;
        }
        if touched {
            Tap::Replace(bytes)
        } else {
            Tap::Pass
        }
    }
}

/// Per-receiver FIFO queues plus a full log of what was sent and what was
/// delivered.
pub struct SimNetwork {
    queues: BTreeMap<String, VecDeque<Envelope>>,
    adversary: Box<dyn Adversary + Send>,
    next_seq: u64,
    /// Everything senders handed to the network (the eavesdropper's view).
    pub sent: Vec<Envelope>,
    /// Everything that reached a receiver queue, after interference.
    pub delivered: Vec<Envelope>,
    bytes_by_label: BTreeMap<String, u64>,
    bytes_by_kind: BTreeMap<MessageKind, u64>,
    bytes_total: u64,
}

impl std::fmt::Debug for SimNetwork {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimNetwork").field("sent", &self.sent.len()).field("bytes", &self.bytes_total).finish()
    }
}

impl Default for SimNetwork {
    fn default() -> Self {
        SimNetwork::new(Box::new(PassThrough))
    }
}

impl SimNetwork {
    pub fn new(adversary: Box<dyn Adversary + Send>) -> Self {
        SimNetwork {
            queues: BTreeMap::new(),
            adversary,
            next_seq: 0,
            sent: Vec::new(),
            delivered: Vec::new(),
            bytes_by_label: BTreeMap::new(),
            bytes_by_kind: BTreeMap::new(),
            bytes_total: 0,
        }
    }

    pub fn set_adversary(&mut self, adversary: Box<dyn Adversary + Send>) {
        self.adversary = adversary;
    }

    fn enqueue(&mut self, env: Envelope) {
        self.delivered.push(env.clone());
        self.queues.entry(env.to.clone()).or_default().push_back(env);
    }

    /// Sends `bytes`, counting them against `label`. Returns the sequence
    /// number assigned to the message.
    pub fn send(&mut self, from: &str, to: &str, label: &str, bytes: Vec<u8>) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        let env = Envelope { seq, from: from.into(), to: to.into(), label: label.into(), bytes, injected: false };
        let len = env.bytes.len() as u64;
        *self.bytes_by_label.entry(env.label.clone()).or_insert(0) += len;
        if let Some(kind) = env.kind() {
            *self.bytes_by_kind.entry(kind).or_insert(0) += len;
        }
        self.bytes_total += len;
        self.sent.push(env.clone());
        match self.adversary.intercept(&env) {
            Tap::Pass => self.enqueue(env),
            Tap::Drop => {}
            Tap::Replace(bytes) => self.enqueue(Envelope { bytes, ..env }),
        }
        seq
    }

    /// Adversary-originated message, e.g. a replay of something in `sent`.
    /// Not counted as protocol traffic.
    pub fn inject(&mut self, mut env: Envelope) {
        env.seq = self.next_seq;
        self.next_seq += 1;
        env.injected = true;
        self.enqueue(env);
    }

    pub fn recv(&mut self, to: &str) -> Option<Envelope> {
        self.queues.get_mut(to)?.pop_front()
    }

    pub fn pending(&self, to: &str) -> usize {
        self.queues.get(to).map_or(0, VecDeque::len)
    }

    /// Most recent sent message of `kind`.
    pub fn last_sent(&self, kind: MessageKind) -> Option<&Envelope> {
        self.sent.iter().rev().find(|e| e.kind() == Some(kind))
    }

    pub fn bytes_total(&self) -> u64 {
        self.bytes_total
    }

    pub fn bytes_by_label(&self) -> &BTreeMap<String, u64> {
        &self.bytes_by_label
    }

    pub fn bytes_by_kind(&self) -> &BTreeMap<MessageKind, u64> {
        &self.bytes_by_kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(kind: MessageKind, len: usize) -> Vec<u8> {
        let mut b = vec![0u8; len];
        b[0] = kind as u8;
        b
    }

    #[test]
    fn pass_through_is_lossless_and_ordered() {
        let mut net = SimNetwork::default();
        for i in 0..20u8 {
            let mut b = msg(MessageKind::AuthConfirm, 34);
            b[1] = i;
            net.send("a", "b", "x", b);
        }
        for i in 0..20u8 {
            assert_eq!(net.recv("b").unwrap().bytes[1], i);
        }
        assert!(net.recv("b").is_none());
        assert_eq!(net.bytes_total(), 20 * 34);
    }

    #[test]
    fn scripted_rules_hit_the_right_occurrence() {
        let rules = vec![
            Rule::FlipBit { field: Field::Msg1C2, bit: 3, nth: Some(1) },
            Rule::Drop { kind: MessageKind::AuthConfirm, nth: None },
        ];
        let mut net = SimNetwork::new(Box::new(Scripted::new(rules, 1)));
        let m = msg(MessageKind::InitialAuthRequest, 86);
        net.send("rn", "rpm", "a", m.clone());
        net.send("rn", "rpm", "a", m.clone());
        net.send("rpm", "rn", "b", msg(MessageKind::AuthConfirm, 34));
        assert_eq!(net.recv("rpm").unwrap().bytes, m);
        let tampered = net.recv("rpm").unwrap().bytes;
        assert_eq!(tampered[34], 1 << 3);
        assert!(net.recv("rn").is_none());
        // Dropped traffic still counts as sent.
        assert_eq!(net.bytes_total(), 86 * 2 + 34);
    }

    #[test]
    fn field_ranges_fit_their_messages() {
        use crate::group::{KEY_UPDATE_BYTES, MASKED_SHARE_BYTES, MEMBERSHIP_SHARE_BYTES};
        use crate::pool::messages::*;
        for f in Field::ALL {
            let (kind, r) = f.location();
            let len = match kind {
                MessageKind::InitialAuthRequest => INITIAL_AUTH_REQUEST_BYTES,
                MessageKind::ReauthRequest => REAUTH_REQUEST_BYTES,
                MessageKind::AuthConfirm => AUTH_CONFIRM_BYTES,
                MessageKind::MembershipShare => MEMBERSHIP_SHARE_BYTES,
                MessageKind::MaskedShare => MASKED_SHARE_BYTES,
                MessageKind::KeyUpdate => KEY_UPDATE_BYTES,
                _ => unreachable!(),
            };
            assert!(r.end <= len && !r.is_empty(), "{f}");
            assert_eq!(Field::parse(f.name()), Some(f));
        }
    }
}
