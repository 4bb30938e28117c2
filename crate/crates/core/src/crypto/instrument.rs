//! Per-thread operation counters.
//!
//! Every group, hash and scalar primitive in [`crate::crypto`] reports itself
//! here. Counts land in one of two buckets: `core` holds the operations the
//! protocol steps themselves perform, `extra` holds verification steps this
//! implementation adds on top (point-mask derivation, redundant commitment
//! checks). Hybrid encryption is counted as a single `pk_encrypt` /
//! `pk_decrypt` event; the curve and hash work inside it is not itemised.

use std::cell::RefCell;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// Counts of primitive operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount {
    pub point_mul: u64,
    pub point_add: u64,
    pub hash: u64,
    pub inversion: u64,
    pub mod_mul: u64,
    pub mod_exp: u64,
    pub bf_check: u64,
    pub pk_encrypt: u64,
    pub pk_decrypt: u64,
    pub point_mask: u64,
}

impl OpCount {
    pub const ZERO: OpCount = OpCount {
        point_mul: 0,
        point_add: 0,
        hash: 0,
        inversion: 0,
        mod_mul: 0,
        mod_exp: 0,
        bf_check: 0,
        pk_encrypt: 0,
        pk_decrypt: 0,
        point_mask: 0,
    };

    fn bump(&mut self, op: Op) {
        let slot = match op {
            Op::PointMul => &mut self.point_mul,
            Op::PointAdd => &mut self.point_add,
            Op::Hash => &mut self.hash,
            Op::Inversion => &mut self.inversion,
            Op::ModMul => &mut self.mod_mul,
            Op::ModExp => &mut self.mod_exp,
            Op::BfCheck => &mut self.bf_check,
            Op::PkEncrypt => &mut self.pk_encrypt,
            Op::PkDecrypt => &mut self.pk_decrypt,
            Op::PointMask => &mut self.point_mask,
        };
        *slot += 1;
    }

    fn zip(self, other: Self, f: impl Fn(u64, u64) -> u64) -> Self {
        OpCount {
            point_mul: f(self.point_mul, other.point_mul),
            point_add: f(self.point_add, other.point_add),
            hash: f(self.hash, other.hash),
            inversion: f(self.inversion, other.inversion),
            mod_mul: f(self.mod_mul, other.mod_mul),
            mod_exp: f(self.mod_exp, other.mod_exp),
            bf_check: f(self.bf_check, other.bf_check),
            pk_encrypt: f(self.pk_encrypt, other.pk_encrypt),
            pk_decrypt: f(self.pk_decrypt, other.pk_decrypt),
            point_mask: f(self.point_mask, other.point_mask),
        }
    }
}

impl Add for OpCount {
    type Output = OpCount;
    fn add(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for OpCount {
    type Output = OpCount;
    fn sub(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a.saturating_sub(b))
    }
}

/// Both buckets at once.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub core: OpCount,
    pub extra: OpCount,
}

impl Add for Tally {
    type Output = Tally;
    fn add(self, rhs: Self) -> Self {
        Tally { core: self.core + rhs.core, extra: self.extra + rhs.extra }
    }
}

impl Sub for Tally {
    type Output = Tally;
    fn sub(self, rhs: Self) -> Self {
        Tally { core: self.core - rhs.core, extra: self.extra - rhs.extra }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    PointMul,
    PointAdd,
    Hash,
    Inversion,
    ModMul,
    ModExp,
    BfCheck,
    PkEncrypt,
    PkDecrypt,
    PointMask,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Core,
    Extra,
    Off,
}

struct State {
    tally: Tally,
    mode: Mode,
}

thread_local! {
    static STATE: RefCell<State> = const {
        RefCell::new(State {
            tally: Tally { core: OpCount::ZERO, extra: OpCount::ZERO },
            mode: Mode::Core,
        })
    };
}

pub(crate) fn record(op: Op) {
    STATE.with(|s| {
        let mut s = s.borrow_mut();
        match s.mode {
            Mode::Core => s.tally.core.bump(op),
            Mode::Extra => s.tally.extra.bump(op),
            Mode::Off => {}
        }
    });
}

fn with_mode<R>(mode: Mode, f: impl FnOnce() -> R) -> R {
    let prev = STATE.with(|s| {
        let mut s = s.borrow_mut();
        let prev = s.mode;
        // Off is sticky: nothing inside an uncounted region is itemised.
        if prev != Mode::Off {
            s.mode = mode;
        }
        prev
    });
    let out = f();
    STATE.with(|s| s.borrow_mut().mode = prev);
    out
}

/// Runs `f` with its operations attributed to the `extra` bucket.
pub fn as_extra<R>(f: impl FnOnce() -> R) -> R {
    with_mode(Mode::Extra, f)
}

/// Runs `f` without recording anything.
pub fn uncounted<R>(f: impl FnOnce() -> R) -> R {
    with_mode(Mode::Off, f)
}

pub fn snapshot() -> Tally {
    STATE.with(|s| s.borrow().tally)
}

pub fn reset() {
    STATE.with(|s| s.borrow_mut().tally = Tally::default());
}

/// Runs `f` and returns the operations it performed on this thread.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, Tally) {
    let before = snapshot();
    let out = f();
    (out, snapshot() - before)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckets_and_suppression() {
        let ((), t) = measure(|| {
            record(Op::Hash);
            as_extra(|| record(Op::PointMul));
            uncounted(|| {
                record(Op::PointAdd);
                as_extra(|| record(Op::PointAdd));
            });
        });
        assert_eq!(t.core.hash, 1);
        assert_eq!(t.extra.point_mul, 1);
        assert_eq!(t.core.point_add + t.extra.point_add, 0);
    }
}
