use super::messages::{GroupAllocation, KeyUpdate, MaskedShare, MembershipShare, UPDATE_PLAINTEXT_BYTES};
use super::{eval_points, pairwise_distinct, GroupError};
use crate::crypto::hash::xor_into;
use crate::crypto::{
    curve, h4, h5, instrument, lagrange_coeffs_at_zero, pk_decrypt, point_mask, GroupPoint, KeyPair, Pseudonym, Scalar,
};
use crate::pool::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Allocated,
    MembershipVerified,
    Keyed,
}

/// One party's view of a group session.
#[derive(Clone, Debug)]
pub struct GroupParty {
    params: SystemParams,
    keypair: KeyPair,
    session_id: u64,
    index: usize,
    roster: Vec<Pseudonym>,
    lambdas: Vec<Scalar>,
    share: Scalar,
    q: GroupPoint,
    key_digest: [u8; curve::SCALAR_BYTES],
    /// `(f(x_j)·P, C_j)` per party, own entry included.
    points: Vec<Option<(GroupPoint, GroupPoint)>>,
    /// `f(x_i)f(x_j)·P`, computed once per peer.
    dh: Vec<Option<GroupPoint>>,
    recovered: Vec<Option<Scalar>>,
    phase: Phase,
    s_serv: Option<Scalar>,
}

impl GroupParty {
    /// Opens an allocation addressed to `pid`.
    pub fn from_allocation(
        params: SystemParams,
        pid: Pseudonym,
        keypair: KeyPair,
        msg: &GroupAllocation,
    ) -> Result<Self, GroupError> {
        let index = msg.roster.iter().position(|p| *p == pid).ok_or(GroupError::NotInRoster)?;
        let plain = pk_decrypt(&keypair.sk, &msg.share).map_err(|_| GroupError::Decrypt)?;
        let share = Scalar::from_bytes(&plain)?;
        let xs = eval_points(&msg.roster, msg.salt);
        if !pairwise_distinct(&xs) {
            return Err(GroupError::EvaluationPoints(msg.salt));
        }
        let lambdas = lagrange_coeffs_at_zero(&xs)?;
        let n = msg.roster.len();
        Ok(GroupParty {
            params,
            keypair,
            session_id: msg.session_id,
            index,
            roster: msg.roster.clone(),
            lambdas,
            share,
            q: msg.q,
            key_digest: msg.key_digest,
            points: vec![None; n],
            dh: vec![None; n],
            recovered: vec![None; n],
            phase: Phase::Allocated,
            s_serv: None,
        })
    }

    /// A replacement RN joins a keyed session directly through the update.
    pub fn from_update(
        params: SystemParams,
        pid: Pseudonym,
        keypair: KeyPair,
        msg: &KeyUpdate,
    ) -> Result<Self, GroupError> {
        let (s_new, q_old) = open_update(&keypair, msg)?;
        let q_new = verify_update(&params, &s_new, &q_old)?;
        Ok(GroupParty {
            params,
            keypair,
            session_id: msg.session_id,
            index: 0,
            roster: vec![pid],
            lambdas: Vec::new(),
            share: Scalar::ZERO,
            q: q_new,
            key_digest: [0; curve::SCALAR_BYTES],
            points: Vec::new(),
            dh: Vec::new(),
            recovered: Vec::new(),
            phase: Phase::Keyed,
            s_serv: Some(s_new),
        })
    }

    pub fn session_id(&self) -> u64 {
        self.session_id
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn parties(&self) -> usize {
        self.roster.len()
    }

    pub fn roster(&self) -> &[Pseudonym] {
        &self.roster
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn commitment(&self) -> GroupPoint {
        self.q
    }

    pub fn session_key(&self) -> Option<Scalar> {
        self.s_serv
    }

    fn expect_phase(&self, phase: Phase) -> Result<(), GroupError> {
        if self.phase == phase {
            Ok(())
        } else {
            Err(GroupError::Phase(self.phase))
        }
    }

    fn check_session(&self, session_id: u64) -> Result<(), GroupError> {
        if session_id == self.session_id {
            Ok(())
        } else {
            Err(GroupError::WrongSession { expected: self.session_id, got: session_id })
        }
    }

    fn peer(&self, j: u8) -> Result<usize, GroupError> {
        let j = j as usize;
        if j >= self.roster.len() || j == self.index {
            return Err(GroupError::BadIndex(j));
        }
        Ok(j)
    }

    /// `f(x_i)·P` and `C_i = λ_i·f(x_i)·P`, broadcast to every other party.
    pub fn membership_share(&mut self) -> Result<MembershipShare, GroupError> {
        self.expect_phase(Phase::Allocated)?;
        let share_point = GroupPoint::mul_base(&self.share);
        let c_point = share_point.mul(&self.lambdas[self.index]);
        self.points[self.index] = Some((share_point, c_point));
        Ok(MembershipShare { session_id: self.session_id, from: self.index as u8, share_point, c_point })
    }

    pub fn receive_membership(&mut self, msg: &MembershipShare) -> Result<(), GroupError> {
        self.expect_phase(Phase::Allocated)?;
        self.check_session(msg.session_id)?;
        let j = self.peer(msg.from)?;
        self.points[j] = Some((msg.share_point, msg.c_point));
        Ok(())
    }

    /// Accepts iff every `C_j` is `λ_j` times its share point and
    /// `Σ C_j = Q`.
    pub fn verify_membership(&mut self) -> Result<(), GroupError> {
        self.expect_phase(Phase::Allocated)?;
        let mut points = Vec::with_capacity(self.points.len());
        for (j, p) in self.points.iter().enumerate() {
            points.push(p.ok_or(GroupError::Missing(j))?);
        }
        let consistent = instrument::as_extra(|| {
            points.iter().enumerate().filter(|(j, _)| *j != self.index).all(|(j, (y, c))| y.mul(&self.lambdas[j]) == *c)
        });
        let sum = points.iter().fold(GroupPoint::identity(), |acc, (_, c)| acc.add(c));
        if !consistent || sum != self.q {
            return Err(GroupError::MembershipFailed);
        }
        self.phase = Phase::MembershipVerified;
        Ok(())
    }

    fn dh_point(&mut self, j: usize) -> GroupPoint {
        if let Some(d) = self.dh[j] {
            return d;
        }
        let (y, _) = self.points[j].expect("verified membership holds every share point");
        let d = y.mul(&self.share);
        self.dh[j] = Some(d);
        d
    }

    /// `mask(f(x_i)f(x_j)·P) ⊕ f(x_i)` for every `j ≠ i`.
    pub fn masked_shares(&mut self) -> Result<Vec<MaskedShare>, GroupError> {
        self.expect_phase(Phase::MembershipVerified)?;
        let own = self.share.to_bytes();
        let mut out = Vec::with_capacity(self.roster.len() - 1);
        let me = self.index;
        for j in (0..self.roster.len()).filter(|j| *j != me) {
            let mut payload = own;
            xor_into(&mut payload, &point_mask(&self.dh_point(j), curve::SCALAR_BYTES));
            out.push(MaskedShare { session_id: self.session_id, from: self.index as u8, to: j as u8, payload });
        }
        self.recovered[self.index] = Some(self.share);
        Ok(out)
    }

    pub fn receive_masked(&mut self, msg: &MaskedShare) -> Result<(), GroupError> {
        self.expect_phase(Phase::MembershipVerified)?;
        self.check_session(msg.session_id)?;
        if msg.to as usize != self.index {
            return Err(GroupError::BadIndex(msg.to as usize));
        }
        let j = self.peer(msg.from)?;
        let mut bytes = msg.payload;
        xor_into(&mut bytes, &point_mask(&self.dh_point(j), curve::SCALAR_BYTES));
        // A tampered payload may not even be a canonical scalar.
        let share = Scalar::from_bytes(&bytes).map_err(|_| GroupError::KeyMismatch)?;
        self.recovered[j] = Some(share);
        Ok(())
    }

    /// Interpolates `s_serv` and checks `H4(s') = H4(s_serv)` and `s'·P = Q`.
    pub fn finish_key_agreement(&mut self) -> Result<Scalar, GroupError> {
        self.expect_phase(Phase::MembershipVerified)?;
        let mut s = Scalar::ZERO;
        for (j, r) in self.recovered.iter().enumerate() {
            s = s + self.lambdas[j] * r.ok_or(GroupError::Missing(j))?;
        }
        if h4(&[&s]).to_bytes() != self.key_digest {
            return Err(GroupError::KeyMismatch);
        }
        if instrument::as_extra(|| GroupPoint::mul_base(&s)) != self.q {
            return Err(GroupError::KeyMismatch);
        }
        self.s_serv = Some(s);
        self.phase = Phase::Keyed;
        Ok(s)
    }

    /// Verifies `s_new·P = Q + H5(Q, PK_pub)·PK_pub` against the local `Q`
    /// and switches to the new key.
    pub fn apply_update(&mut self, msg: &KeyUpdate) -> Result<Scalar, GroupError> {
        self.expect_phase(Phase::Keyed)?;
        self.check_session(msg.session_id)?;
        let (s_new, q_old) = open_update(&self.keypair, msg)?;
        if q_old != self.q {
            return Err(GroupError::UpdateVerifyFailed);
        }
        self.q = verify_update(&self.params, &s_new, &q_old)?;
        self.s_serv = Some(s_new);
        Ok(s_new)
    }
}

fn open_update(keypair: &KeyPair, msg: &KeyUpdate) -> Result<(Scalar, GroupPoint), GroupError> {
    let plain = pk_decrypt(&keypair.sk, &msg.ciphertext).map_err(|_| GroupError::Decrypt)?;
    if plain.len() != UPDATE_PLAINTEXT_BYTES {
        return Err(GroupError::Decrypt);
    }
    let s_new = Scalar::from_bytes(&plain[..curve::SCALAR_BYTES])?;
    let q = GroupPoint::from_bytes(&plain[curve::SCALAR_BYTES..])?;
    Ok((s_new, q))
}

/// Returns `Q_new = s_new·P` when the update equation holds.
fn verify_update(params: &SystemParams, s_new: &Scalar, q: &GroupPoint) -> Result<GroupPoint, GroupError> {
    let lhs = GroupPoint::mul_base(s_new);
    let rhs = q.add(&params.pk_pub.mul(&h5(q, &params.pk_pub)));
    if lhs != rhs {
        return Err(GroupError::UpdateVerifyFailed);
    }
    Ok(lhs)
}
