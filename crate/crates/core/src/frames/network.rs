use std::cell::Cell;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::qmath::{Su2, STRUCT_TOL};
use crate::seeding;

const NAMES: [&str; 8] = [
    "Alice", "Bob", "Charlie", "Dave", "Eve", "Frank", "Grace", "Heidi",
];

/// Index of a party within a [`Network`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartyId(pub usize);

pub const ALICE: PartyId = PartyId(0);
pub const BOB: PartyId = PartyId(1);
pub const CHARLIE: PartyId = PartyId(2);

impl PartyId {
    pub fn name(self) -> String {
        NAMES
            .get(self.0)
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("P{}", self.0))
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Allowed form of the relative frames.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameRestriction {
    #[default]
    Full,
    /// Frames differ only by rotations about the polar axis, `exp(iφσ_z/2)`.
    ZRotationOnly,
}

thread_local! {
    static PROTOCOL_DEPTH: Cell<usize> = const { Cell::new(0) };
}

/// Marks the current thread as executing protocol code for the guard's
/// lifetime. Ground-truth accessors fail while any guard is alive.
pub(crate) struct ProtocolGuard(std::marker::PhantomData<*const ()>);

impl ProtocolGuard {
    pub(crate) fn enter() -> Self {
        PROTOCOL_DEPTH.with(|d| d.set(d.get() + 1));
        Self(std::marker::PhantomData)
    }
}

impl Drop for ProtocolGuard {
    fn drop(&mut self) {
        PROTOCOL_DEPTH.with(|d| d.set(d.get() - 1));
    }
}

pub(crate) fn in_protocol() -> bool {
    PROTOCOL_DEPTH.with(|d| d.get() > 0)
}

pub(crate) fn oracle_access(what: &str) -> Result<()> {
    if in_protocol() {
        return Err(Error::ProtocolViolation(format!(
            "{what} is ground truth and cannot be read from protocol code"
        )));
    }
    Ok(())
}

/// Ground truth of a communication world.
///
/// `frame[k]` maps party `k`'s basis to a hidden fiducial basis, so a state
/// with coefficients `c` in `k`'s basis is `frame[k]·c` physically. The
/// relative frame is derived, `R_kl = frame[k]·frame[l]†`, which makes
/// `R_kl R_lm = R_km` and `R_kl† = R_lk` hold identically. Channel `V_kl`
/// (from `l` to `k`) is stored as the physical unitary it applies.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "super::serial::NetworkRecord", into = "super::serial::NetworkRecord")]
pub struct Network {
    pub(crate) seed: u64,
    pub(crate) restriction: FrameRestriction,
    pub(crate) plug_and_play: bool,
    pub(crate) frames: Vec<Su2>,
    /// Row-major over `(to, from)`; the diagonal holds identities.
    pub(crate) channels: Vec<Su2>,
}

/// Knobs for [`Network::build`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkOptions {
    pub restriction: FrameRestriction,
    /// Force `V_kl = V_lk†`, the case where both directions share one
    /// reversible physical channel.
    #[serde(default)]
    pub plug_and_play: bool,
}

impl Network {
    /// Haar-random frames and channels, deterministic in `seed`.
    pub fn build(seed: u64, party_count: usize, restriction: FrameRestriction) -> Result<Self> {
        Self::build_with(
            seed,
            party_count,
            NetworkOptions {
                restriction,
                plug_and_play: false,
            },
        )
    }

    pub fn build_with(seed: u64, party_count: usize, opts: NetworkOptions) -> Result<Self> {
        if party_count < 2 {
            return input(format!("a network needs at least 2 parties, got {party_count}"));
        }
        if party_count > 64 {
            return input("at most 64 parties are supported");
        }
        let mut rng = seeding::master(seed);
        let frames = (0..party_count)
            .map(|_| match opts.restriction {
                FrameRestriction::Full => Su2::haar(&mut rng),
                FrameRestriction::ZRotationOnly => {
                    Su2::z_rotation(rng.random_range(0.0..4.0 * std::f64::consts::PI))
                }
            })
            .collect();
        let mut channels = vec![Su2::identity(); party_count * party_count];
        for to in 0..party_count {
            for from in 0..party_count {
                if to == from {
                    continue;
                }
                if opts.plug_and_play && to > from {
                    channels[to * party_count + from] = channels[from * party_count + to].adjoint();
                } else {
                    channels[to * party_count + from] = Su2::haar(&mut rng);
                }
            }
        }
        Ok(Self {
            seed,
            restriction: opts.restriction,
            plug_and_play: opts.plug_and_play,
            frames,
            channels,
        })
    }

    /// Every frame and channel the identity: all parties share one frame and
    /// perfect channels.
    pub fn trivial(party_count: usize) -> Result<Self> {
        if party_count < 2 {
            return input(format!("a network needs at least 2 parties, got {party_count}"));
        }
        Ok(Self {
            seed: 0,
            restriction: FrameRestriction::Full,
            plug_and_play: true,
            frames: vec![Su2::identity(); party_count],
            channels: vec![Su2::identity(); party_count * party_count],
        })
    }

    /// Assembles a network from explicit ground truth.
    /// `channels[to][from]`; diagonal entries are ignored.
    pub fn from_parts(
        frames: Vec<Su2>,
        channels: Vec<Vec<Su2>>,
        restriction: FrameRestriction,
    ) -> Result<Self> {
        let n = frames.len();
        if n < 2 {
            return input("a network needs at least 2 parties");
        }
        if channels.len() != n || channels.iter().any(|row| row.len() != n) {
            return input("channel table must be square with one row per party");
        }
        if restriction == FrameRestriction::ZRotationOnly
            && frames.iter().any(|f| !is_z_rotation(f))
        {
            return input("z-rotation restriction violated by a frame");
        }
        let mut flat = Vec::with_capacity(n * n);
        for (to, row) in channels.into_iter().enumerate() {
            for (from, v) in row.into_iter().enumerate() {
                flat.push(if to == from { Su2::identity() } else { v });
            }
        }
        let plug_and_play = (0..n).all(|k| {
            (0..n).all(|l| k == l || flat[k * n + l].max_diff(&flat[l * n + k].adjoint()) < STRUCT_TOL)
        });
        Ok(Self {
            seed: 0,
            restriction,
            plug_and_play,
            frames,
            channels: flat,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn restriction(&self) -> FrameRestriction {
        self.restriction
    }

    pub fn is_plug_and_play(&self) -> bool {
        self.plug_and_play
    }

    pub fn party_count(&self) -> usize {
        self.frames.len()
    }

    pub fn parties(&self) -> impl Iterator<Item = PartyId> {
        (0..self.party_count()).map(PartyId)
    }

    pub fn check_party(&self, k: PartyId) -> Result<()> {
        if k.0 >= self.party_count() {
            return input(format!("unknown party {k} in a {}-party network", self.party_count()));
        }
        Ok(())
    }

    /// Party `k`'s frame against the fiducial basis. Ground truth.
    pub fn frame(&self, k: PartyId) -> Result<Su2> {
        oracle_access("a party frame")?;
        self.check_party(k)?;
        Ok(self.frames[k.0])
    }

    /// `V_{to,from}` as a physical unitary. Ground truth.
    pub fn channel(&self, to: PartyId, from: PartyId) -> Result<Su2> {
        oracle_access("a channel unitary")?;
        self.check_party(to)?;
        self.check_party(from)?;
        Ok(self.channel_raw(to, from))
    }

    /// `R_kl`, defined by `⟨a_k|R_kl|b_l⟩ = δ_ab`. Ground truth; only tests
    /// and oracles may call it.
    pub fn relative_frame(&self, k: PartyId, l: PartyId) -> Result<Su2> {
        oracle_access("a relative frame")?;
        self.check_party(k)?;
        self.check_party(l)?;
        Ok(self.frames[k.0] * self.frames[l.0].adjoint())
    }

    pub(crate) fn frame_raw(&self, k: PartyId) -> Su2 {
        self.frames[k.0]
    }

    pub(crate) fn channel_raw(&self, to: PartyId, from: PartyId) -> Su2 {
        self.channels[to.0 * self.party_count() + from.0]
    }

    /// Channel `from → to` as seen from the endpoints' own bases:
    /// `frame[to]† · V_{to,from} · frame[from]`, equal to the matrix of
    /// `V_{to,from} R_{from,to}` in `to`'s basis. These are the lattice link
    /// variables; frame changes act on them as gauge transformations.
    pub(crate) fn link(&self, to: PartyId, from: PartyId) -> Su2 {
        self.frames[to.0].adjoint() * self.channel_raw(to, from) * self.frames[from.0]
    }

    /// Re-orients `party`'s frame by `r`: the new frame satisfies
    /// `R_kl ↦ R_kk† R_kl` for the changed party `k`.
    pub fn with_frame_change(&self, party: PartyId, r: &Su2) -> Result<Self> {
        self.check_party(party)?;
        if self.restriction == FrameRestriction::ZRotationOnly && !is_z_rotation(r) {
            return input("frame change must be a z-rotation under the z-rotation restriction");
        }
        let mut out = self.clone();
        out.frames[party.0] = r.adjoint() * self.frames[party.0];
        Ok(out)
    }

    /// The channel-side presentation of [`Self::with_frame_change`]: frames
    /// stay put and every channel touching `party` is mapped
    /// `V_kl ↦ R_kk V_kl R_ll†`.
    pub fn with_channel_gauge(&self, party: PartyId, r: &Su2) -> Result<Self> {
        self.check_party(party)?;
        let n = self.party_count();
        let mut out = self.clone();
        for other in 0..n {
            if other == party.0 {
                continue;
            }
            let into = party.0 * n + other;
            let out_of = other * n + party.0;
            out.channels[into] = *r * self.channels[into];
            out.channels[out_of] = self.channels[out_of] * r.adjoint();
        }
        Ok(out)
    }
}

pub(crate) fn is_z_rotation(u: &Su2) -> bool {
    let m = u.matrix();
    m[(0, 1)].norm() <= STRUCT_TOL && m[(1, 0)].norm() <= STRUCT_TOL
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("seed", &self.seed)
            .field("parties", &self.party_count())
            .field("restriction", &self.restriction)
            .field("plug_and_play", &self.plug_and_play)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_party() {
        assert!(Network::build(1, 1, FrameRestriction::Full).is_err());
        assert!(Network::trivial(0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = Network::build(42, 3, FrameRestriction::Full).unwrap();
        let b = Network::build(42, 3, FrameRestriction::Full).unwrap();
        let c = Network::build(43, 3, FrameRestriction::Full).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn directions_are_independent_by_default() {
        let net = Network::build(5, 2, FrameRestriction::Full).unwrap();
        let v_ab = net.channel(ALICE, BOB).unwrap();
        let v_ba = net.channel(BOB, ALICE).unwrap();
        let tr = (v_ab * v_ba.adjoint()).trace();
        assert!((tr.re - 2.0).abs() > 1e-3);
        assert!(v_ab.max_diff(&v_ba) > 1e-3);
    }

    #[test]
    fn plug_and_play_reverses_channels() {
        let net = Network::build_with(
            5,
            3,
            NetworkOptions {
                restriction: FrameRestriction::Full,
                plug_and_play: true,
            },
        )
        .unwrap();
        for k in net.parties() {
            for l in net.parties() {
                let round = net.channel(k, l).unwrap() * net.channel(l, k).unwrap();
                assert!(round.max_diff(&Su2::identity()) < 1e-12);
            }
        }
    }

    #[test]
    fn relative_frame_algebra() {
        let net = Network::build(9, 4, FrameRestriction::Full).unwrap();
        for k in net.parties() {
            assert!(net.relative_frame(k, k).unwrap().max_diff(&Su2::identity()) < 1e-12);
            for l in net.parties() {
                let r_kl = net.relative_frame(k, l).unwrap();
                assert!(r_kl.adjoint().max_diff(&net.relative_frame(l, k).unwrap()) < 1e-12);
                for m in net.parties() {
                    let lhs = r_kl * net.relative_frame(l, m).unwrap();
                    assert!(lhs.max_diff(&net.relative_frame(k, m).unwrap()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn relative_frame_maps_basis_vectors() {
        // ⟨a_k|R_kl|b_l⟩ = δ_ab with |a_k⟩ = frame_k e_a in fiducial coordinates.
        let net = Network::build(10, 2, FrameRestriction::Full).unwrap();
        let r = net.relative_frame(ALICE, BOB).unwrap();
        let (fa, fb) = (net.frame(ALICE).unwrap(), net.frame(BOB).unwrap());
        let elem = fa.adjoint() * r * fb;
        assert!(elem.max_diff(&Su2::identity()) < 1e-12);
    }

    #[test]
    fn z_restriction_frames_commute_with_sigma_z() {
        let net = Network::build(3, 3, FrameRestriction::ZRotationOnly).unwrap();
        for k in net.parties() {
            for l in net.parties() {
                let r = net.relative_frame(k, l).unwrap();
                assert!(r.commutes_with(&Su2::pauli_z(), 1e-12));
            }
        }
        assert!(net.with_frame_change(BOB, &Su2::pauli_x()).is_err());
        assert!(net.with_frame_change(BOB, &Su2::z_rotation(0.4)).is_ok());
    }

    #[test]
    fn unknown_party_is_rejected() {
        let net = Network::build(3, 2, FrameRestriction::Full).unwrap();
        assert!(net.relative_frame(ALICE, CHARLIE).is_err());
    }

    #[test]
    fn guard_blocks_ground_truth() {
        let net = Network::build(3, 2, FrameRestriction::Full).unwrap();
        {
            let _g = ProtocolGuard::enter();
            assert!(matches!(
                net.relative_frame(ALICE, BOB),
                Err(Error::ProtocolViolation(_))
            ));
            assert!(net.frame(ALICE).is_err());
            assert!(net.channel(ALICE, BOB).is_err());
        }
        assert!(net.relative_frame(ALICE, BOB).is_ok());
    }
}
