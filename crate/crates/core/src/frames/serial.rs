//! JSON form of a [`Network`]. Matrices are row-major `[re, im]` pairs; a
//! record carrying only the seed is rebuilt through the deterministic
//! constructor.

use serde::{Deserialize, Serialize};

use super::network::{FrameRestriction, Network, NetworkOptions, PartyId};
use crate::error::{input, Error, Result};
use crate::qmath::Su2;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub to: PartyId,
    pub from: PartyId,
    pub matrix: Su2,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkRecord {
    pub seed: u64,
    pub parties: usize,
    #[serde(default)]
    pub restriction: FrameRestriction,
    #[serde(default)]
    pub plug_and_play: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames: Option<Vec<Su2>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<ChannelRecord>>,
}

impl From<Network> for NetworkRecord {
    fn from(net: Network) -> Self {
        let n = net.party_count();
        let channels = (0..n)
            .flat_map(|to| (0..n).map(move |from| (to, from)))
            .filter(|(to, from)| to != from)
            .map(|(to, from)| ChannelRecord {
                to: PartyId(to),
                from: PartyId(from),
                matrix: net.channel_raw(PartyId(to), PartyId(from)),
            })
            .collect();
        Self {
            seed: net.seed,
            parties: n,
            restriction: net.restriction,
            plug_and_play: net.plug_and_play,
            frames: Some(net.frames.clone()),
            channels: Some(channels),
        }
    }
}

impl TryFrom<NetworkRecord> for Network {
    type Error = Error;

    fn try_from(rec: NetworkRecord) -> Result<Self> {
        let opts = NetworkOptions {
            restriction: rec.restriction,
            plug_and_play: rec.plug_and_play,
        };
        match (rec.frames, rec.channels) {
            (None, None) => Network::build_with(rec.seed, rec.parties, opts),
            (Some(frames), Some(chans)) => {
                if frames.len() != rec.parties {
                    return input("frame count does not match the party count");
                }
                let n = rec.parties;
                let mut table = vec![vec![Su2::identity(); n]; n];
                let mut seen = vec![vec![false; n]; n];
                for ch in chans {
                    if ch.to.0 >= n || ch.from.0 >= n || ch.to == ch.from {
                        return input(format!("invalid channel {} <- {}", ch.to, ch.from));
                    }
                    table[ch.to.0][ch.from.0] = ch.matrix;
                    seen[ch.to.0][ch.from.0] = true;
                }
                if (0..n).any(|k| (0..n).any(|l| k != l && !seen[k][l])) {
                    return input("every ordered pair of parties needs a channel");
                }
                let mut net = Network::from_parts(frames, table, rec.restriction)?;
                net.seed = rec.seed;
                Ok(net)
            }
            _ => input("frames and channels must be given together or not at all"),
        }
    }
}

impl Network {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
