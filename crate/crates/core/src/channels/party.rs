use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Voter,
    Authority,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Voter => "voter",
            Role::Authority => "authority",
        })
    }
}

/// A participant, numbered from 1 within its role. Displays as
/// `voter:3` / `authority:1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartyId {
    pub role: Role,
    pub index: usize,
}

impl PartyId {
    pub fn voter(index: usize) -> Self {
        Self {
            role: Role::Voter,
            index,
        }
    }

    pub fn authority(index: usize) -> Self {
        Self {
            role: Role::Authority,
            index,
        }
    }

    /// Zero-based position within the role.
    pub fn slot(&self) -> usize {
        self.index - 1
    }

    /// Stable numeric id used to derive per-party random streams.
    pub fn stream_id(&self) -> u64 {
        let role = match self.role {
            Role::Voter => 1u64,
            Role::Authority => 2u64,
        };
        (role << 32) | self.index as u64
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.role, self.index)
    }
}

impl FromStr for PartyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (role, index) = s
            .split_once(':')
            .ok_or_else(|| Error::config(format!("party `{s}` is not <role>:<index>")))?;
        let role = match role {
            "voter" => Role::Voter,
            "authority" => Role::Authority,
            other => return Err(Error::config(format!("unknown role `{other}`"))),
        };
        let index: usize = index
            .parse()
            .map_err(|_| Error::config(format!("bad party index in `{s}`")))?;
        if index == 0 {
            return Err(Error::config("party indices start at 1"));
        }
        Ok(Self { role, index })
    }
}

impl Serialize for PartyId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartyId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
