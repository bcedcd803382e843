//! Monotone access structures described by their minimal qualified sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A participant: the king, a numbered pawn, or a lettered participant of
/// one of the four-element sibling structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Participant {
    King,
    Pawn(u32),
    Label(char),
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Participant::King => write!(f, "k"),
            Participant::Pawn(i) => write!(f, "p{i}"),
            Participant::Label(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for Participant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(Participant::King),
            _ if s.len() > 1 && s.starts_with('p') => s[1..]
                .parse::<u32>()
                .ok()
                .filter(|&i| i >= 1 && !s[1..].starts_with('0'))
                .map(Participant::Pawn)
                .ok_or_else(|| invalid(format!("bad participant name {s:?}"))),
            _ => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() => Ok(Participant::Label(c)),
                    _ => Err(invalid(format!("bad participant name {s:?}"))),
                }
            }
        }
    }
}

impl Serialize for Participant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Participant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subset of a structure's participants as a bitmask over their positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ParticipantSet(pub u64);

impl ParticipantSet {
    pub fn contains_index(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset(self, other: ParticipantSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains_index(i))
    }

    pub fn with(self, i: usize) -> ParticipantSet {
        ParticipantSet(self.0 | 1 << i)
    }

    /// Lexicographic comparison of the sorted index lists.
    pub fn lex_cmp(self, other: ParticipantSet) -> std::cmp::Ordering {
        self.indices().cmp(other.indices())
    }
}

/// An access structure on an ordered participant list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessStructure {
    participants: Vec<Participant>,
    minimal: Vec<ParticipantSet>,
}

impl AccessStructure {
    /// Validates and canonicalizes: participants are sorted (king, pawns,
    /// labels) and minimal sets are kept in lexicographic order.
    pub fn new(participants: Vec<Participant>, minimal: Vec<Vec<Participant>>) -> Result<Self> {
        let mut sorted = participants.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != participants.len() {
            return Err(invalid("duplicate participant"));
        }
        if sorted.is_empty() || sorted.len() > 64 {
            return Err(invalid("between 1 and 64 participants are supported"));
        }
        let pawns: Vec<u32> = sorted
            .iter()
            .filter_map(|p| match p {
                Participant::Pawn(i) => Some(*i),
                _ => None,
            })
            .collect();
        if pawns.iter().enumerate().any(|(k, &i)| i as usize != k + 1) {
            return Err(invalid("pawn indices must be contiguous from 1"));
        }

        let index_of = |p: &Participant| {
            sorted
                .binary_search(p)
                .map_err(|_| invalid(format!("unknown participant {p}")))
        };
        let mut sets = Vec::with_capacity(minimal.len());
        for members in &minimal {
            if members.is_empty() {
                return Err(invalid("empty minimal qualified set"));
            }
            let mut mask = ParticipantSet::default();
            for p in members {
                mask = mask.with(index_of(p)?);
            }
            sets.push(mask);
        }
        for (i, a) in sets.iter().enumerate() {
            for (j, b) in sets.iter().enumerate() {
                if i != j && a.is_subset(*b) {
                    return Err(invalid("minimal qualified sets must form an antichain"));
                }
            }
        }
        let covered = sets.iter().fold(0u64, |acc, s| acc | s.0);
        if let Some(p) = (0..sorted.len()).find(|&i| covered >> i & 1 == 0) {
            return Err(invalid(format!(
                "participant {} is in no minimal qualified set",
                sorted[p]
            )));
        }
        sets.sort_by(|a, b| a.lex_cmp(*b));
        Ok(AccessStructure {
            participants: sorted,
            minimal: sets,
        })
    }

    pub fn participants(&self) -> &[Participant] {
        &self.participants
    }

    pub fn len(&self) -> usize {
        self.participants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.participants.is_empty()
    }

    pub fn minimal_qualified(&self) -> &[ParticipantSet] {
        &self.minimal
    }

    pub fn full_set(&self) -> ParticipantSet {
        ParticipantSet(low_bits(self.len()))
    }

    pub fn index_of(&self, p: Participant) -> Result<usize> {
        self.participants
            .binary_search(&p)
            .map_err(|_| invalid(format!("participant {p} not in structure")))
    }

    pub fn set_of(&self, members: &[Participant]) -> Result<ParticipantSet> {
        members
            .iter()
            .try_fold(ParticipantSet::default(), |acc, &p| Ok(acc.with(self.index_of(p)?)))
    }

    pub fn members(&self, set: ParticipantSet) -> Vec<Participant> {
        set.indices()
            .take_while(|&i| i < self.len())
            .map(|i| self.participants[i])
            .collect()
    }

    pub fn qualifies(&self, set: ParticipantSet) -> bool {
        self.minimal.iter().any(|m| m.is_subset(set))
    }

    pub fn is_qualified(&self, members: &[Participant]) -> Result<bool> {
        Ok(self.qualifies(self.set_of(members)?))
    }

    /// The lexicographically first minimal qualified set inside `set`.
    pub fn first_minimal_within(&self, set: ParticipantSet) -> Option<ParticipantSet> {
        self.minimal.iter().copied().find(|m| m.is_subset(set))
    }

    /// All unqualified sets whose every one-element extension is qualified,
    /// in lexicographic order. Brute force over all subsets.
    pub fn maximal_unqualified(&self) -> Vec<ParticipantSet> {
        let m = self.len();
        assert!(m <= 30, "maximal_unqualified enumerates 2^{m} subsets");
        let mut out: Vec<ParticipantSet> = (0..1u64 << m)
            .map(ParticipantSet)
            .filter(|&x| {
                !self.qualifies(x)
                    && (0..m)
                        .filter(|&i| !x.contains_index(i))
                        .all(|i| self.qualifies(x.with(i)))
            })
            .collect();
        out.sort_by(|a, b| a.lex_cmp(*b));
        out
    }

    pub fn format_set(&self, set: ParticipantSet) -> String {
        let names: Vec<String> = self.members(set).iter().map(|p| p.to_string()).collect();
        format!("{{{}}}", names.join(","))
    }
}

pub(crate) fn low_bits(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// The king-and-n-pawns structure: `{k, p_i}` for every pawn plus the set of all pawns.
pub fn make_gamma(n: u32) -> Result<AccessStructure> {
    if n < 2 {
        return Err(invalid(format!("gamma needs n >= 2, got {n}")));
    }
    if n > 63 {
        return Err(invalid("gamma supports at most 63 pawns"));
    }
    let pawns: Vec<Participant> = (1..=n).map(Participant::Pawn).collect();
    let mut participants = vec![Participant::King];
    participants.extend(&pawns);
    let mut minimal: Vec<Vec<Participant>> = pawns
        .iter()
        .map(|&p| vec![Participant::King, p])
        .collect();
    minimal.push(pawns);
    AccessStructure::new(participants, minimal)
}

/// One of the three remaining four-participant structures on `{a, b, c, d}`:
/// `"path4"`, `"fan"` or `"triangle-d"`.
pub fn make_named(name: &str) -> Result<AccessStructure> {
    let sets: &[&str] = match name {
        "path4" => &["ab", "bc", "cd"],
        "fan" => &["ab", "ac", "ad", "bc"],
        "triangle-d" => &["ab", "ac", "bcd"],
        _ => return Err(invalid(format!("unknown structure {name:?}"))),
    };
    let participants = "abcd".chars().map(Participant::Label).collect();
    let minimal = sets
        .iter()
        .map(|s| s.chars().map(Participant::Label).collect())
        .collect();
    AccessStructure::new(participants, minimal)
}

/// Resolves `gamma_N` as well as the named sibling structures.
pub fn structure_by_name(name: &str) -> Result<AccessStructure> {
    match name.strip_prefix("gamma_") {
        Some(n) => make_gamma(
            n.parse()
                .map_err(|_| invalid(format!("bad structure name {name:?}")))?,
        ),
        None => make_named(name),
    }
}

#[derive(Serialize, Deserialize)]
struct AccessStructureJson {
    participants: Vec<Participant>,
    minimal_qualified: Vec<Vec<Participant>>,
}

impl Serialize for AccessStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AccessStructureJson {
            participants: self.participants.clone(),
            minimal_qualified: self.minimal.iter().map(|&m| self.members(m)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AccessStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = AccessStructureJson::deserialize(d)?;
        AccessStructure::new(raw.participants, raw.minimal_qualified)
            .map_err(serde::de::Error::custom)
    }
}

/// Brute-force helper shared with tests: every subset of the structure as a set.
pub fn all_subsets(structure: &AccessStructure) -> impl Iterator<Item = ParticipantSet> {
    (0..=low_bits(structure.len())).map(ParticipantSet)
}
