//! Drum and stick identifiers shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Number of drums in the kit. Every one-hot drum vector has this width.
pub const NUM_DRUMS: usize = 6;

/// Index of a drum in the six-piece kit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DrumId(u8);

impl DrumId {
    pub const HI_HAT: DrumId = DrumId(0);
    pub const SNARE: DrumId = DrumId(1);
    pub const TOM_1: DrumId = DrumId(2);
    pub const TOM_2: DrumId = DrumId(3);
    pub const CYMBAL_1: DrumId = DrumId(4);
    pub const CYMBAL_2: DrumId = DrumId(5);

    pub const ALL: [DrumId; NUM_DRUMS] = [
        DrumId(0),
        DrumId(1),
        DrumId(2),
        DrumId(3),
        DrumId(4),
        DrumId(5),
    ];

    pub fn new(id: u8) -> Option<DrumId> {
        ((id as usize) < NUM_DRUMS).then_some(DrumId(id))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        DRUM_NAMES[self.index()]
    }
}

const DRUM_NAMES: [&str; NUM_DRUMS] = ["hi-hat", "snare", "tom-1", "tom-2", "cymbal-1", "cymbal-2"];

impl fmt::Display for DrumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DrumId {
    type Err = Error;

    /// Accepts `hi-hat`, `hihat`, `tom 1`, `tom-1`, `tom1`, `Cymbal 2`, ...
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .flat_map(char::to_lowercase)
            .collect();
        let id = match norm.as_str() {
            "hihat" => 0,
            "snare" => 1,
            "tom1" => 2,
            "tom2" => 3,
            "cymbal1" => 4,
            "cymbal2" => 5,
            _ => return Err(Error::Config(format!("unknown drum name `{s}`"))),
        };
        Ok(DrumId(id))
    }
}

impl Serialize for DrumId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.0)
    }
}

impl<'de> Deserialize<'de> for DrumId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = u8::deserialize(deserializer)?;
        DrumId::new(raw)
            .ok_or_else(|| serde::de::Error::custom(format!("drum id {raw} out of range")))
    }
}

/// A set of drums, stored as a 6-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DrumSet(u8);

impl DrumSet {
    pub const EMPTY: DrumSet = DrumSet(0);

    pub fn single(drum: DrumId) -> DrumSet {
        DrumSet(1 << drum.0)
    }

    pub fn insert(&mut self, drum: DrumId) {
        self.0 |= 1 << drum.0;
    }

    pub fn contains(self, drum: DrumId) -> bool {
        self.0 & (1 << drum.0) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: DrumSet) -> DrumSet {
        DrumSet(self.0 & other.0)
    }

    pub fn difference(self, other: DrumSet) -> DrumSet {
        DrumSet(self.0 & !other.0)
    }

    pub fn union(self, other: DrumSet) -> DrumSet {
        DrumSet(self.0 | other.0)
    }

    /// Drums in ascending id order.
    pub fn iter(self) -> impl Iterator<Item = DrumId> {
        DrumId::ALL.into_iter().filter(move |d| self.contains(*d))
    }

    pub fn one_hot(self) -> [f64; NUM_DRUMS] {
        let mut row = [0.0; NUM_DRUMS];
        for d in self.iter() {
            row[d.index()] = 1.0;
        }
        row
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

impl FromIterator<DrumId> for DrumSet {
    fn from_iter<I: IntoIterator<Item = DrumId>>(iter: I) -> Self {
        let mut set = DrumSet::EMPTY;
        for d in iter {
            set.insert(d);
        }
        set
    }
}

impl Serialize for DrumSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for DrumSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ids = Vec::<DrumId>::deserialize(deserializer)?;
        Ok(ids.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stick {
    Left,
    Right,
}

impl Stick {
    pub const BOTH: [Stick; 2] = [Stick::Left, Stick::Right];

    pub fn index(self) -> usize {
        match self {
            Stick::Left => 0,
            Stick::Right => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Stick::Left => "L",
            Stick::Right => "R",
        }
    }
}

impl Serialize for Stick {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Stick {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match String::deserialize(deserializer)?.as_str() {
            "L" | "left" | "Left" => Ok(Stick::Left),
            "R" | "right" | "Right" => Ok(Stick::Right),
            other => Err(serde::de::Error::custom(format!("unknown stick `{other}`"))),
        }
    }
}

/// Sticks allowed to execute a contact step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StickSet {
    left: bool,
    right: bool,
}

impl StickSet {
    pub const BOTH: StickSet = StickSet {
        left: true,
        right: true,
    };

    pub fn only(stick: Stick) -> StickSet {
        StickSet {
            left: stick == Stick::Left,
            right: stick == Stick::Right,
        }
    }

    pub fn allows(self, stick: Stick) -> bool {
        match stick {
            Stick::Left => self.left,
            Stick::Right => self.right,
        }
    }

    pub fn is_empty(self) -> bool {
        !self.left && !self.right
    }

    pub fn iter(self) -> impl Iterator<Item = Stick> {
        Stick::BOTH.into_iter().filter(move |s| self.allows(*s))
    }
}

impl Default for StickSet {
    fn default() -> Self {
        StickSet::BOTH
    }
}

impl Serialize for StickSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for StickSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let sticks = Vec::<Stick>::deserialize(deserializer)?;
        let set = StickSet {
            left: sticks.contains(&Stick::Left),
            right: sticks.contains(&Stick::Right),
        };
        if set.is_empty() {
            return Err(serde::de::Error::custom("stick set must not be empty"));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drum_names_parse_loosely() {
        assert_eq!("hi-hat".parse::<DrumId>().unwrap(), DrumId::HI_HAT);
        assert_eq!("Tom 1".parse::<DrumId>().unwrap(), DrumId::TOM_1);
        assert_eq!("cymbal_2".parse::<DrumId>().unwrap(), DrumId::CYMBAL_2);
        assert!("kick".parse::<DrumId>().is_err());
        for d in DrumId::ALL {
            assert_eq!(d.name().parse::<DrumId>().unwrap(), d);
        }
    }

    #[test]
    fn drum_set_ops() {
        let a: DrumSet = [DrumId::SNARE, DrumId::HI_HAT].into_iter().collect();
        let b = DrumSet::single(DrumId::SNARE);
        assert_eq!(a.len(), 2);
        assert_eq!(a.intersection(b), b);
        assert_eq!(a.difference(b), DrumSet::single(DrumId::HI_HAT));
        assert_eq!(a.one_hot(), [1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[0,1]");
    }

    #[test]
    fn drum_id_rejects_out_of_range() {
        assert!(DrumId::new(6).is_none());
        assert!(serde_json::from_str::<DrumId>("7").is_err());
    }
}
