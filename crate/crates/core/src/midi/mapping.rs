use std::collections::BTreeMap;

use serde::Deserialize;

use crate::drum::DrumId;
use crate::error::{Error, Result};

/// Song-specific assignment of MIDI note numbers to kit drums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrumMapping {
    note_to_drum: BTreeMap<u8, DrumId>,
}

#[derive(Deserialize)]
struct MappingFile {
    mapping: BTreeMap<String, String>,
}

impl DrumMapping {
    pub fn new(note_to_drum: BTreeMap<u8, DrumId>) -> Result<DrumMapping> {
        if note_to_drum.is_empty() {
            return Err(Error::Config(
                "drum mapping must map at least one note".into(),
            ));
        }
        if let Some(note) = note_to_drum.keys().find(|n| **n > 127) {
            return Err(Error::Config(format!("note {note} outside 0-127")));
        }
        Ok(DrumMapping { note_to_drum })
    }

    /// General MIDI fallback; kick drums (35, 36) stay unmapped.
    pub fn general_midi() -> DrumMapping {
        let pairs: [(u8, DrumId); 14] = [
            (38, DrumId::SNARE),
            (40, DrumId::SNARE),
            (42, DrumId::HI_HAT),
            (44, DrumId::HI_HAT),
            (46, DrumId::HI_HAT),
            (48, DrumId::TOM_1),
            (50, DrumId::TOM_1),
            (45, DrumId::TOM_2),
            (47, DrumId::TOM_2),
            (49, DrumId::CYMBAL_1),
            (55, DrumId::CYMBAL_1),
            (51, DrumId::CYMBAL_2),
            (57, DrumId::CYMBAL_2),
            (59, DrumId::CYMBAL_2),
        ];
        DrumMapping {
            note_to_drum: pairs.into_iter().collect(),
        }
    }

    /// Parse a `[mapping]` table of `note = "drum-name"` entries.
    pub fn from_toml(text: &str) -> Result<DrumMapping> {
        let file: MappingFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut map = BTreeMap::new();
        for (key, name) in file.mapping {
            let note: u8 = key.trim().parse().map_err(|_| {
                Error::Config(format!("mapping key `{key}` is not a MIDI note number"))
            })?;
            map.insert(note, name.parse::<DrumId>()?);
        }
        DrumMapping::new(map)
    }

    pub fn drum_for(&self, note: u8) -> Option<DrumId> {
        self.note_to_drum.get(&note).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, DrumId)> + '_ {
        self.note_to_drum.iter().map(|(n, d)| (*n, *d))
    }
}

impl Default for DrumMapping {
    fn default() -> Self {
        DrumMapping::general_midi()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_mapping() {
        let m = DrumMapping::from_toml(
            r#"
            [mapping]
            38 = "snare"
            42 = "hi-hat"
            "49" = "cymbal 1"
            "#,
        )
        .unwrap();
        assert_eq!(m.drum_for(38), Some(DrumId::SNARE));
        assert_eq!(m.drum_for(49), Some(DrumId::CYMBAL_1));
        assert_eq!(m.drum_for(36), None);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(DrumMapping::from_toml("[mapping]\n38 = \"cowbell\"\n").is_err());
        assert!(DrumMapping::from_toml("[mapping]\nabc = \"snare\"\n").is_err());
        assert!(DrumMapping::from_toml("[mapping]\n300 = \"snare\"\n").is_err());
        assert!(DrumMapping::from_toml("[mapping]\n").is_err());
    }

    #[test]
    fn general_midi_leaves_kick_unmapped() {
        let gm = DrumMapping::general_midi();
        assert_eq!(gm.drum_for(36), None);
        assert_eq!(gm.drum_for(35), None);
        assert_eq!(gm.drum_for(46), Some(DrumId::HI_HAT));
    }
}
