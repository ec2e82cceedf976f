use serde::{Deserialize, Serialize};

use crate::drum::{DrumId, NUM_DRUMS};
use crate::error::{Error, Result};
use crate::reward::Vec3;

/// A drum modeled as a horizontal disc: `center` is the middle of its top
/// surface, so the surface height equals `center[2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrumGeometry {
    pub center: Vec3,
    pub radius: f64,
}

impl DrumGeometry {
    pub fn surface_height(&self) -> f64 {
        self.center[2]
    }

    pub fn horizontal_distance(&self, x: f64, y: f64) -> f64 {
        ((x - self.center[0]).powi(2) + (y - self.center[1]).powi(2)).sqrt()
    }
}

/// Six-drum layout in meters: robot at the origin, x forward, y left, z up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrumKitLayout {
    pub drums: [DrumGeometry; NUM_DRUMS],
}

impl Default for DrumKitLayout {
    fn default() -> Self {
        let d = |x, y, z, r| DrumGeometry {
            center: [x, y, z],
            radius: r,
        };
        DrumKitLayout {
            drums: [
                d(0.30, 0.30, 0.75, 0.12),  // hi-hat
                d(0.40, 0.05, 0.70, 0.13),  // snare
                d(0.63, 0.13, 0.80, 0.10),  // tom 1
                d(0.62, -0.10, 0.78, 0.11), // tom 2
                d(0.55, 0.45, 0.95, 0.15),  // cymbal 1
                d(0.45, -0.33, 0.95, 0.14), // cymbal 2
            ],
        }
    }
}

#[derive(Deserialize)]
struct LayoutFile {
    kit: Vec<NamedDrum>,
}

#[derive(Deserialize)]
struct NamedDrum {
    name: String,
    center: Vec3,
    radius: f64,
}

impl DrumKitLayout {
    pub fn drum(&self, id: DrumId) -> &DrumGeometry {
        &self.drums[id.index()]
    }

    pub fn centers(&self) -> [Vec3; NUM_DRUMS] {
        self.drums.map(|d| d.center)
    }

    /// Radii positive, coordinates finite, and horizontal footprints disjoint.
    pub fn validate(&self) -> Result<()> {
        for (i, d) in self.drums.iter().enumerate() {
            if !(d.radius > 0.0) || d.center.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config(format!(
                    "drum {} has invalid geometry",
                    DrumId::ALL[i]
                )));
            }
        }
        for i in 0..NUM_DRUMS {
            for j in i + 1..NUM_DRUMS {
                let (a, b) = (&self.drums[i], &self.drums[j]);
                if a.horizontal_distance(b.center[0], b.center[1]) < a.radius + b.radius {
                    return Err(Error::Config(format!(
                        "footprints of {} and {} overlap",
                        DrumId::ALL[i],
                        DrumId::ALL[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parse `[[kit]]` entries (`name`, `center`, `radius`); drums not listed
    /// keep their default geometry.
    pub fn from_toml(text: &str) -> Result<DrumKitLayout> {
        let file: LayoutFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut layout = DrumKitLayout::default();
        for entry in file.kit {
            let id: DrumId = entry.name.parse()?;
            layout.drums[id.index()] = DrumGeometry {
                center: entry.center,
                radius: entry.radius,
            };
        }
        layout.validate()?;
        Ok(layout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout_is_valid() {
        DrumKitLayout::default().validate().unwrap();
    }

    #[test]
    fn overlap_rejected() {
        let err = DrumKitLayout::from_toml(
            r#"
            [[kit]]
            name = "snare"
            center = [0.30, 0.32, 0.70]
            radius = 0.13
            "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("overlap"), "{err}");
    }

    #[test]
    fn partial_override() {
        let k = DrumKitLayout::from_toml(
            "[[kit]]\nname = \"cymbal 2\"\ncenter = [0.5, -0.6, 1.0]\nradius = 0.1\n",
        )
        .unwrap();
        assert_eq!(k.drum(DrumId::CYMBAL_2).center, [0.5, -0.6, 1.0]);
        assert_eq!(
            k.drum(DrumId::SNARE),
            DrumKitLayout::default().drum(DrumId::SNARE)
        );
    }
}
