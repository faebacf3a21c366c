//! The `grid.json` input format.

use std::path::Path;

use mtds_core::verify::{AxisRange, Grid, GridAxis};
use serde::{Deserialize, Serialize};

use crate::json::{Real, Scalar};

/// `{"start", "stop", "step"}` over real parts, with an optional `imag`
/// range of the same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: Real,
    pub stop: Real,
    pub step: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<RangeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: Real,
    pub stop: Real,
    pub step: Real,
}

impl From<RangeSpec> for AxisRange {
    fn from(r: RangeSpec) -> Self {
        AxisRange { start: r.start.0, stop: r.stop.0, step: r.step.0 }
    }
}

/// Cartesian product of `axes` followed by the explicit `points`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(default)]
    pub axes: Vec<AxisSpec>,
    #[serde(default)]
    pub points: Vec<Vec<Scalar>>,
}

impl GridFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("grid: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("grid {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn from_points(points: Vec<Vec<Scalar>>) -> Self {
        Self { axes: Vec::new(), points }
    }

    pub fn to_grid(&self) -> Grid {
        Grid {
            axes: self
                .axes
                .iter()
                .map(|a| GridAxis {
                    re: AxisRange { start: a.start.0, stop: a.stop.0, step: a.step.0 },
                    im: a.imag.map(AxisRange::from),
                })
                .collect(),
            points: self.points.iter().map(|p| p.iter().map(|z| z.0).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_number_forms() {
        let g = GridFile::parse(
            r#"{"axes": [{"start": 2.9, "stop": 3.1, "step": 0.1},
                         {"start": -0.5, "stop": -0.5, "step": 0, "imag": {"start": 0, "stop": 1, "step": 0.5}},
                         {"start": 4, "stop": 4, "step": 0}],
                "points": [[3, "-0.5+0.2i", "4"]]}"#,
        )
        .unwrap();
        let pts = g.to_grid().expand().unwrap();
        assert_eq!(pts.len(), 3 * 3 + 1);
        assert_eq!(pts[1][1].im, 0.5);
        assert_eq!(pts[9][1].im, 0.2);
    }

    #[test]
    fn unknown_fields_are_named() {
        let e = GridFile::parse(r#"{"axis": []}"#).unwrap_err();
        assert!(e.contains("axis"), "{e}");
        let e = GridFile::parse(r#"{"points": [["1+"]]}"#).unwrap_err();
        assert!(e.contains("1+"), "{e}");
    }
}
