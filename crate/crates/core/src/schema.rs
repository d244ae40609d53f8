//! JSON documents: complex/v1, multisection/v1, gluing/v1, report/v1.
//! Unknown fields are rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const COMPLEX_V1: &str = "complex/v1";
pub const MULTISECTION_V1: &str = "multisection/v1";
pub const GLUING_V1: &str = "gluing/v1";
pub const REPORT_V1: &str = "report/v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub id: String,
    pub dim: u8,
    pub faces: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singular: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayDoc {
    pub vec: [i64; 2],
    pub edge: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDoc {
    pub face2: String,
    pub rays: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDoc {
    pub vertex: String,
    pub rays: Vec<RayDoc>,
    pub cones: Vec<ConeDoc>,
}

/// Counterclockwise vertex cycle of a 2-cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationDoc {
    pub face: String,
    pub boundary: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Asserted {
    #[serde(default)]
    pub regular: bool,
    #[serde(default)]
    pub positive: bool,
    #[serde(default)]
    pub simple: bool,
    #[serde(default)]
    pub elementary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub schema: String,
    pub cells: Vec<CellDoc>,
    pub fans: Vec<FanDoc>,
    pub orientation: Vec<OrientationDoc>,
    #[serde(default)]
    pub asserted: Asserted,
    /// Declared genus of the closed surface, checked against V − E + F.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftDoc {
    pub id: String,
    pub base: String,
    pub faces: Vec<String>,
}

/// Across base edge `edge`, inside base 2-cell `face`: which edge lift bounds
/// which face lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingDoc {
    pub edge: String,
    pub face: String,
    pub pairs: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamificationDoc {
    pub vertex: String,
    pub cycles: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeDoc {
    pub vertex: String,
    pub face: String,
    pub m: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiSectionDoc {
    pub schema: String,
    pub cells: Vec<CellDoc>,
    pub fans: Vec<FanDoc>,
    pub orientation: Vec<OrientationDoc>,
    #[serde(default)]
    pub asserted: Asserted,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    pub degree: usize,
    pub lifts: Vec<LiftDoc>,
    pub matchings: Vec<MatchingDoc>,
    pub branch: Vec<String>,
    pub ramification: Vec<RamificationDoc>,
    pub slopes: Vec<SlopeDoc>,
    #[serde(default)]
    pub label: String,
}

impl MultiSectionDoc {
    pub fn complex(&self) -> ComplexDoc {
        ComplexDoc {
            schema: COMPLEX_V1.into(),
            cells: self.cells.clone(),
            fans: self.fans.clone(),
            orientation: self.orientation.clone(),
            asserted: self.asserted.clone(),
            genus: self.genus,
            tags: self.tags.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub vec: Vec<i64>,
    pub q: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingEntryDoc {
    pub flag: [String; 2],
    pub element: Vec<FactorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDoc {
    pub schema: String,
    pub entries: Vec<GluingEntryDoc>,
    /// User assertion that the data comes from open gluing data.
    #[serde(default)]
    pub open_induced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordDoc {
    pub check: String,
    pub citation: String,
    pub verdict: String,
    #[serde(default)]
    pub witnesses: serde_json::Value,
    #[serde(default)]
    pub timing_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub schema: String,
    pub records: Vec<RecordDoc>,
}

fn check_schema(found: &str, want: &str) -> Result<()> {
    if found != want {
        return Err(Error::Invalid(format!("schema field is `{found}`, expected `{want}`")));
    }
    Ok(())
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Invalid(format!("{what}: {e} (line {}, column {})", e.line(), e.column())))
}

pub fn parse_complex(text: &str) -> Result<ComplexDoc> {
    let d: ComplexDoc = parse(text, COMPLEX_V1)?;
    check_schema(&d.schema, COMPLEX_V1)?;
    Ok(d)
}

pub fn parse_multisection(text: &str) -> Result<MultiSectionDoc> {
    let d: MultiSectionDoc = parse(text, MULTISECTION_V1)?;
    check_schema(&d.schema, MULTISECTION_V1)?;
    Ok(d)
}

pub fn parse_gluing(text: &str) -> Result<GluingDoc> {
    let d: GluingDoc = parse(text, GLUING_V1)?;
    check_schema(&d.schema, GLUING_V1)?;
    Ok(d)
}

pub fn parse_report(text: &str) -> Result<ReportDoc> {
    let d: ReportDoc = parse(text, REPORT_V1)?;
    check_schema(&d.schema, REPORT_V1)?;
    Ok(d)
}

pub fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("documents serialize") + "\n"
}
