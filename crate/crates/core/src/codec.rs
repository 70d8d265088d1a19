//! JSON documents for case bases, target cases and diagnosis outcomes.
//!
//! Encoding is deterministic: object keys are sorted and floating point
//! values are written in shortest round-trip form, so decoding an encoded
//! outcome reproduces every score bit for bit.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adaptation::AdaptationTerm;
use crate::case_model::{
    validate_case, Case, CaseBase, CaseKind, Descriptor, DescriptorValue, ImperfectionFlags,
    OperatingMode, Profiles, Solution, ViolationKind,
};
use crate::fuzzy::{FuzzyProfile, FuzzySubset};
use crate::measures::{LocalScores, ScoringMode};
use crate::pipeline::{Correction, DiagnosisOutcome, ScoredCase};
use crate::taxonomy::Taxonomy;

pub const FORMAT_VERSION: u32 = 1;

/// A problem located in a document, either by line/column (syntax) or by
/// field path (content).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionedError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for PositionedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("invalid document:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<PositionedError>),
}

impl From<serde_json::Error> for DecodeError {
    fn from(e: serde_json::Error) -> Self {
        DecodeError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseBaseDocument {
    pub format_version: u32,
    pub taxonomy: Vec<NodeRecord>,
    #[serde(default)]
    pub fuzzy_profiles: Vec<ProfileRecord>,
    #[serde(default)]
    pub cases: Vec<CaseRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRecord {
    pub descriptor_id: String,
    pub domain_lower: f64,
    pub domain_upper: f64,
    pub prototype: f64,
    pub half_width: f64,
    #[serde(default)]
    pub subsets: Vec<SubsetRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetRecord {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindRecord {
    Source,
    Target,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseRecord {
    pub id: String,
    pub kind: KindRecord,
    #[serde(default)]
    pub descriptors: Vec<DescriptorRecord>,
    #[serde(default)]
    pub solution: Option<SolutionRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub failing_component: String,
    pub action: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueRecord {
    Symbolic {
        symbolic: String,
    },
    Numeric {
        numeric: f64,
        #[serde(default)]
        unit: String,
    },
}

/// Operating modes use the case-sheet notation: `"N"`, `"A"` or null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeRecord {
    #[serde(rename = "N", alias = "normal", alias = "Normal")]
    Normal,
    #[serde(rename = "A", alias = "abnormal", alias = "Abnormal")]
    Abnormal,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsRecord {
    #[serde(default)]
    pub imprecise: bool,
    #[serde(default)]
    pub uncertain: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorRecord {
    pub id: String,
    pub name: String,
    pub value: ValueRecord,
    #[serde(default)]
    pub state: Option<String>,
    #[serde(default)]
    pub operating_mode: Option<ModeRecord>,
    #[serde(default)]
    pub flags: FlagsRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDocument {
    pub format_version: u32,
    pub case: CaseRecord,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

fn check_version(text: &str) -> Result<(), DecodeError> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.format_version != FORMAT_VERSION {
        return Err(DecodeError::Version(probe.format_version));
    }
    Ok(())
}

impl From<&CaseRecord> for Case {
    fn from(r: &CaseRecord) -> Self {
        Case {
            id: r.id.clone(),
            kind: match r.kind {
                KindRecord::Source => CaseKind::Source,
                KindRecord::Target => CaseKind::Target,
            },
            descriptors: r.descriptors.iter().map(Descriptor::from).collect(),
            solution: r.solution.as_ref().map(|s| Solution {
                failing_component: s.failing_component.clone(),
                action: s.action.clone(),
            }),
        }
    }
}

impl From<&DescriptorRecord> for Descriptor {
    fn from(r: &DescriptorRecord) -> Self {
        Descriptor {
            id: r.id.clone(),
            name: r.name.clone(),
            value: match &r.value {
                ValueRecord::Symbolic { symbolic } => DescriptorValue::Symbolic(symbolic.clone()),
                ValueRecord::Numeric { numeric, unit } => DescriptorValue::Numeric {
                    magnitude: *numeric,
                    unit: unit.clone(),
                },
            },
            state: r.state.clone(),
            operating_mode: match r.operating_mode {
                Some(ModeRecord::Normal) => OperatingMode::Normal,
                Some(ModeRecord::Abnormal) => OperatingMode::Abnormal,
                None => OperatingMode::Unspecified,
            },
            flags: ImperfectionFlags {
                imprecise: r.flags.imprecise,
                uncertain: r.flags.uncertain,
            },
        }
    }
}

impl From<&Case> for CaseRecord {
    fn from(c: &Case) -> Self {
        CaseRecord {
            id: c.id.clone(),
            kind: match c.kind {
                CaseKind::Source => KindRecord::Source,
                CaseKind::Target => KindRecord::Target,
            },
            descriptors: c.descriptors.iter().map(DescriptorRecord::from).collect(),
            solution: c.solution.as_ref().map(|s| SolutionRecord {
                failing_component: s.failing_component.clone(),
                action: s.action.clone(),
            }),
        }
    }
}

impl From<&Descriptor> for DescriptorRecord {
    fn from(d: &Descriptor) -> Self {
        DescriptorRecord {
            id: d.id.clone(),
            name: d.name.clone(),
            value: match &d.value {
                DescriptorValue::Symbolic(s) => ValueRecord::Symbolic {
                    symbolic: s.clone(),
                },
                DescriptorValue::Numeric { magnitude, unit } => ValueRecord::Numeric {
                    numeric: *magnitude,
                    unit: unit.clone(),
                },
            },
            state: d.state.clone(),
            operating_mode: match d.operating_mode {
                OperatingMode::Normal => Some(ModeRecord::Normal),
                OperatingMode::Abnormal => Some(ModeRecord::Abnormal),
                OperatingMode::Unspecified => None,
            },
            flags: FlagsRecord {
                imprecise: d.flags.imprecise,
                uncertain: d.flags.uncertain,
            },
        }
    }
}

fn descriptor_path(case_index: usize, case: &Case, descriptor_id: &str, last: bool) -> String {
    let mut positions = case
        .descriptors
        .iter()
        .enumerate()
        .filter(|(_, d)| d.id == descriptor_id)
        .map(|(j, _)| j);
    let j = if last {
        positions.next_back()
    } else {
        positions.next()
    };
    match j {
        Some(j) => format!("cases[{case_index}].descriptors[{j}]"),
        None => format!("cases[{case_index}]"),
    }
}

fn case_errors(
    index: usize,
    case: &Case,
    taxonomy: &Taxonomy,
    profiles: &Profiles,
) -> Vec<PositionedError> {
    validate_case(case, taxonomy, profiles)
        .into_iter()
        .map(|v| {
            let path = match &v.descriptor_id {
                Some(d) => {
                    descriptor_path(index, case, d, v.kind == ViolationKind::DuplicateDescriptor)
                }
                None => format!("cases[{index}].solution"),
            };
            PositionedError {
                path,
                message: v.to_string(),
            }
        })
        .collect()
}

fn build_case_base(doc: &CaseBaseDocument) -> Result<CaseBase, DecodeError> {
    let mut errors = Vec::new();

    let taxonomy = match Taxonomy::from_records(
        doc.taxonomy
            .iter()
            .map(|n| (n.name.clone(), n.parent.clone())),
    ) {
        Ok(t) => Some(t),
        Err(e) => {
            errors.push(PositionedError {
                path: "taxonomy".into(),
                message: e.to_string(),
            });
            None
        }
    };

    let mut profiles = Profiles::new();
    for (i, p) in doc.fuzzy_profiles.iter().enumerate() {
        let built = FuzzyProfile::new(
            p.descriptor_id.clone(),
            (p.domain_lower, p.domain_upper),
            p.prototype,
            p.half_width,
            p.subsets
                .iter()
                .map(|s| FuzzySubset::new(s.label.clone(), s.lower, s.upper))
                .collect(),
        );
        match built {
            Ok(profile) => {
                if profiles.insert(p.descriptor_id.clone(), profile).is_some() {
                    errors.push(PositionedError {
                        path: format!("fuzzy_profiles[{i}]"),
                        message: format!("duplicate profile for `{}`", p.descriptor_id),
                    });
                }
            }
            Err(e) => errors.push(PositionedError {
                path: format!("fuzzy_profiles[{i}]"),
                message: e.to_string(),
            }),
        }
    }

    let cases: Vec<Case> = doc.cases.iter().map(Case::from).collect();
    let mut seen = BTreeSet::new();
    for (i, case) in cases.iter().enumerate() {
        if !seen.insert(case.id.as_str()) {
            errors.push(PositionedError {
                path: format!("cases[{i}].id"),
                message: format!("duplicate case id `{}`", case.id),
            });
        }
        if let Some(t) = &taxonomy {
            errors.extend(case_errors(i, case, t, &profiles));
        }
    }

    match taxonomy {
        Some(t) if errors.is_empty() => CaseBase::new(t, profiles, cases).map_err(|vs| {
            DecodeError::Invalid(
                vs.into_iter()
                    .map(|v| PositionedError {
                        path: format!("cases[{}]", v.case_id),
                        message: v.to_string(),
                    })
                    .collect(),
            )
        }),
        _ => Err(DecodeError::Invalid(errors)),
    }
}

/// Parse and validate a case-base document. Any error rejects the whole
/// document; all content errors are reported together.
pub fn decode_case_base(text: &str) -> Result<CaseBase, DecodeError> {
    check_version(text)?;
    let doc: CaseBaseDocument = serde_json::from_str(text)?;
    build_case_base(&doc)
}

/// Parse a stand-alone case document and validate it against the
/// knowledge of an existing case base.
pub fn decode_target(text: &str, case_base: &CaseBase) -> Result<Case, DecodeError> {
    check_version(text)?;
    let doc: TargetDocument = serde_json::from_str(text)?;
    let case = Case::from(&doc.case);
    let errors: Vec<PositionedError> =
        case_errors(0, &case, case_base.taxonomy(), case_base.profiles())
            .into_iter()
            .map(|e| PositionedError {
                path: e.path.replacen("cases[0]", "case", 1),
                message: e.message,
            })
            .collect();
    if errors.is_empty() {
        Ok(case)
    } else {
        Err(DecodeError::Invalid(errors))
    }
}

fn render<T: Serialize>(value: &T) -> String {
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(value).expect("document types always serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("values always serialize");
    text.push('\n');
    text
}

pub fn case_base_document(case_base: &CaseBase) -> CaseBaseDocument {
    CaseBaseDocument {
        format_version: FORMAT_VERSION,
        taxonomy: case_base
            .taxonomy()
            .records()
            .map(|(name, parent)| NodeRecord {
                name: name.to_string(),
                parent: parent.map(str::to_string),
            })
            .collect(),
        fuzzy_profiles: case_base
            .profiles()
            .values()
            .map(|p| ProfileRecord {
                descriptor_id: p.descriptor_id().to_string(),
                domain_lower: p.domain().0,
                domain_upper: p.domain().1,
                prototype: p.prototype(),
                half_width: p.half_width(),
                subsets: p
                    .subsets()
                    .iter()
                    .map(|s| SubsetRecord {
                        label: s.label.clone(),
                        lower: s.lower,
                        upper: s.upper,
                    })
                    .collect(),
            })
            .collect(),
        cases: case_base.cases().iter().map(CaseRecord::from).collect(),
    }
}

pub fn encode_case_base(case_base: &CaseBase) -> String {
    render(&case_base_document(case_base))
}

pub fn encode_target(case: &Case) -> String {
    render(&TargetDocument {
        format_version: FORMAT_VERSION,
        case: CaseRecord::from(case),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeDocument {
    format_version: u32,
    mode: String,
    selected_case_id: Option<String>,
    solution: Option<SolutionRecord>,
    corrections_applied: Vec<CorrectionRecord>,
    ranking: Vec<ScoredRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrectionRecord {
    descriptor_id: String,
    original: f64,
    corrected: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoredRecord {
    rank: usize,
    case_id: String,
    m_r: f64,
    m_a: Option<f64>,
    breakdown_r: Vec<LocalRecord>,
    breakdown_a: Vec<TermRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalRecord {
    descriptor_id: String,
    phi_value: f64,
    phi_state: f64,
    phi_presence: f64,
    phi_om: f64,
    product: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    descriptor_id: String,
    lambda: f64,
    phi_presence: f64,
    phi_value: f64,
    weighted: f64,
}

pub fn encode_outcome(outcome: &DiagnosisOutcome) -> String {
    let doc = OutcomeDocument {
        format_version: FORMAT_VERSION,
        mode: outcome.mode.as_str().to_string(),
        selected_case_id: outcome.selected_case_id.clone(),
        solution: outcome.solution.as_ref().map(|s| SolutionRecord {
            failing_component: s.failing_component.clone(),
            action: s.action.clone(),
        }),
        corrections_applied: outcome
            .corrections_applied
            .iter()
            .map(|c| CorrectionRecord {
                descriptor_id: c.descriptor_id.clone(),
                original: c.original,
                corrected: c.corrected,
            })
            .collect(),
        ranking: outcome
            .ranking
            .iter()
            .enumerate()
            .map(|(i, s)| ScoredRecord {
                rank: i + 1,
                case_id: s.case_id.clone(),
                m_r: s.m_r,
                m_a: s.m_a,
                breakdown_r: s
                    .breakdown_r
                    .iter()
                    .map(|l| LocalRecord {
                        descriptor_id: l.descriptor_id.clone(),
                        phi_value: l.phi_value,
                        phi_state: l.phi_state,
                        phi_presence: l.phi_presence,
                        phi_om: l.phi_om,
                        product: l.product,
                    })
                    .collect(),
                breakdown_a: s
                    .breakdown_a
                    .iter()
                    .map(|t| TermRecord {
                        descriptor_id: t.descriptor_id.clone(),
                        lambda: t.lambda,
                        phi_presence: t.phi_presence,
                        phi_value: t.phi_value,
                        weighted: t.weighted,
                    })
                    .collect(),
            })
            .collect(),
    };
    render(&doc)
}

pub fn decode_outcome(text: &str) -> Result<DiagnosisOutcome, DecodeError> {
    check_version(text)?;
    let doc: OutcomeDocument = serde_json::from_str(text)?;
    let mode = doc.mode.parse::<ScoringMode>().map_err(|m| {
        DecodeError::Invalid(vec![PositionedError {
            path: "mode".into(),
            message: m,
        }])
    })?;
    Ok(DiagnosisOutcome {
        selected_case_id: doc.selected_case_id,
        solution: doc.solution.map(|s| Solution {
            failing_component: s.failing_component,
            action: s.action,
        }),
        ranking: doc
            .ranking
            .into_iter()
            .map(|s| ScoredCase {
                case_id: s.case_id,
                m_r: s.m_r,
                m_a: s.m_a,
                breakdown_r: s
                    .breakdown_r
                    .into_iter()
                    .map(|l| LocalScores {
                        descriptor_id: l.descriptor_id,
                        phi_value: l.phi_value,
                        phi_state: l.phi_state,
                        phi_presence: l.phi_presence,
                        phi_om: l.phi_om,
                        product: l.product,
                    })
                    .collect(),
                breakdown_a: s
                    .breakdown_a
                    .into_iter()
                    .map(|t| AdaptationTerm {
                        descriptor_id: t.descriptor_id,
                        lambda: t.lambda,
                        phi_presence: t.phi_presence,
                        phi_value: t.phi_value,
                        weighted: t.weighted,
                    })
                    .collect(),
            })
            .collect(),
        mode,
        corrections_applied: doc
            .corrections_applied
            .into_iter()
            .map(|c| Correction {
                descriptor_id: c.descriptor_id,
                original: c.original,
                corrected: c.corrected,
            })
            .collect(),
    })
}
