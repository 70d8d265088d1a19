//! Cases, descriptors and the imperfection annotations they carry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::fuzzy::FuzzyProfile;
use crate::taxonomy::Taxonomy;

/// Fuzzy profiles keyed by descriptor id.
pub type Profiles = BTreeMap<String, FuzzyProfile>;

/// Operating mode of the component a descriptor refers to.
///
/// `Unspecified` is a blank cell: it never stands in for `Normal` when
/// comparing modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OperatingMode {
    Normal,
    Abnormal,
    #[default]
    Unspecified,
}

impl OperatingMode {
    pub fn is_specified(self) -> bool {
        self != OperatingMode::Unspecified
    }
}

/// Imprecision and uncertainty may co-occur. Incompleteness is never a
/// flag: an incomplete descriptor is simply absent from the case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImperfectionFlags {
    pub imprecise: bool,
    pub uncertain: bool,
}

impl ImperfectionFlags {
    pub const NONE: Self = Self {
        imprecise: false,
        uncertain: false,
    };

    pub fn any(self) -> bool {
        self.imprecise || self.uncertain
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorValue {
    /// A taxonomy node name.
    Symbolic(String),
    Numeric {
        magnitude: f64,
        unit: String,
    },
}

impl DescriptorValue {
    pub fn symbolic(label: impl Into<String>) -> Self {
        DescriptorValue::Symbolic(label.into())
    }

    pub fn numeric(magnitude: f64, unit: impl Into<String>) -> Self {
        DescriptorValue::Numeric {
            magnitude,
            unit: unit.into(),
        }
    }
}

impl fmt::Display for DescriptorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescriptorValue::Symbolic(l) => f.write_str(l),
            DescriptorValue::Numeric { magnitude, unit } if unit.is_empty() => {
                write!(f, "{magnitude}")
            }
            DescriptorValue::Numeric { magnitude, unit } => write!(f, "{magnitude} {unit}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub id: String,
    pub name: String,
    pub value: DescriptorValue,
    pub state: Option<String>,
    pub operating_mode: OperatingMode,
    pub flags: ImperfectionFlags,
}

impl Descriptor {
    pub fn new(id: impl Into<String>, name: impl Into<String>, value: DescriptorValue) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            value,
            state: None,
            operating_mode: OperatingMode::Unspecified,
            flags: ImperfectionFlags::NONE,
        }
    }

    pub fn with_state(mut self, state: impl Into<String>) -> Self {
        self.state = Some(state.into());
        self
    }

    pub fn with_mode(mut self, mode: OperatingMode) -> Self {
        self.operating_mode = mode;
        self
    }

    pub fn imprecise(mut self) -> Self {
        self.flags.imprecise = true;
        self
    }

    pub fn uncertain(mut self) -> Self {
        self.flags.uncertain = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Taxonomy node of the component found at fault.
    pub failing_component: String,
    pub action: String,
}

/// A problem description plus, for source cases, its solution.
///
/// Descriptors keep insertion order; ids are expected to be unique, which
/// [`validate_case`] checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub id: String,
    pub kind: CaseKind,
    pub descriptors: Vec<Descriptor>,
    pub solution: Option<Solution>,
}

impl Case {
    pub fn new(id: impl Into<String>, kind: CaseKind) -> Self {
        Self {
            id: id.into(),
            kind,
            descriptors: Vec::new(),
            solution: None,
        }
    }

    pub fn source(id: impl Into<String>) -> Self {
        Self::new(id, CaseKind::Source)
    }

    pub fn target(id: impl Into<String>) -> Self {
        Self::new(id, CaseKind::Target)
    }

    pub fn with(mut self, descriptor: Descriptor) -> Self {
        self.descriptors.push(descriptor);
        self
    }

    pub fn with_solution(
        mut self,
        component: impl Into<String>,
        action: impl Into<String>,
    ) -> Self {
        self.solution = Some(Solution {
            failing_component: component.into(),
            action: action.into(),
        });
        self
    }

    /// First descriptor with the given id.
    pub fn descriptor(&self, id: &str) -> Option<&Descriptor> {
        self.descriptors.iter().find(|d| d.id == id)
    }

    /// Descriptors keyed by id; on duplicate ids the first one wins.
    pub fn descriptor_map(&self) -> BTreeMap<&str, &Descriptor> {
        let mut map = BTreeMap::new();
        for d in &self.descriptors {
            map.entry(d.id.as_str()).or_insert(d);
        }
        map
    }

    /// Copy of the case without the given descriptor ids.
    pub fn without(&self, ids: &BTreeSet<String>) -> Case {
        Case {
            descriptors: self
                .descriptors
                .iter()
                .filter(|d| !ids.contains(&d.id))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }
}

/// One descriptor present in both the target and a source case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentPair<'a> {
    pub descriptor_id: &'a str,
    pub target: &'a Descriptor,
    pub source: &'a Descriptor,
}

/// Pairs for the descriptor ids present in both cases, ascending by id.
pub fn align<'a>(target: &'a Case, source: &'a Case) -> Vec<AlignmentPair<'a>> {
    let source_map = source.descriptor_map();
    target
        .descriptor_map()
        .into_iter()
        .filter_map(|(id, t)| {
            source_map.get(id).map(|s| AlignmentPair {
                descriptor_id: id,
                target: t,
                source: s,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    UnknownLabel(String),
    MissingProfile,
    ValueOutOfDomain(f64),
    DuplicateDescriptor,
    TargetWithSolution,
    DuplicateCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub case_id: String,
    pub descriptor_id: Option<String>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case `{}`", self.case_id)?;
        if let Some(d) = &self.descriptor_id {
            write!(f, ", descriptor `{d}`")?;
        }
        match &self.kind {
            ViolationKind::UnknownLabel(l) => write!(f, ": unknown taxonomy label `{l}`"),
            ViolationKind::MissingProfile => f.write_str(": missing fuzzy profile"),
            ViolationKind::ValueOutOfDomain(v) => {
                write!(f, ": value {v} lies outside its fuzzy profile domain")
            }
            ViolationKind::DuplicateDescriptor => f.write_str(": duplicate descriptor id"),
            ViolationKind::TargetWithSolution => f.write_str(": target case carries a solution"),
            ViolationKind::DuplicateCase => f.write_str(": duplicate case id"),
        }
    }
}

/// Check a case against the taxonomy and fuzzy profiles. An empty report
/// means the case can be scored.
pub fn validate_case(case: &Case, taxonomy: &Taxonomy, profiles: &Profiles) -> Vec<Violation> {
    let violation = |descriptor_id: Option<&str>, kind| Violation {
        case_id: case.id.clone(),
        descriptor_id: descriptor_id.map(str::to_string),
        kind,
    };
    let mut report = Vec::new();
    let mut seen = BTreeSet::new();
    for d in &case.descriptors {
        if !seen.insert(d.id.as_str()) {
            report.push(violation(Some(&d.id), ViolationKind::DuplicateDescriptor));
        }
        match &d.value {
            DescriptorValue::Symbolic(label) => {
                if !taxonomy.contains(label) {
                    report.push(violation(
                        Some(&d.id),
                        ViolationKind::UnknownLabel(label.clone()),
                    ));
                }
            }
            DescriptorValue::Numeric { magnitude, .. } => match profiles.get(&d.id) {
                None if d.flags.imprecise => {
                    report.push(violation(Some(&d.id), ViolationKind::MissingProfile))
                }
                Some(p) if !p.in_domain(*magnitude) => report.push(violation(
                    Some(&d.id),
                    ViolationKind::ValueOutOfDomain(*magnitude),
                )),
                _ => {}
            },
        }
    }
    match (&case.solution, case.kind) {
        (Some(_), CaseKind::Target) => {
            report.push(violation(None, ViolationKind::TargetWithSolution))
        }
        (Some(s), CaseKind::Source) if !taxonomy.contains(&s.failing_component) => {
            report.push(violation(
                None,
                ViolationKind::UnknownLabel(s.failing_component.clone()),
            ))
        }
        _ => {}
    }
    report
}

/// Immutable snapshot of the knowledge used for a query.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseBase {
    taxonomy: Taxonomy,
    profiles: Profiles,
    cases: Vec<Case>,
}

impl CaseBase {
    /// Builds a case base, rejecting it with the full list of violations
    /// when any case is invalid or a case id repeats.
    pub fn new(
        taxonomy: Taxonomy,
        profiles: Profiles,
        cases: Vec<Case>,
    ) -> Result<Self, Vec<Violation>> {
        let mut report = Vec::new();
        let mut ids = BTreeSet::new();
        for case in &cases {
            if !ids.insert(case.id.as_str()) {
                report.push(Violation {
                    case_id: case.id.clone(),
                    descriptor_id: None,
                    kind: ViolationKind::DuplicateCase,
                });
            }
            report.extend(validate_case(case, &taxonomy, &profiles));
        }
        if report.is_empty() {
            Ok(Self {
                taxonomy,
                profiles,
                cases,
            })
        } else {
            Err(report)
        }
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn profiles(&self) -> &Profiles {
        &self.profiles
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn case(&self, id: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.kind == CaseKind::Source)
    }

    pub fn targets(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.kind == CaseKind::Target)
    }
}
