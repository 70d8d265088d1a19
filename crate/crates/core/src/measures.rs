//! Local similarity measures and the global retrieval measure.
//!
//! For every descriptor present in both cases four local measures are
//! taken (value, state, presence, operating mode). Their product is summed
//! and normalised by the number of descriptors that count as present.

use crate::case_model::{align, AlignmentPair, Case, DescriptorValue, OperatingMode, Profiles};
use crate::error::{Error, Result};
use crate::fuzzy::FuzzyProfile;
use crate::taxonomy::Taxonomy;

/// `Typical` is the baseline that ignores imperfections. `Enhanced`
/// corrects imprecise numbers and drops uncertain descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ScoringMode {
    Typical,
    #[default]
    Enhanced,
}

impl ScoringMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoringMode::Typical => "typical",
            ScoringMode::Enhanced => "enhanced",
        }
    }
}

impl std::str::FromStr for ScoringMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "typical" => Ok(ScoringMode::Typical),
            "enhanced" => Ok(ScoringMode::Enhanced),
            other => Err(format!(
                "unknown scoring mode `{other}` (expected typical|enhanced)"
            )),
        }
    }
}

/// Shared read-only knowledge for scoring.
#[derive(Debug, Clone, Copy)]
pub struct ScoringContext<'a> {
    pub taxonomy: &'a Taxonomy,
    pub profiles: &'a Profiles,
    pub mode: ScoringMode,
}

impl<'a> ScoringContext<'a> {
    pub fn new(taxonomy: &'a Taxonomy, profiles: &'a Profiles, mode: ScoringMode) -> Self {
        Self {
            taxonomy,
            profiles,
            mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalScores {
    pub descriptor_id: String,
    pub phi_value: f64,
    pub phi_state: f64,
    pub phi_presence: f64,
    pub phi_om: f64,
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalScore {
    pub score: f64,
    pub breakdown: Vec<LocalScores>,
}

/// Presence-normalised ratio over the breakdown, summed in breakdown order.
pub fn ratio_from_breakdown(breakdown: &[LocalScores]) -> f64 {
    let (num, den) = breakdown
        .iter()
        .fold((0.0, 0.0), |(n, d), l| (n + l.product, d + l.phi_presence));
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn phi_presence(pair: Option<&AlignmentPair<'_>>, mode: ScoringMode) -> f64 {
    match pair {
        None => 0.0,
        Some(p)
            if mode == ScoringMode::Enhanced
                && (p.target.flags.uncertain || p.source.flags.uncertain) =>
        {
            0.0
        }
        Some(_) => 1.0,
    }
}

pub fn phi_state(pair: &AlignmentPair<'_>) -> f64 {
    let agree = match (&pair.target.state, &pair.source.state) {
        (None, None) => true,
        (Some(a), Some(b)) => a.to_lowercase() == b.to_lowercase(),
        _ => false,
    };
    if agree {
        1.0
    } else {
        0.0
    }
}

pub fn phi_om(pair: &AlignmentPair<'_>) -> f64 {
    use OperatingMode::*;
    match (pair.target.operating_mode, pair.source.operating_mode) {
        (Normal, Normal) | (Abnormal, Abnormal) | (Unspecified, Unspecified) => 1.0,
        _ => 0.0,
    }
}

/// Enhanced mode snaps an imprecise target reading before comparing.
/// Correction is idempotent, so an already prepared target is unaffected.
fn effective_target_magnitude(
    pair: &AlignmentPair<'_>,
    magnitude: f64,
    profile: &FuzzyProfile,
) -> Result<f64> {
    if pair.target.flags.imprecise {
        profile.correct_imprecise(magnitude)
    } else {
        Ok(magnitude)
    }
}

pub fn phi_value(
    pair: &AlignmentPair<'_>,
    taxonomy: &Taxonomy,
    profile: Option<&FuzzyProfile>,
    mode: ScoringMode,
) -> Result<f64> {
    match (&pair.target.value, &pair.source.value) {
        (DescriptorValue::Symbolic(a), DescriptorValue::Symbolic(b)) => {
            taxonomy.value_similarity(a, b)
        }
        (
            DescriptorValue::Numeric {
                magnitude: x,
                unit: ux,
            },
            DescriptorValue::Numeric {
                magnitude: y,
                unit: uy,
            },
        ) => {
            if ux != uy {
                return Ok(0.0);
            }
            match (mode, profile) {
                (ScoringMode::Enhanced, None) => {
                    Err(Error::MissingProfile(pair.descriptor_id.to_string()))
                }
                (ScoringMode::Enhanced, Some(p)) => {
                    let x = effective_target_magnitude(pair, *x, p)?;
                    Ok(if p.same_class(x, *y)? { 1.0 } else { 0.0 })
                }
                (ScoringMode::Typical, Some(p)) => {
                    let (lo, hi) = p.domain();
                    let span = hi - lo;
                    if span <= 0.0 {
                        return Ok(if x == y { 1.0 } else { 0.0 });
                    }
                    Ok((1.0 - (x - y).abs() / span).clamp(0.0, 1.0))
                }
                (ScoringMode::Typical, None) => Ok(if x == y { 1.0 } else { 0.0 }),
            }
        }
        // a label and a number never match
        _ => Ok(0.0),
    }
}

pub fn local_scores(pair: &AlignmentPair<'_>, ctx: &ScoringContext<'_>) -> Result<LocalScores> {
    let presence = phi_presence(Some(pair), ctx.mode);
    if presence == 0.0 {
        return Ok(LocalScores {
            descriptor_id: pair.descriptor_id.to_string(),
            phi_value: 0.0,
            phi_state: 0.0,
            phi_presence: 0.0,
            phi_om: 0.0,
            product: 0.0,
        });
    }
    let value = phi_value(
        pair,
        ctx.taxonomy,
        ctx.profiles.get(pair.descriptor_id),
        ctx.mode,
    )?;
    let state = phi_state(pair);
    let om = phi_om(pair);
    Ok(LocalScores {
        descriptor_id: pair.descriptor_id.to_string(),
        phi_value: value,
        phi_state: state,
        phi_presence: presence,
        phi_om: om,
        product: value * state * presence * om,
    })
}

/// Global retrieval measure of a source case for the target.
pub fn retrieval_measure(
    target: &Case,
    source: &Case,
    ctx: &ScoringContext<'_>,
) -> Result<RetrievalScore> {
    let breakdown = align(target, source)
        .iter()
        .map(|pair| local_scores(pair, ctx))
        .collect::<Result<Vec<_>>>()?;
    if breakdown.iter().all(|l| l.phi_presence == 0.0) {
        return Ok(RetrievalScore {
            score: 0.0,
            breakdown: Vec::new(),
        });
    }
    Ok(RetrievalScore {
        score: ratio_from_breakdown(&breakdown),
        breakdown,
    })
}
