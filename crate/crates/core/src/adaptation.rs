//! Operating-mode weighted adaptation measure.
//!
//! Among the retrieved cases, the one whose abnormal components line up
//! with the target's is the most adaptable. Each co-present descriptor
//! that carries an operating mode on either side contributes its value
//! similarity weighted by λ ∈ {1, 2, 4}.

use crate::case_model::{align, Case, OperatingMode, Profiles};
use crate::error::Result;
use crate::measures::{phi_presence, phi_value, ScoringMode};
use crate::taxonomy::Taxonomy;

/// Weight `2^k` where `k` counts the abnormal sides of a descriptor pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LambdaWeight(u8);

impl LambdaWeight {
    pub const NORMAL: Self = Self(1);
    pub const MIXED: Self = Self(2);
    pub const ABNORMAL: Self = Self(4);

    pub fn value(self) -> f64 {
        f64::from(self.0)
    }

    pub fn exponent(self) -> u32 {
        self.0.trailing_zeros()
    }
}

/// Unspecified modes weigh like `Normal`.
pub fn lambda_weight(target_mode: OperatingMode, source_mode: OperatingMode) -> LambdaWeight {
    let abnormal = [target_mode, source_mode]
        .iter()
        .filter(|m| **m == OperatingMode::Abnormal)
        .count();
    match abnormal {
        0 => LambdaWeight::NORMAL,
        1 => LambdaWeight::MIXED,
        _ => LambdaWeight::ABNORMAL,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationTerm {
    pub descriptor_id: String,
    pub lambda: f64,
    pub phi_presence: f64,
    pub phi_value: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationScore {
    pub score: f64,
    pub breakdown: Vec<AdaptationTerm>,
}

pub fn ratio_from_terms(terms: &[AdaptationTerm]) -> f64 {
    let (num, den) = terms
        .iter()
        .fold((0.0, 0.0), |(n, d), t| (n + t.weighted, d + t.phi_presence));
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Adaptation measure of a retrieved source for the target.
///
/// Uncertain descriptors are kept. Numeric values are compared by fuzzy
/// class after correcting the target reading.
pub fn adaptation_measure(
    target: &Case,
    source: &Case,
    taxonomy: &Taxonomy,
    profiles: &Profiles,
) -> Result<AdaptationScore> {
    let mut breakdown = Vec::new();
    for pair in align(target, source) {
        if !pair.target.operating_mode.is_specified() && !pair.source.operating_mode.is_specified()
        {
            continue;
        }
        // Typical presence: uncertainty does not exclude a descriptor here.
        let presence = phi_presence(Some(&pair), ScoringMode::Typical);
        let value = phi_value(
            &pair,
            taxonomy,
            profiles.get(pair.descriptor_id),
            ScoringMode::Enhanced,
        )?;
        let lambda = lambda_weight(pair.target.operating_mode, pair.source.operating_mode).value();
        breakdown.push(AdaptationTerm {
            descriptor_id: pair.descriptor_id.to_string(),
            lambda,
            phi_presence: presence,
            phi_value: value,
            weighted: lambda * presence * value,
        });
    }
    Ok(AdaptationScore {
        score: ratio_from_terms(&breakdown),
        breakdown,
    })
}
