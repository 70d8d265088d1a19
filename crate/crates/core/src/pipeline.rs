//! Query procedure: correct imprecise readings, rank sources by the
//! retrieval measure, refine the retrieved set by the adaptation measure
//! and propose the solution of the selected case.

use std::cmp::Ordering;
use std::num::NonZeroUsize;

use crate::adaptation::{adaptation_measure, AdaptationTerm};
use crate::case_model::{Case, CaseBase, DescriptorValue, Profiles, Solution};
use crate::error::{Error, Result};
use crate::measures::{retrieval_measure, LocalScores, ScoringContext, ScoringMode};

pub const DEFAULT_TOP_K: NonZeroUsize = match NonZeroUsize::new(3) {
    Some(k) => k,
    None => unreachable!(),
};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCase {
    pub case_id: String,
    pub m_r: f64,
    /// Set only for cases that survived retrieval and were adapted.
    pub m_a: Option<f64>,
    pub breakdown_r: Vec<LocalScores>,
    pub breakdown_a: Vec<AdaptationTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub descriptor_id: String,
    pub original: f64,
    pub corrected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisOutcome {
    pub selected_case_id: Option<String>,
    pub solution: Option<Solution>,
    pub ranking: Vec<ScoredCase>,
    pub mode: ScoringMode,
    pub corrections_applied: Vec<Correction>,
}

/// Replace every imprecise numeric value of the target by its fuzzy
/// correction. Flags are kept so the correction stays visible.
pub fn prepare_target(target: &Case, profiles: &Profiles) -> Result<(Case, Vec<Correction>)> {
    let mut prepared = target.clone();
    let mut log = Vec::new();
    for d in prepared
        .descriptors
        .iter_mut()
        .filter(|d| d.flags.imprecise)
    {
        if let DescriptorValue::Numeric { magnitude, .. } = &mut d.value {
            let profile = profiles
                .get(&d.id)
                .ok_or_else(|| Error::MissingProfile(d.id.clone()))?;
            let corrected = profile.correct_imprecise(*magnitude)?;
            log.push(Correction {
                descriptor_id: d.id.clone(),
                original: *magnitude,
                corrected,
            });
            *magnitude = corrected;
        }
    }
    Ok((prepared, log))
}

fn by_retrieval(a: &ScoredCase, b: &ScoredCase) -> Ordering {
    b.m_r
        .total_cmp(&a.m_r)
        .then_with(|| a.case_id.cmp(&b.case_id))
}

fn by_adaptation(a: &ScoredCase, b: &ScoredCase) -> Ordering {
    let ma = a.m_a.unwrap_or(f64::NEG_INFINITY);
    let mb = b.m_a.unwrap_or(f64::NEG_INFINITY);
    mb.total_cmp(&ma).then_with(|| by_retrieval(a, b))
}

fn rank(
    target: &Case,
    case_base: &CaseBase,
    mode: ScoringMode,
    top_k: NonZeroUsize,
) -> Result<(Case, Vec<Correction>, Vec<ScoredCase>)> {
    let (target, corrections) = match mode {
        ScoringMode::Enhanced => prepare_target(target, case_base.profiles())?,
        ScoringMode::Typical => (target.clone(), Vec::new()),
    };
    let ctx = ScoringContext::new(case_base.taxonomy(), case_base.profiles(), mode);
    let mut ranking = case_base
        .sources()
        .filter(|s| s.id != target.id)
        .map(|source| {
            let r = retrieval_measure(&target, source, &ctx)?;
            Ok(ScoredCase {
                case_id: source.id.clone(),
                m_r: r.score,
                m_a: None,
                breakdown_r: r.breakdown,
                breakdown_a: Vec::new(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranking.sort_by(by_retrieval);
    ranking.truncate(top_k.get());
    Ok((target, corrections, ranking))
}

/// Score every source case, best first; ties go to the smaller id.
pub fn retrieve(
    target: &Case,
    case_base: &CaseBase,
    mode: ScoringMode,
    top_k: NonZeroUsize,
) -> Result<Vec<ScoredCase>> {
    rank(target, case_base, mode, top_k).map(|(_, _, ranking)| ranking)
}

/// Retrieval only, packaged as an outcome that proposes the best-ranked case.
pub fn retrieval_outcome(
    target: &Case,
    case_base: &CaseBase,
    mode: ScoringMode,
    top_k: NonZeroUsize,
) -> Result<DiagnosisOutcome> {
    let (_, corrections, ranking) = rank(target, case_base, mode, top_k)?;
    Ok(outcome(case_base, ranking, mode, corrections))
}

/// Enhanced retrieval followed by adaptation of the retrieved cases.
pub fn diagnose(
    target: &Case,
    case_base: &CaseBase,
    top_k: NonZeroUsize,
) -> Result<DiagnosisOutcome> {
    diagnose_with_mode(target, case_base, ScoringMode::Enhanced, top_k)
}

pub fn diagnose_with_mode(
    target: &Case,
    case_base: &CaseBase,
    mode: ScoringMode,
    top_k: NonZeroUsize,
) -> Result<DiagnosisOutcome> {
    let (prepared, corrections, mut ranking) = rank(target, case_base, mode, top_k)?;
    for scored in &mut ranking {
        let source = case_base
            .case(&scored.case_id)
            .expect("ranked case comes from the case base");
        let a = adaptation_measure(
            &prepared,
            source,
            case_base.taxonomy(),
            case_base.profiles(),
        )?;
        scored.m_a = Some(a.score);
        scored.breakdown_a = a.breakdown;
    }
    let selected = ranking.iter().min_by(|a, b| by_adaptation(a, b)).cloned();
    let mut result = outcome(case_base, ranking, mode, corrections);
    if let Some(best) = selected {
        result.solution = case_base
            .case(&best.case_id)
            .and_then(|c| c.solution.clone());
        result.selected_case_id = Some(best.case_id);
    }
    Ok(result)
}

fn outcome(
    case_base: &CaseBase,
    ranking: Vec<ScoredCase>,
    mode: ScoringMode,
    corrections: Vec<Correction>,
) -> DiagnosisOutcome {
    let selected_case_id = ranking.first().map(|s| s.case_id.clone());
    let solution = selected_case_id
        .as_deref()
        .and_then(|id| case_base.case(id))
        .and_then(|c| c.solution.clone());
    DiagnosisOutcome {
        selected_case_id,
        solution,
        ranking,
        mode,
        corrections_applied: corrections,
    }
}
