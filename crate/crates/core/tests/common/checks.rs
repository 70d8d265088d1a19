//! Property checks over generated inputs. Each returns a proptest failure
//! instead of panicking so the acceptance runner can report it.

use std::collections::BTreeSet;

use cbr_core::adaptation::ratio_from_terms;
use cbr_core::codec::{decode_case_base, decode_outcome, encode_case_base, encode_outcome};
use cbr_core::measures::ratio_from_breakdown;
use cbr_core::pipeline::diagnose_with_mode;
use cbr_core::{
    adaptation_measure, align, retrieval_measure, retrieve, Case, Descriptor, DescriptorValue,
    FuzzyProfile, OperatingMode, ScoringContext, ScoringMode, Taxonomy,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::oracle::naive_ranking;
use super::World;

type Check = Result<(), TestCaseError>;

const MODES: [ScoringMode; 2] = [ScoringMode::Typical, ScoringMode::Enhanced];

fn sources(world: &World) -> impl Iterator<Item = &Case> {
    world.case_base.sources()
}

fn ctx(world: &World, mode: ScoringMode) -> ScoringContext<'_> {
    ScoringContext::new(world.case_base.taxonomy(), world.case_base.profiles(), mode)
}

fn m_r(world: &World, target: &Case, source: &Case, mode: ScoringMode) -> f64 {
    retrieval_measure(target, source, &ctx(world, mode))
        .unwrap()
        .score
}

fn m_a(world: &World, target: &Case, source: &Case) -> f64 {
    adaptation_measure(
        target,
        source,
        world.case_base.taxonomy(),
        world.case_base.profiles(),
    )
    .unwrap()
    .score
}

// ---------------------------------------------------------------- retrieval

pub fn retrieval_bounds(world: &World) -> Check {
    for mode in MODES {
        for s in sources(world) {
            let score = m_r(world, &world.target, s, mode);
            prop_assert!((0.0..=1.0).contains(&score), "M_R = {score}");
        }
    }
    Ok(())
}

/// Clean cases match themselves perfectly in Typical mode, and in
/// Enhanced mode whenever every numeric value falls in a fuzzy class.
pub fn retrieval_self_similarity(world: &World) -> Check {
    for case in world.case_base.cases() {
        prop_assert_eq!(m_r(world, case, case, ScoringMode::Typical), 1.0);
        let classified = case.descriptors.iter().all(|d| match &d.value {
            DescriptorValue::Numeric { magnitude, .. } => world.case_base.profiles()[&d.id]
                .classify_subset(*magnitude)
                .unwrap()
                .is_some(),
            DescriptorValue::Symbolic(_) => true,
        });
        if classified {
            prop_assert_eq!(m_r(world, case, case, ScoringMode::Enhanced), 1.0);
        }
    }
    Ok(())
}

pub fn retrieval_presence_gating(world: &World) -> Check {
    let extra = Descriptor::new("zz", "one-sided", DescriptorValue::symbolic("c0"))
        .with_mode(OperatingMode::Abnormal);
    let mut target = world.target.clone();
    target.descriptors.push(extra.clone());
    for mode in MODES {
        for s in sources(world) {
            let base = m_r(world, &world.target, s, mode);
            prop_assert_eq!(m_r(world, &target, s, mode), base);
            let mut source = s.clone();
            source.descriptors.push(extra.clone());
            prop_assert_eq!(m_r(world, &world.target, &source, mode), base);
        }
    }
    Ok(())
}

pub fn retrieval_exclusion_equivalence(world: &World) -> Check {
    for s in sources(world) {
        let uncertain: BTreeSet<String> = world
            .target
            .descriptors
            .iter()
            .chain(&s.descriptors)
            .filter(|d| d.flags.uncertain)
            .map(|d| d.id.clone())
            .collect();
        let full = m_r(world, &world.target, s, ScoringMode::Enhanced);
        let pruned = m_r(
            world,
            &world.target.without(&uncertain),
            &s.without(&uncertain),
            ScoringMode::Enhanced,
        );
        prop_assert_eq!(full, pruned);
    }
    Ok(())
}

pub fn retrieval_breakdown_exact(world: &World) -> Check {
    for mode in MODES {
        for s in sources(world) {
            let r = retrieval_measure(&world.target, s, &ctx(world, mode)).unwrap();
            prop_assert_eq!(r.score, ratio_from_breakdown(&r.breakdown));
            let co_present = align(&world.target, s).len();
            prop_assert!(r.breakdown.is_empty() || r.breakdown.len() == co_present);
        }
    }
    Ok(())
}

pub fn retrieval_order_independent(world: &World) -> Check {
    let mut reversed = world.target.clone();
    reversed.descriptors.reverse();
    for mode in MODES {
        for s in sources(world) {
            prop_assert_eq!(
                m_r(world, &reversed, s, mode),
                m_r(world, &world.target, s, mode)
            );
        }
    }
    Ok(())
}

// --------------------------------------------------------------- adaptation

pub fn adaptation_bounds(world: &World) -> Check {
    for s in sources(world) {
        let a = adaptation_measure(
            &world.target,
            s,
            world.case_base.taxonomy(),
            world.case_base.profiles(),
        )
        .unwrap();
        prop_assert!((0.0..=4.0).contains(&a.score), "M_A = {}", a.score);
        let (num, den) = a.breakdown.iter().fold((0.0, 0.0), |(n, d), t| {
            (n + t.phi_presence * t.phi_value, d + t.phi_presence)
        });
        let unweighted = if den == 0.0 { 0.0 } else { num / den };
        prop_assert!(a.score >= unweighted);
    }
    Ok(())
}

pub fn adaptation_breakdown_exact(world: &World) -> Check {
    for s in sources(world) {
        let a = adaptation_measure(
            &world.target,
            s,
            world.case_base.taxonomy(),
            world.case_base.profiles(),
        )
        .unwrap();
        prop_assert_eq!(a.score, ratio_from_terms(&a.breakdown));
        for t in &a.breakdown {
            prop_assert_eq!(t.weighted, t.lambda * t.phi_presence * t.phi_value);
        }
    }
    Ok(())
}

fn with_modes(case: &Case, id: &str, mode: OperatingMode) -> Case {
    let mut case = case.clone();
    for d in case.descriptors.iter_mut().filter(|d| d.id == id) {
        d.operating_mode = mode;
    }
    case
}

/// Flipping one pair from normal/normal to abnormal/abnormal never lowers M_A.
pub fn adaptation_lambda_monotone(world: &World) -> Check {
    for s in sources(world) {
        for pair in align(&world.target, s) {
            let id = pair.descriptor_id;
            let normal = m_a(
                world,
                &with_modes(&world.target, id, OperatingMode::Normal),
                &with_modes(s, id, OperatingMode::Normal),
            );
            let abnormal = m_a(
                world,
                &with_modes(&world.target, id, OperatingMode::Abnormal),
                &with_modes(s, id, OperatingMode::Abnormal),
            );
            prop_assert!(abnormal >= normal, "{id}: {abnormal} < {normal}");
        }
    }
    Ok(())
}

fn argmax(scores: &[(String, f64)]) -> Option<String> {
    scores
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|s| s.0.clone())
}

/// Scaling every λ by a common power of two keeps the best source.
pub fn adaptation_scaling_argmax(world: &World, factor: f64) -> Check {
    let mut plain = Vec::new();
    let mut scaled = Vec::new();
    for s in sources(world) {
        let a = adaptation_measure(
            &world.target,
            s,
            world.case_base.taxonomy(),
            world.case_base.profiles(),
        )
        .unwrap();
        let (num, den) = a.breakdown.iter().fold((0.0, 0.0), |(n, d), t| {
            (
                n + factor * t.lambda * t.phi_presence * t.phi_value,
                d + t.phi_presence,
            )
        });
        plain.push((s.id.clone(), a.score));
        scaled.push((s.id.clone(), if den == 0.0 { 0.0 } else { num / den }));
    }
    prop_assert_eq!(argmax(&plain), argmax(&scaled));
    Ok(())
}

// -------------------------------------------------------------------- fuzzy

pub fn fuzzy_symmetry(profile: &FuzzyProfile, d: f64) -> Check {
    let p = profile.prototype();
    let (lo, hi) = profile.domain();
    if p - d >= lo && p + d <= hi {
        let up = profile.membership(p + d).unwrap();
        let down = profile.membership(p - d).unwrap();
        prop_assert!((up - down).abs() < 1e-12, "{up} vs {down}");
    }
    Ok(())
}

pub fn fuzzy_correction(profile: &FuzzyProfile, x: f64) -> Check {
    let mu = profile.membership(x).unwrap();
    prop_assert!((0.0..=1.0).contains(&mu));
    let once = profile.correct_imprecise(x).unwrap();
    prop_assert!(profile.in_domain(once), "{x} corrected to {once}");
    prop_assert_eq!(profile.correct_imprecise(once).unwrap(), once);
    Ok(())
}

pub fn fuzzy_same_class(profile: &FuzzyProfile, x: f64, y: f64, z: f64) -> Check {
    let same = |a, b| profile.same_class(a, b).unwrap();
    prop_assert_eq!(same(x, y), same(y, x));
    if profile.classify_subset(x).unwrap().is_some() {
        prop_assert!(same(x, x));
    }
    if same(x, y) && same(y, z) {
        prop_assert!(same(x, z));
    }
    Ok(())
}

// ----------------------------------------------------------------- taxonomy

pub fn taxonomy_similarity(t: &Taxonomy, names: &[String]) -> Check {
    for a in names {
        prop_assert_eq!(t.value_similarity(a, a).unwrap(), 1.0);
        for b in names {
            let ab = t.value_similarity(a, b).unwrap();
            prop_assert_eq!(ab, t.value_similarity(b, a).unwrap());
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab == 1.0, a == b);
        }
    }
    Ok(())
}

/// With node depths fixed, a deeper lowest common ancestor never gives a
/// lower similarity.
pub fn taxonomy_lca_monotone(t: &Taxonomy, names: &[String]) -> Check {
    let mut pairs = Vec::new();
    for a in names {
        for b in names {
            if a != b {
                let sum = t.depth(a).unwrap() + t.depth(b).unwrap();
                let lca = t.depth(t.lowest_common_ancestor(a, b).unwrap()).unwrap();
                pairs.push((sum, lca, t.value_similarity(a, b).unwrap()));
            }
        }
    }
    for x in &pairs {
        for y in &pairs {
            if x.0 == y.0 && x.1 <= y.1 {
                prop_assert!(x.2 <= y.2);
            }
        }
    }
    Ok(())
}

// -------------------------------------------------------------------- codec

pub fn codec_round_trip(world: &World) -> Check {
    let text = encode_case_base(&world.case_base);
    let back = decode_case_base(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, &world.case_base);
    prop_assert_eq!(encode_case_base(&back), text);

    let outcome = diagnose_with_mode(
        &world.target,
        &world.case_base,
        ScoringMode::Enhanced,
        cbr_core::DEFAULT_TOP_K,
    )
    .unwrap();
    let encoded = encode_outcome(&outcome);
    prop_assert_eq!(&encoded, &encode_outcome(&outcome.clone()));
    let decoded = decode_outcome(&encoded).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&decoded, &outcome);
    prop_assert_eq!(encode_outcome(&decoded), encoded);
    Ok(())
}

// ------------------------------------------------------------------- oracle

pub fn ranking_matches_oracle(world: &World) -> Check {
    for mode in MODES {
        let all = std::num::NonZeroUsize::new(64).unwrap();
        let ranking: Vec<(String, f64)> = retrieve(&world.target, &world.case_base, mode, all)
            .unwrap()
            .into_iter()
            .map(|s| (s.case_id, s.m_r))
            .collect();
        let expected = naive_ranking(world, mode == ScoringMode::Enhanced);
        prop_assert_eq!(ranking, expected, "mode {:?}", mode);
    }
    Ok(())
}
