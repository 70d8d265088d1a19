//! Naive reference scorer for the retrieval measure.
//!
//! Works from the raw generator parameters (parent indices, profile
//! bounds) and raw descriptor comparisons. It calls no scoring, taxonomy
//! or fuzzy function of the library.

use std::collections::BTreeSet;

use cbr_core::{Case, CaseKind, Descriptor, DescriptorValue, OperatingMode};

use super::{ProfileParams, World, NUMERIC_IDS};

fn node_index(name: &str) -> usize {
    name.trim_start_matches('c')
        .parse()
        .expect("generated node name")
}

fn ancestors(parents: &[Option<usize>], mut node: usize) -> Vec<usize> {
    let mut chain = vec![node];
    while let Some(p) = parents[node] {
        chain.push(p);
        node = p;
    }
    chain
}

fn symbolic_similarity(parents: &[Option<usize>], a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let chain_a = ancestors(parents, node_index(a));
    let chain_b: BTreeSet<usize> = ancestors(parents, node_index(b)).into_iter().collect();
    let depth_a = chain_a.len() - 1;
    let depth_b = chain_b.len() - 1;
    // first common node walking up from a is the deepest shared ancestor
    let lca = chain_a.iter().position(|n| chain_b.contains(n)).unwrap();
    let lca_depth = depth_a - lca;
    (2 * lca_depth) as f64 / (depth_a + depth_b) as f64
}

#[derive(PartialEq)]
enum Class {
    Low,
    High,
}

fn class_of(p: &ProfileParams, x: f64) -> Option<Class> {
    if p.low_lower <= x && x < p.prototype {
        Some(Class::Low)
    } else if p.prototype <= x && x <= p.high_upper {
        Some(Class::High)
    } else {
        None
    }
}

fn corrected(p: &ProfileParams, x: f64) -> f64 {
    let d = (x - p.prototype).abs();
    let mu = if d >= p.half_width {
        0.0
    } else {
        1.0 - d / p.half_width
    };
    if mu >= 0.5 {
        return p.prototype;
    }
    match class_of(p, x) {
        Some(Class::Low) => p.low_lower,
        Some(Class::High) => p.high_upper,
        None => x,
    }
}

fn params_for<'a>(world: &'a World, id: &str) -> Option<&'a ProfileParams> {
    NUMERIC_IDS
        .iter()
        .position(|n| *n == id)
        .map(|i| &world.profile_params[i])
}

fn value_term(world: &World, enhanced: bool, t: &Descriptor, s: &Descriptor) -> f64 {
    match (&t.value, &s.value) {
        (DescriptorValue::Symbolic(a), DescriptorValue::Symbolic(b)) => {
            symbolic_similarity(&world.parents, a, b)
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
                return 0.0;
            }
            let p = params_for(world, &t.id).expect("generated numeric ids have profiles");
            if enhanced {
                let x = if t.flags.imprecise {
                    corrected(p, *x)
                } else {
                    *x
                };
                match (class_of(p, x), class_of(p, *y)) {
                    (Some(a), Some(b)) if a == b => 1.0,
                    _ => 0.0,
                }
            } else {
                (1.0 - (x - y).abs() / (100.0 - 0.0)).clamp(0.0, 1.0)
            }
        }
        _ => 0.0,
    }
}

fn state_term(t: &Descriptor, s: &Descriptor) -> f64 {
    match (&t.state, &s.state) {
        (None, None) => 1.0,
        (Some(a), Some(b)) if a.to_lowercase() == b.to_lowercase() => 1.0,
        _ => 0.0,
    }
}

fn mode_term(t: &Descriptor, s: &Descriptor) -> f64 {
    let same = matches!(
        (t.operating_mode, s.operating_mode),
        (OperatingMode::Normal, OperatingMode::Normal)
            | (OperatingMode::Abnormal, OperatingMode::Abnormal)
            | (OperatingMode::Unspecified, OperatingMode::Unspecified)
    );
    if same {
        1.0
    } else {
        0.0
    }
}

/// Reference retrieval measure of one source.
pub fn naive_score(world: &World, enhanced: bool, source: &Case) -> f64 {
    let mut ids: Vec<&str> = world
        .target
        .descriptors
        .iter()
        .map(|d| d.id.as_str())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let mut numerator = 0.0;
    let mut presence_sum = 0.0;
    for id in ids {
        let t = world
            .target
            .descriptors
            .iter()
            .find(|d| d.id == id)
            .unwrap();
        let Some(s) = source.descriptors.iter().find(|d| d.id == id) else {
            continue;
        };
        let present = !(enhanced && (t.flags.uncertain || s.flags.uncertain));
        if !present {
            numerator += 0.0;
            presence_sum += 0.0;
            continue;
        }
        let product = value_term(world, enhanced, t, s) * state_term(t, s) * 1.0 * mode_term(t, s);
        numerator += product;
        presence_sum += 1.0;
    }
    if presence_sum == 0.0 {
        0.0
    } else {
        numerator / presence_sum
    }
}

/// Reference ranking: every source, best score first, ties by id.
pub fn naive_ranking(world: &World, enhanced: bool) -> Vec<(String, f64)> {
    let mut scored: Vec<(String, f64)> = world
        .case_base
        .cases()
        .iter()
        .filter(|c| c.kind == CaseKind::Source && c.id != world.target.id)
        .map(|c| (c.id.clone(), naive_score(world, enhanced, c)))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored
}
