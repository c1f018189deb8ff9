mod support;

use std::collections::{BTreeMap, BTreeSet};

use cxg_core::population::{
    core_periphery, coverage_matrix, cross_intelligibility, g_at_least, g_at_most, indicator,
    input_frequency_comparison, project_sentence, Population, SpeakerRecord,
};
use cxg_core::treebank::{DepTree, Token};
use cxg_core::{Error, ExtractionConfig, Pattern};
use proptest::prelude::*;
use support::constructicon_of;

fn pattern(i: usize) -> Pattern {
    format!("w{i:02} @root").parse().unwrap()
}

/// Speaker k produces the patterns whose bit is set in `produced[k]` and was
/// exposed to those in `produced[k] | extra[k]`.
fn population(produced: &[u32], extra: &[u32]) -> Population {
    let speakers = produced
        .iter()
        .zip(extra)
        .enumerate()
        .map(|(k, (&out, &more))| {
            let set = |mask: u32| -> BTreeSet<Pattern> {
                (0..20)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(pattern)
                    .collect()
            };
            SpeakerRecord::new(
                format!("s{k}"),
                constructicon_of(&set(out | more), 5),
                vec![constructicon_of(&set(out), 2)],
            )
            .unwrap()
        })
        .collect();
    Population::new(speakers).unwrap()
}

fn masks() -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (2usize..9).prop_flat_map(|p| {
        (
            prop::collection::vec(1u32..(1 << 20), p),
            prop::collection::vec(0u32..(1 << 20), p),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn grammar_set_laws((produced, extra) in masks()) {
        let pop = population(&produced, &extra);
        let p_all = pop.len();
        let union: BTreeSet<Pattern> = pop.speakers().iter().flat_map(|s| s.final_constructicon().patterns().cloned()).collect();
        let mut inter = union.clone();
        for s in pop.speakers() {
            inter.retain(|p| s.final_constructicon().contains(p));
        }
        prop_assert_eq!(&g_at_least(&pop, 1).unwrap().patterns, &union);
        prop_assert_eq!(&g_at_least(&pop, p_all).unwrap().patterns, &inter);
        for p in 1..p_all {
            let hi = g_at_least(&pop, p + 1).unwrap();
            let lo = g_at_least(&pop, p).unwrap();
            prop_assert!(hi.patterns.is_subset(&lo.patterns));
        }
        for p in 1..=p_all {
            let n_of = |k: &Pattern| pop.speakers().iter().map(|s| indicator(k, s) as usize).sum::<usize>();
            for k in &g_at_least(&pop, p).unwrap().patterns {
                prop_assert!(n_of(k) >= p);
            }
            for k in &g_at_most(&pop, p).unwrap().patterns {
                prop_assert!(n_of(k) <= p);
            }
        }

        for filter in [false, true] {
            if filter && pop.exposed_patterns().is_empty() {
                prop_assert_eq!(core_periphery(&pop, filter), Err(Error::EmptyUniverse));
                continue;
            }
            let cp = core_periphery(&pop, filter).unwrap();
            let parts = [&cp.core.patterns, &cp.periphery.patterns, &cp.other];
            let mut joined = BTreeSet::new();
            for part in parts {
                for k in part {
                    prop_assert!(joined.insert(k.clone()), "{} in two groups", k);
                }
            }
            prop_assert_eq!(&joined, &cp.universe);
            for k in &cp.core.patterns {
                prop_assert!(inter.contains(k));
            }
            if filter {
                for s in pop.speakers() {
                    prop_assert!(cp.universe.iter().all(|k| s.input.contains(k)));
                }
            } else {
                prop_assert_eq!(&cp.universe, &union);
            }
        }
    }
}

#[test]
fn thresholds_are_checked() {
    let pop = population(&[1, 3], &[0, 0]);
    assert_eq!(
        g_at_least(&pop, 0),
        Err(Error::ThresholdOutOfRange { p: 0, speakers: 2 })
    );
    assert_eq!(
        g_at_least(&pop, 3),
        Err(Error::ThresholdOutOfRange { p: 3, speakers: 2 })
    );
}

#[test]
fn population_rejects_duplicates_and_singletons() {
    let c = constructicon_of(&BTreeSet::from([pattern(0)]), 2);
    let s = SpeakerRecord::new("a", c.clone(), vec![c.clone()]).unwrap();
    assert_eq!(
        Population::new(vec![s.clone()]),
        Err(Error::TooFewSpeakers(1))
    );
    assert_eq!(
        Population::new(vec![s.clone(), s.clone()]),
        Err(Error::DuplicateSpeaker("a".into()))
    );
    assert_eq!(
        SpeakerRecord::new("b", c, vec![]),
        Err(Error::NoOutput("b".into()))
    );
}

#[test]
fn coverage_of_nested_constructicons() {
    // s0 produces {0,1}, s1 produces {0,1,2,3}, equal frequencies
    let pop = population(&[0b11, 0b1111], &[0, 0]);
    let (c01, c10) = cross_intelligibility(&pop, "s0", "s1").unwrap();
    assert_eq!(c01, 0.5);
    assert_eq!(c10, 1.0);
    assert_eq!(
        cross_intelligibility(&pop, "s0", "s0"),
        Err(Error::SameSpeaker)
    );
    assert_eq!(
        coverage_matrix(&pop).unwrap(),
        vec![vec![1.0, 0.5], vec![1.0, 1.0]]
    );
}

#[test]
fn frequency_comparison_separates_frequent_core() {
    let all: BTreeSet<Pattern> = (0..12).map(pattern).collect();
    let mk = |k: usize| {
        let input: Vec<_> = all
            .iter()
            .enumerate()
            .map(|(i, p)| cxg_core::constructicon::Entry {
                pattern: p.clone(),
                frequency: if i < 4 {
                    100 + i as u64
                } else {
                    2 + (i % 3) as u64
                },
                vector: cxg_core::MeaningVector::from_pairs([]),
            })
            .collect();
        let input = cxg_core::Constructicon::from_parts(
            ExtractionConfig::default(),
            Default::default(),
            input,
            vec![],
            vec![],
        )
        .unwrap();
        let produced: BTreeSet<Pattern> = (0..4).chain([4 + k]).map(pattern).collect();
        SpeakerRecord::new(format!("s{k}"), input, vec![constructicon_of(&produced, 2)]).unwrap()
    };
    let pop = Population::new((0..6).map(mk).collect()).unwrap();
    let cp = core_periphery(&pop, true).unwrap();
    assert_eq!(cp.core.patterns, (0..4).map(pattern).collect());
    assert_eq!(cp.periphery.patterns, (4..12).map(pattern).collect());
    let cmp = input_frequency_comparison(&pop, &cp).unwrap();
    assert!(cmp.group("core").unwrap().median > cmp.group("periphery").unwrap().median);
    assert!(cmp.group("other").is_none());
    assert!(
        cmp.test.p < 0.05,
        "{:?} {:?}",
        cmp.test,
        cmp.groups
            .iter()
            .map(|g| (g.group.clone(), g.values()))
            .collect::<Vec<_>>()
    );
}

#[test]
fn projection_prefers_frequent_patterns() {
    let tree = DepTree::new(
        "t",
        vec![
            Token::new(1, "she", "she", "PRON", 2, "nsubj"),
            Token::new(2, "can", "can", "AUX", 0, "root"),
        ],
    )
    .unwrap();
    let p = |s: &str| -> Pattern { s.parse().unwrap() };
    let retained = BTreeSet::from([p("_PRON _AUX"), p("she"), p("@root")]);
    let freq = BTreeMap::from([(p("_PRON _AUX"), 10), (p("she"), 3), (p("@root"), 1)]);
    let labels = project_sentence(&tree, &retained, &ExtractionConfig::default(), &freq).unwrap();
    assert_eq!(labels, vec!["_PRON", "_AUX"]);
    let retained = BTreeSet::from([p("she")]);
    let labels = project_sentence(&tree, &retained, &ExtractionConfig::default(), &freq).unwrap();
    assert_eq!(labels, vec!["she", "-"]);
}
