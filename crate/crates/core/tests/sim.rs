mod support;

use std::collections::BTreeSet;

use cxg_core::catena::Level;
use cxg_core::sim::{generate_corpus, run_speaker, simulate_speaker, LearnerState, SpeakerPlan};
use cxg_core::{build_constructicon, Corpus, DepTree, Error, ExtractionConfig};
use support::toy_template;

fn cfg() -> ExtractionConfig {
    ExtractionConfig {
        min_freq: 1,
        ..Default::default()
    }
}

fn plan(novelty: Vec<f64>) -> SpeakerPlan {
    SpeakerPlan {
        speaker_id: "kid".into(),
        batch_size: 60,
        output_size: 80,
        novelty_schedule: novelty,
        input_seed: 5,
        output_seed: 6,
    }
}

#[test]
fn generation_is_deterministic_per_seed() {
    let t = toy_template();
    assert_eq!(
        generate_corpus(&t, 50, 3).unwrap(),
        generate_corpus(&t, 50, 3).unwrap()
    );
    assert_ne!(
        generate_corpus(&t, 50, 3).unwrap(),
        generate_corpus(&t, 50, 4).unwrap()
    );
    let a = run_speaker(&t, &plan(vec![0.0, 0.5, 1.0]), &cfg()).unwrap();
    let b = run_speaker(&t, &plan(vec![0.0, 0.5, 1.0]), &cfg()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.outputs.len(), 3);
    assert_eq!(a.outputs[2].provenance().checkpoint, 3);
}

#[test]
fn training_is_additive_and_order_insensitive() {
    let c = generate_corpus(&toy_template(), 40, 9).unwrap();
    let (first, second): (Vec<DepTree>, Vec<DepTree>) =
        c.trees().iter().cloned().partition(|t| t.sent_id() < "s20");
    let first = Corpus::new("a", first).unwrap();
    let second = Corpus::new("b", second).unwrap();
    let mut reversed: Vec<DepTree> = c.trees().to_vec();
    reversed.reverse();
    let reversed = Corpus::new("r", reversed).unwrap();

    let start = LearnerState::new(0);
    let whole = start.train_step(&c, &cfg()).unwrap();
    let rev = start.train_step(&reversed, &cfg()).unwrap();
    assert_eq!(whole.pattern_counts(), rev.pattern_counts());
    assert_eq!(whole.tree_counts(), rev.tree_counts());

    let split = start
        .train_step(&first, &cfg())
        .unwrap()
        .train_step(&second, &cfg())
        .unwrap();
    assert_eq!(split.pattern_counts(), whole.pattern_counts());
    assert_eq!(split.checkpoint_index(), 2);
    assert_eq!(start.checkpoint_index(), 0);
    assert!(start.pattern_counts().is_empty());
}

#[test]
fn zero_novelty_output_stays_within_the_input() {
    let run = simulate_speaker(&toy_template(), &plan(vec![0.0; 4]), &cfg()).unwrap();
    let seen: BTreeSet<_> = run.input.iter().map(|t| t.tokens().to_vec()).collect();
    for out in &run.outputs {
        for t in out.iter() {
            assert!(seen.contains(t.tokens()));
        }
    }
    for lambda in &run.record.outputs {
        for p in lambda
            .patterns()
            .filter(|p| p.levels().contains(&Level::Lex))
        {
            assert!(run.record.input.contains(p), "{p} not in input");
        }
    }
}

#[test]
fn novelty_creates_unattested_combinations() {
    let run = simulate_speaker(&toy_template(), &plan(vec![1.0]), &cfg()).unwrap();
    let seen: BTreeSet<_> = run.input.iter().map(|t| t.tokens().to_vec()).collect();
    let lambda = build_constructicon(&run.outputs[0], &cfg()).unwrap();
    assert!(!lambda.is_empty());
    assert!(run.outputs[0].iter().any(|t| !seen.contains(t.tokens())));
}

#[test]
fn plan_is_validated() {
    let t = toy_template();
    assert!(matches!(
        run_speaker(&t, &plan(vec![]), &cfg()),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        run_speaker(&t, &plan(vec![1.2]), &cfg()),
        Err(Error::InvalidConfig(_))
    ));
}
