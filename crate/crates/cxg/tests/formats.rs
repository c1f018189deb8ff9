use cxg::conllu::{parse_conllu, write_conllu, ParseOptions};
use cxg::dump::{parse_constructicon, write_constructicon};
use cxg_core::sim::generate_corpus;
use cxg_core::{build_constructicon, Corpus, DepTree, ExtractionConfig, MaxLen, Token, Weighting};
use proptest::prelude::*;

const FORMS: [&str; 7] = ["the", "dog", "saw", "a", "cat", "_x", "@y"];
const UPOS: [&str; 4] = ["DET", "NOUN", "VERB", "PUNCT"];
const DEPREL: [&str; 4] = ["det", "nsubj", "obj", "punct"];

fn tree(draws: &[(u8, u8, u8)], name: String) -> DepTree {
    let tokens = draws
        .iter()
        .enumerate()
        .map(|(i, &(f, u, h))| {
            let id = i + 1;
            let head = if id == 1 {
                0
            } else {
                1 + h as usize % (id - 1)
            };
            let deprel = if head == 0 { "root" } else { DEPREL[d(u)] };
            Token::new(
                id,
                FORMS[f as usize % FORMS.len()],
                FORMS[f as usize % 3],
                UPOS[d(u)],
                head,
                deprel,
            )
        })
        .collect();
    DepTree::new(name, tokens).unwrap()
}

fn d(x: u8) -> usize {
    x as usize % 4
}

fn corpus() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(prop::collection::vec(any::<(u8, u8, u8)>(), 1..7), 1..6).prop_map(
        |sents| {
            let trees = sents
                .iter()
                .enumerate()
                .map(|(i, s)| tree(s, format!("s{}", i + 1)))
                .collect();
            Corpus::new("gen", trees).unwrap()
        },
    )
}

fn config() -> impl Strategy<Value = ExtractionConfig> {
    (1usize..4, 1u64..3, 1usize..40, any::<bool>()).prop_map(|(len, min_freq, k, ppmi)| {
        ExtractionConfig {
            max_len: MaxLen::Bounded(len),
            min_freq,
            context_vocab_size: k,
            weighting: if ppmi {
                Weighting::Ppmi
            } else {
                Weighting::Raw
            },
            ..Default::default()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conllu_round_trips(c in corpus()) {
        let text = write_conllu(&c);
        let back = parse_conllu(&text, "gen", &ParseOptions::default()).unwrap();
        prop_assert!(back.skipped.is_empty());
        prop_assert_eq!(back.corpus, c);
    }

    #[test]
    fn dumps_round_trip(c in corpus(), cfg in config()) {
        let Ok(lambda) = build_constructicon(&c, &cfg) else { return Ok(()) };
        let text = write_constructicon(&lambda);
        let back = parse_constructicon(&text).unwrap();
        prop_assert_eq!(write_constructicon(&back), text);
        prop_assert_eq!(back, lambda);
    }
}

#[test]
fn parallel_build_matches_the_core_build_on_template_data() {
    let c = generate_corpus(&cxg::template::demo_template(), 150, 12).unwrap();
    let cfg = ExtractionConfig::default();
    let want = build_constructicon(&c, &cfg).unwrap();
    for threads in [1, 2, 5] {
        let got = cxg::parallel::pool(threads)
            .unwrap()
            .install(|| cxg::parallel::build_constructicon(&c, &cfg))
            .unwrap();
        assert_eq!(write_constructicon(&got), write_constructicon(&want));
    }
}
