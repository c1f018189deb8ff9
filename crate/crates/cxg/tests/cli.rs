use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn cxg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cxg"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = cxg(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn failure(args: &[&str]) -> String {
    let out = cxg(args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const MARY: &str = "# sent_id = mary
1\tMary\tMary\tPROPN\t_\t_\t2\tnsubj\t_\t_
2\thad\thave\tVERB\t_\t_\t0\troot\t_\t_
3\ta\ta\tDET\t_\t_\t5\tdet\t_\t_
4\tlittle\tlittle\tADJ\t_\t_\t5\tamod\t_\t_
5\tlamb\tlamb\tNOUN\t_\t_\t2\tobj\t_\t_

";

#[test]
fn missing_template_is_reported() {
    let err = failure(&[
        "gen-corpus",
        "--template",
        "/no/such/template.toml",
        "-n",
        "5",
    ]);
    assert!(
        err.contains("error[template]: template not found: /no/such/template.toml"),
        "{err}"
    );
}

#[test]
fn generated_corpora_depend_only_on_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let template = dir.path().join("t.toml");
    std::fs::write(&template, cxg::template::DEMO_TEMPLATE).unwrap();
    let run = |seed: &str| {
        ok(&[
            "gen-corpus",
            "--template",
            s(&template),
            "-n",
            "40",
            "--seed",
            seed,
        ])
        .stdout
    };
    let a = run("3");
    assert_eq!(a, run("3"));
    assert_ne!(a, run("4"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.matches("# sent_id = ").count(), 40);

    let corpus = dir.path().join("c.conllu");
    std::fs::write(&corpus, &text).unwrap();
    let table = |threads: &str| ok(&["extract", "-i", s(&corpus), "--threads", threads]).stdout;
    let t1 = table("1");
    assert_eq!(t1, table("4"));
    let t1 = String::from_utf8(t1).unwrap();
    assert!(t1.starts_with("pattern\tfrequency\n"));
    let freqs: Vec<u64> = t1
        .lines()
        .skip(1)
        .map(|l| l.rsplit('\t').next().unwrap().parse().unwrap())
        .collect();
    assert!(freqs.windows(2).all(|w| w[0] >= w[1]));
    assert!(freqs.iter().all(|&f| f >= 2));
}

#[test]
fn lexical_unbounded_extraction_lists_every_catena() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("mary.conllu");
    std::fs::write(&corpus, MARY).unwrap();
    let out = ok(&[
        "extract",
        "-i",
        s(&corpus),
        "--levels",
        "lex",
        "--max-len",
        "unbounded",
        "--min-freq",
        "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let patterns: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(patterns.len(), 17);
    for p in [
        "Mary had",
        "Mary had a little lamb",
        "had a little lamb",
        "a little lamb",
        "had lamb",
        "little",
    ] {
        assert!(patterns.contains(&p), "{p} missing from {patterns:?}");
    }
    assert!(text.lines().skip(1).all(|l| l.ends_with("\t1")));
}

#[test]
fn unreachable_min_freq_gives_an_empty_table_and_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("mary.conllu");
    std::fs::write(&corpus, MARY).unwrap();
    let table = dir.path().join("out/t.tsv");
    let out = ok(&[
        "extract",
        "-i",
        s(&corpus),
        "--min-freq",
        "100",
        "-o",
        s(&table),
    ]);
    assert_eq!(
        std::fs::read_to_string(&table).unwrap(),
        "pattern\tfrequency\n"
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("min_freq = 100"));
}

#[test]
fn shift_needs_two_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("mary.conllu");
    std::fs::write(&corpus, MARY).unwrap();
    let dump = dir.path().join("m.cxg");
    ok(&["build", "-i", s(&corpus), "-o", s(&dump), "--min-freq", "1"]);
    let err = failure(&[
        "shift",
        "--checkpoints",
        s(&dump),
        "-o",
        s(&dir.path().join("shift")),
    ]);
    assert!(err.contains("need ≥ 2 checkpoints"), "{err}");
}

#[test]
fn duplicate_speakers_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.toml");
    std::fs::write(
        &manifest,
        "version = 1\n\n[[speaker]]\nid = \"a\"\ninput = \"a.cxg\"\noutputs = [\"a1.cxg\"]\n\n\
         [[speaker]]\nid = \"a\"\ninput = \"b.cxg\"\noutputs = [\"b1.cxg\"]\n",
    )
    .unwrap();
    let err = failure(&[
        "population",
        "-m",
        s(&manifest),
        "-o",
        s(&dir.path().join("pop")),
    ]);
    assert!(err.contains("duplicate speaker_id a"), "{err}");
}

#[test]
fn invalid_sentences_are_skipped_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("mixed.conllu");
    let cycle =
        "# sent_id = bad\n1\tx\tx\tX\t_\t_\t2\tdep\t_\t_\n2\ty\ty\tX\t_\t_\t1\tdep\t_\t_\n\n";
    std::fs::write(&corpus, format!("{MARY}{cycle}")).unwrap();
    let out = ok(&["extract", "-i", s(&corpus), "--min-freq", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad"));
    let err = failure(&["--strict", "extract", "-i", s(&corpus)]);
    assert!(
        err.starts_with("error[validation]: ") && err.contains("mixed.conllu: line 9: "),
        "{err}"
    );
}

#[test]
fn printed_config_reloads_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let printed = ok(&[
        "--print-config",
        "--seed",
        "9",
        "extract",
        "-i",
        "x",
        "--max-len",
        "unbounded",
        "--weighting",
        "ppmi",
    ])
    .stdout;
    let path = dir.path().join("run.toml");
    std::fs::write(&path, &printed).unwrap();
    let again = ok(&["--print-config", "--config", s(&path)]).stdout;
    assert_eq!(printed, again);
    let text = String::from_utf8(printed).unwrap();
    assert!(text.contains("seed = 9"));
    assert!(text.contains("max_len = \"unbounded\""));
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn digest(dir: &Path) -> String {
    let mut h = Sha256::new();
    for p in files(dir) {
        h.update(p.strip_prefix(dir).unwrap().to_str().unwrap().as_bytes());
        h.update([0]);
        h.update(std::fs::read(&p).unwrap());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

const DEMO_DIGEST: &str = "6577eb04522fcbac4a812fdbc46bdd0488c01cbbb6818e841af5ae2307d4a466";

#[test]
fn demo_artifacts_match_the_golden_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo");
    let listed = String::from_utf8(ok(&["demo", "-o", s(&out)]).stdout).unwrap();
    assert_eq!(listed.lines().count(), files(&out).len());
    let report = std::fs::read_to_string(out.join("report.md")).unwrap();
    assert!(report.contains("## Population: 3 speakers"));
    assert_eq!(digest(&out), DEMO_DIGEST);
}

#[test]
fn simulate_population_and_report_compose() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&[
        "simulate",
        "-o",
        s(&sim),
        "--speakers",
        "2",
        "--batch-size",
        "80",
        "--output-size",
        "80",
        "--novelty",
        "0,0.5",
    ]);
    let manifest = std::fs::read_to_string(sim.join("manifest.toml")).unwrap();
    assert!(manifest.contains("id = \"speaker2\""));

    let shift = dir.path().join("shift");
    let sp = sim.join("speaker1");
    ok(&[
        "shift",
        "--checkpoints",
        s(&sp.join("output-1.cxg")),
        s(&sp.join("output-2.cxg")),
        "--reference",
        s(&sp.join("input.cxg")),
        "--speaker",
        "speaker1",
        "-o",
        s(&shift),
    ]);
    for f in ["chains.tsv", "shift_table.tsv", "bins.csv", "kruskal.json"] {
        assert!(shift.join(f).is_file(), "{f}");
    }
    let header = std::fs::read_to_string(shift.join("shift_table.tsv")).unwrap();
    assert!(header.starts_with("kappa\tmean_shift\tmean_cosine\tn_chains\tbin\n"));

    let pop = dir.path().join("pop");
    ok(&[
        "population",
        "-m",
        s(&sim.join("manifest.toml")),
        "-o",
        s(&pop),
        "--project",
        s(&sp.join("output-1.conllu")),
    ]);
    assert!(pop.join("projections.tsv").is_file());

    let json = ok(&["report", s(&shift), s(&pop), "--format", "json"]).stdout;
    let report: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(report["shift"][0]["speaker"], "speaker1");
    assert_eq!(
        report["population"][0]["speakers"]
            .as_array()
            .unwrap()
            .len(),
        2
    );
    let md = String::from_utf8(ok(&["report", s(&shift)]).stdout).unwrap();
    assert!(md.starts_with("# Constructicon analysis report"));

    let err = failure(&["report", s(dir.path())]);
    assert!(err.contains("error[format]"), "{err}");
}
