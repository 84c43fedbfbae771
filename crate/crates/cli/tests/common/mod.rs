#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stopcur_core::eval::synth::pseudo_word;

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_stopcur"))
}

pub fn stopcur(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("STOPCUR_OUT_DIR", out_dir)
        .env("RUST_BACKTRACE", "0")
        .output()
        .expect("spawn stopcur")
}

pub fn ok(out_dir: &Path, args: &[&str]) -> String {
    let o = stopcur(out_dir, args);
    assert!(
        o.status.success(),
        "stopcur {args:?} failed:\n{}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

/// Zipf-distributed pseudo-Devanagari sentences, optionally with `always`
/// inserted at a random position in every sentence.
pub fn zipf_corpus(n_sentences: usize, vocab: usize, seed: u64, always: Option<&str>) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..vocab).map(pseudo_word).collect();
    let weights: Vec<f64> = (1..=vocab).map(|r| 1.0 / r as f64).collect();
    let dist = WeightedIndex::new(&weights).unwrap();
    let mut out = String::new();
    for _ in 0..n_sentences {
        let len = rng.random_range(4..=14);
        let mut s: Vec<&str> = (0..len)
            .map(|_| words[dist.sample(&mut rng)].as_str())
            .collect();
        if let Some(w) = always {
            let at = rng.random_range(0..=s.len());
            s.insert(at, w);
        }
        out.push_str(&s.join(" "));
        out.push_str(" ।\n");
    }
    out
}

/// Every file under `dir`, relative path -> bytes, sorted.
pub fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push((
                    p.strip_prefix(root).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
