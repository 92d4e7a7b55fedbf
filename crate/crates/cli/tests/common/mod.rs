#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(rel: &str) -> PathBuf {
    workspace_root().join("fixtures").join(rel)
}

/// Writes `<dir>/<id>.conll` from (token, tag) rows.
pub fn write_doc(dir: &Path, id: &str, rows: &[(&str, &str)]) {
    fs::create_dir_all(dir).unwrap();
    let text: String = rows.iter().map(|(t, g)| format!("{t}\t{g}\n")).collect();
    fs::write(dir.join(format!("{id}.conll")), text).unwrap();
}

const WORDS: &[&str] = &[
    "Die",
    "Behörde",
    "kann",
    "den",
    "Antrag",
    "binnen",
    "zwei",
    "Wochen",
    "prüfen",
    "und",
    "im",
    "Einvernehmen",
    "mit",
    "der",
    "Bundesnetzagentur",
    "erteilen",
    "Frist",
    "nach",
    "§",
    "3",
    ".",
];
const TAGS: &[&str] = &[
    "O",
    "O",
    "O",
    "B-Aktion",
    "B-Dokument",
    "I-Dokument",
    "B-Signalwort",
    "B-Frist",
];

/// `n` random documents named `doc-000`, `doc-001`, ...
pub fn synthetic_corpus(dir: &Path, n: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let len = rng.random_range(3..15);
        let rows: Vec<(&str, &str)> = (0..len)
            .map(|_| {
                (
                    WORDS[rng.random_range(0..WORDS.len())],
                    TAGS[rng.random_range(0..TAGS.len())],
                )
            })
            .collect();
        write_doc(dir, &format!("doc-{i:03}"), &rows);
    }
}

pub fn read_tags(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split('\t').next_back().unwrap().to_string())
        .collect()
}
