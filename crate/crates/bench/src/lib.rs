//! Synthetic workloads for the benchmarks.

use normner_core::class::{EntityClass, IobTag};
use normner_core::consolidation::PredictionBundle;
use normner_core::corpus::Document;
use normner_core::rules::{parse_ruleset_json, CompiledRuleset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "Die",
    "zuständige",
    "Behörde",
    "kann",
    "den",
    "Antrag",
    "binnen",
    "drei",
    "Monaten",
    "prüfen",
    "und",
    "im",
    "Einvernehmen",
    "mit",
    "der",
    "Bundesnetzagentur",
    "die",
    "Genehmigung",
    "erteilen",
    "nach",
    "§",
    "12",
    "Absatz",
    "2",
    "wenn",
    "Antragsteller",
    "Nachweis",
    "vorlegt",
    ".",
];

fn random_tags(rng: &mut ChaCha8Rng, len: usize, classes: &[EntityClass]) -> Vec<IobTag> {
    (0..len)
        .map(|_| match rng.random_range(0..4) {
            0 | 1 => IobTag::Outside,
            2 => IobTag::Begin(classes[rng.random_range(0..classes.len())]),
            _ => IobTag::Inside(classes[rng.random_range(0..classes.len())]),
        })
        .collect()
}

/// `n` random sentences of 10 to 60 tokens.
pub fn corpus(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.random_range(10..60);
            let texts: Vec<&str> = (0..len).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
            let tags = random_tags(&mut rng, len, &EntityClass::REAL);
            Document::new(format!("doc-{i:05}"), texts, tags).expect("generated documents are valid")
        })
        .collect()
}

/// Gold corpus plus a noisy prediction for each document.
pub fn pairs(n: usize, seed: u64) -> Vec<(Document, Document)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    corpus(n, seed)
        .into_iter()
        .map(|g| {
            let tags = random_tags(&mut rng, g.len(), &EntityClass::REAL);
            let p = g.with_tags(tags).expect("same length");
            (g, p)
        })
        .collect()
}

/// One bundle per document with up to three candidates for every class.
pub fn bundles(docs: &[Document], seed: u64) -> Vec<PredictionBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    docs.iter()
        .map(|d| {
            let mut b = PredictionBundle::for_document(d);
            for class in EntityClass::REAL {
                for _ in 0..rng.random_range(0..=3) {
                    let tags = random_tags(&mut rng, d.len(), &[class]);
                    b.add_candidate(class, tags).expect("same length");
                }
            }
            b
        })
        .collect()
}

pub const RULES: &str = r#"{
  "token_patterns": [
    { "class": "Signalwort", "matchers": [ { "attribute": "IN_LIST", "value": ["kann", "muss", "soll"] } ] },
    { "class": "Handlungsgrundlage", "matchers": [
        { "attribute": "TEXT", "value": "§" }, { "attribute": "IS_DIGIT", "value": true },
        { "attribute": "LOWER", "value": "absatz", "quantifier": "OPTIONAL" },
        { "attribute": "IS_DIGIT", "value": true, "quantifier": "OPTIONAL" } ] },
    { "class": "Frist", "matchers": [
        { "attribute": "LOWER", "value": "binnen" }, { "attribute": "IS_TITLE", "value": false, "quantifier": "ZERO_OR_MORE" },
        { "attribute": "REGEX", "value": "^(Tag|Woche|Monat)" } ] }
  ],
  "phrase_patterns": [
    { "class": "Signalwort", "phrase": ["im", "Einvernehmen"] },
    { "class": "Ergebnisempfaenger", "phrase": ["der", "Antragsteller"], "case_sensitive": false }
  ],
  "gazetteers": [
    { "class": "Mitwirkender", "words": ["Bundesnetzagentur", "zuständige Behörde"] },
    { "class": "Dokument", "filter": { "suffix_in": ["ung", "weis"], "is_capitalized": true } }
  ]
}"#;

pub fn ruleset(corpus: &[Document]) -> CompiledRuleset {
    parse_ruleset_json(RULES, std::path::Path::new("."))
        .and_then(|spec| spec.compile(corpus))
        .expect("benchmark ruleset compiles")
}
