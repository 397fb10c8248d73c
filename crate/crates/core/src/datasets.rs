//! Case ingestion (JSONL files) and deterministic generation of the
//! three paired-document scenario families (redundancy, complementarity,
//! synergy), plus the bridge that turns a scenario case into a synthetic
//! game for desk-scale runs.

use crate::case::{DocLabel, Document, QueryCase, ScenarioTag};
use crate::game::MAX_PLAYERS;
use crate::oracle::synthetic::{GameKind, GameSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset io on {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate case id '{0}'")]
    DuplicateId(String),
    #[error("case '{case_id}': {msg}")]
    InvalidCase { case_id: String, msg: String },
    #[error(
        "entity lexicon exhausted after generating {generated} cases; \
         lower the count or extend the lexicon"
    )]
    LexiconExhausted { generated: usize },
    #[error("dataset configuration: {0}")]
    Config(String),
}

fn validate_case(case: &QueryCase) -> Result<(), DatasetError> {
    let invalid = |msg: String| DatasetError::InvalidCase { case_id: case.case_id.clone(), msg };
    if case.case_id.is_empty() {
        return Err(DatasetError::InvalidCase {
            case_id: "<empty>".into(),
            msg: "case id must not be empty".into(),
        });
    }
    if case.query.trim().is_empty() {
        return Err(invalid("query must not be empty".into()));
    }
    let n = case.n();
    if n == 0 || n > MAX_PLAYERS {
        return Err(invalid(format!("document count {n} outside 1..={MAX_PLAYERS}")));
    }
    if let Some((a, b)) = case.positive_pair {
        if a >= n || b >= n {
            return Err(invalid(format!(
                "positive_pair ({a}, {b}) exceeds document count {n}"
            )));
        }
        if a == b {
            return Err(invalid(format!("positive_pair indices collide at {a}")));
        }
    }
    Ok(())
}

/// Load one `QueryCase` per JSONL line. Malformed lines fail with their
/// line number; duplicate case ids fail the whole load.
pub fn load_cases(path: &Path) -> Result<Vec<QueryCase>, DatasetError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DatasetError::Io { path: path.to_path_buf(), msg: e.to_string() })?;
    let mut cases = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let case: QueryCase = serde_json::from_str(line)
            .map_err(|e| DatasetError::Parse { line: idx + 1, msg: e.to_string() })?;
        validate_case(&case)?;
        if !seen.insert(case.case_id.clone()) {
            return Err(DatasetError::DuplicateId(case.case_id));
        }
        cases.push(case);
    }
    Ok(cases)
}

/// Write cases as JSONL, atomically (temp file + rename).
pub fn save_cases(path: &Path, cases: &[QueryCase]) -> Result<(), DatasetError> {
    let io_err = |msg: String| DatasetError::Io { path: path.to_path_buf(), msg };
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| io_err(e.to_string()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| io_err(e.to_string()))?;
    for case in cases {
        let line = serde_json::to_string(case).map_err(|e| io_err(e.to_string()))?;
        tmp.write_all(line.as_bytes()).map_err(|e| io_err(e.to_string()))?;
        tmp.write_all(b"\n").map_err(|e| io_err(e.to_string()))?;
    }
    tmp.flush().map_err(|e| io_err(e.to_string()))?;
    tmp.persist(path).map_err(|e| io_err(e.to_string()))?;
    Ok(())
}

/// Seeded word lists the generator draws entities from. Built from
/// syllable products so each list is comfortably larger than any
/// reasonable batch's appetite.
#[derive(Debug, Clone)]
pub struct EntityLexicon {
    pub places: Vec<String>,
    pub names: Vec<String>,
    pub artifacts: Vec<String>,
}

impl EntityLexicon {
    fn build() -> Self {
        const PLACE_HEADS: [&str; 24] = [
            "Ald", "Bren", "Cor", "Dra", "Elm", "Fen", "Gal", "Hart", "Ister", "Jor", "Kel",
            "Lor", "Mar", "Nor", "Orsten", "Pel", "Quar", "Ros", "Sel", "Tor", "Ulv", "Ver",
            "Win", "Yar",
        ];
        const PLACE_TAILS: [&str; 16] = [
            "brook", "crest", "dale", "fall", "ford", "gate", "haven", "hollow", "mere", "moor",
            "port", "reach", "ridge", "shore", "stead", "vale",
        ];
        const FIRST_NAMES: [&str; 24] = [
            "Ansel", "Brina", "Cedric", "Dalia", "Edwin", "Faye", "Garen", "Hestia", "Ilya",
            "Joren", "Kira", "Lysand", "Mira", "Nolan", "Opal", "Petra", "Quill", "Rowan",
            "Sable", "Tamsin", "Ulric", "Vera", "Wren", "Yusuf",
        ];
        const LAST_NAMES: [&str; 12] = [
            "Ashford", "Blackwood", "Corvin", "Deverell", "Ellsworth", "Fairbairn", "Greaves",
            "Holloway", "Ingram", "Kestrel", "Lockhart", "Marlowe",
        ];
        const MATERIALS: [&str; 16] = [
            "brass", "obsidian", "gilded", "ivory", "cobalt", "amber", "silver", "jade",
            "onyx", "copper", "walnut", "pewter", "crimson", "cerulean", "marble", "ebony",
        ];
        const OBJECTS: [&str; 16] = [
            "chronometer", "ledger", "astrolabe", "orrery", "seal", "compass", "codex",
            "tapestry", "reliquary", "sextant", "lantern", "hourglass", "signet", "atlas",
            "phonograph", "barometer",
        ];
        let places = PLACE_HEADS
            .iter()
            .flat_map(|h| PLACE_TAILS.iter().map(move |t| format!("{h}{t}")))
            .collect();
        let names = FIRST_NAMES
            .iter()
            .flat_map(|f| LAST_NAMES.iter().map(move |l| format!("{f} {l}")))
            .collect();
        let artifacts = MATERIALS
            .iter()
            .flat_map(|m| OBJECTS.iter().map(move |o| format!("{m} {o}")))
            .collect();
        Self { places, names, artifacts }
    }
}

/// The text frames one scenario kind is built from. `{artifact}`,
/// `{name}`, and `{place}` are the fill slots; `*_answer_slots` document
/// which slots carry the answer (redundancy's paraphrase check keys on
/// them).
#[derive(Debug, Clone)]
pub struct SentenceFrames {
    pub query: &'static str,
    pub positive_a: &'static str,
    pub positive_b: &'static str,
    pub negative: &'static str,
    pub answer: &'static str,
}

fn frames_for(kind: ScenarioTag) -> Option<SentenceFrames> {
    match kind {
        // Both positives state the full answer; B paraphrases A with the
        // same slot values.
        ScenarioTag::Redundancy => Some(SentenceFrames {
            query: "Where is the {artifact} kept?",
            positive_a: "The {artifact} is kept in the archives of {place}.",
            positive_b: "Archival records confirm that {place} houses the {artifact}.",
            negative: "The {artifact} is kept in the archives of {place}.",
            answer: "The {artifact} is kept in {place}.",
        }),
        // Each positive answers one half of a two-part question.
        ScenarioTag::Complementarity => Some(SentenceFrames {
            query: "Who maintains the {artifact}, and in which town does that person work?",
            positive_a: "{name} maintains the {artifact}.",
            positive_b: "{name} works in the town of {place}.",
            negative: "{name} maintains the {artifact}.",
            answer: "{name} maintains the {artifact} and works in {place}.",
        }),
        // Neither positive is usable alone: A points at B's subject, B
        // resolves it.
        ScenarioTag::Synergy => Some(SentenceFrames {
            query: "In which town is the {artifact} stored?",
            positive_a: "The {artifact} is stored in the town where {name} works.",
            positive_b: "{name} works in the town of {place}.",
            negative: "The {artifact} is stored in the town where {name} works.",
            answer: "The {artifact} is stored in {place}.",
        }),
        ScenarioTag::None => None,
    }
}

/// Deterministic generator for one scenario family.
#[derive(Debug, Clone)]
pub struct ScenarioTemplate {
    pub kind: ScenarioTag,
    pub entity_lexicon: EntityLexicon,
    pub sentence_frames: SentenceFrames,
    pub rng_seed: u64,
}

impl ScenarioTemplate {
    pub fn new(kind: ScenarioTag, rng_seed: u64) -> Result<Self, DatasetError> {
        let sentence_frames = frames_for(kind).ok_or_else(|| {
            DatasetError::Config(
                "scenario templates exist for redundancy, complementarity, and synergy only"
                    .into(),
            )
        })?;
        Ok(Self { kind, entity_lexicon: EntityLexicon::build(), sentence_frames, rng_seed })
    }
}

fn fill(frame: &str, slots: &[(&str, &str)]) -> String {
    let mut out = frame.to_string();
    for (slot, value) in slots {
        out = out.replace(&format!("{{{slot}}}"), value);
    }
    out
}

/// Shuffled draw-without-replacement pools over the lexicon.
struct Pools {
    places: Vec<String>,
    names: Vec<String>,
    artifacts: Vec<String>,
}

impl Pools {
    fn new(lexicon: &EntityLexicon, rng: &mut ChaCha8Rng) -> Self {
        let mut places = lexicon.places.clone();
        let mut names = lexicon.names.clone();
        let mut artifacts = lexicon.artifacts.clone();
        places.shuffle(rng);
        names.shuffle(rng);
        artifacts.shuffle(rng);
        Self { places, names, artifacts }
    }
}

/// Generate `count` scenario cases per order variant: for each drawn
/// entity set, one case with the pair documents at `positions` as given
/// (suffix `-ab`) and one with the two positives swapped (suffix `-ba`).
/// The two variants differ only in those two document entries. Output is
/// byte-deterministic for a fixed template seed.
pub fn generate_scenario_cases(
    template: &ScenarioTemplate,
    count: usize,
    n_docs: usize,
    positions: (usize, usize),
) -> Result<Vec<QueryCase>, DatasetError> {
    if !(3..=MAX_PLAYERS).contains(&n_docs) {
        return Err(DatasetError::Config(format!(
            "n_docs {n_docs} outside 3..={MAX_PLAYERS}"
        )));
    }
    let (pos_a, pos_b) = positions;
    if pos_a >= n_docs || pos_b >= n_docs || pos_a == pos_b {
        return Err(DatasetError::Config(format!(
            "pair positions ({pos_a}, {pos_b}) must be distinct and below n_docs {n_docs}"
        )));
    }
    let frames = &template.sentence_frames;
    let kind = template.kind.as_str();
    let mut rng = ChaCha8Rng::seed_from_u64(template.rng_seed);
    let mut pools = Pools::new(&template.entity_lexicon, &mut rng);
    let mut cases = Vec::with_capacity(count * 2);
    for i in 0..count {
        let exhausted = || DatasetError::LexiconExhausted { generated: i * 2 };
        let place = pools.places.pop().ok_or_else(exhausted)?;
        let name = pools.names.pop().ok_or_else(exhausted)?;
        let artifact = pools.artifacts.pop().ok_or_else(exhausted)?;
        let slots: Vec<(&str, &str)> =
            vec![("place", &place), ("name", &name), ("artifact", &artifact)];
        let doc_a = Document {
            id: "a".into(),
            text: fill(frames.positive_a, &slots),
            label: DocLabel::Relevant,
        };
        let doc_b = Document {
            id: "b".into(),
            text: fill(frames.positive_b, &slots),
            label: DocLabel::Relevant,
        };
        // Hard negatives reuse the kind's own frame with unrelated
        // entities: same topic vocabulary, different answer.
        let mut negatives = Vec::with_capacity(n_docs - 2);
        for j in 0..n_docs - 2 {
            let neg_place = pools.places.pop().ok_or_else(exhausted)?;
            let neg_name = pools.names.pop().ok_or_else(exhausted)?;
            let neg_artifact = pools.artifacts.pop().ok_or_else(exhausted)?;
            negatives.push(Document {
                id: format!("n{}", j + 1),
                text: fill(
                    frames.negative,
                    &[
                        ("place", neg_place.as_str()),
                        ("name", neg_name.as_str()),
                        ("artifact", neg_artifact.as_str()),
                    ],
                ),
                label: DocLabel::HardNegative,
            });
        }
        let query = fill(frames.query, &slots);
        let answer = fill(frames.answer, &slots);
        for (suffix, first, second) in
            [("ab", &doc_a, &doc_b), ("ba", &doc_b, &doc_a)]
        {
            let mut documents = Vec::with_capacity(n_docs);
            let mut next_negative = negatives.iter();
            for idx in 0..n_docs {
                if idx == pos_a {
                    documents.push(first.clone());
                } else if idx == pos_b {
                    documents.push(second.clone());
                } else {
                    documents.push(next_negative.next().expect("negative count").clone());
                }
            }
            let pair = if suffix == "ab" { (pos_a, pos_b) } else { (pos_b, pos_a) };
            cases.push(QueryCase {
                case_id: format!("{kind}-{i:03}-{suffix}"),
                query: query.clone(),
                documents,
                target_response: Some(answer.clone()),
                scenario_tag: template.kind,
                positive_pair: Some(pair),
                extra: Default::default(),
            });
        }
    }
    Ok(cases)
}

/// Map a scenario case onto the matching synthetic game so it can run
/// against the in-process oracle: the case's tag picks the game kind and
/// its positive pair becomes the interacting pair.
pub fn attach_synthetic_game(
    case: &QueryCase,
    weights: Vec<f64>,
    pair_value: f64,
    noise_sigma: f64,
    noise_seed: u64,
) -> Result<GameSpec, DatasetError> {
    let invalid = |msg: String| DatasetError::InvalidCase { case_id: case.case_id.clone(), msg };
    let kind = match case.scenario_tag {
        ScenarioTag::Redundancy => GameKind::Redundancy,
        ScenarioTag::Complementarity => GameKind::Complementarity,
        ScenarioTag::Synergy => GameKind::Synergy,
        ScenarioTag::None => {
            return Err(invalid("no scenario tag; there is no game kind to map to".into()))
        }
    };
    let pair = case
        .positive_pair
        .ok_or_else(|| invalid("scenario case carries no positive_pair".into()))?;
    if weights.len() != case.n() {
        return Err(invalid(format!(
            "{} weights supplied for {} documents",
            weights.len(),
            case.n()
        )));
    }
    let spec = GameSpec::interaction(kind, weights, pair, pair_value)
        .map_err(|e| invalid(e.to_string()))?;
    if noise_sigma != 0.0 {
        spec.with_noise(noise_sigma, noise_seed).map_err(|e| invalid(e.to_string()))
    } else {
        Ok(spec)
    }
}
