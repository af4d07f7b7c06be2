//! Seeded generator of tagged English-like text.
//!
//! A small phrase grammar with an ambiguous lexicon ("love" as noun and verb,
//! "her" as object and possessive, "that" as determiner, complementizer and
//! relative pronoun, "'s" as possessive and copula) produces gold-tagged
//! sentences. The same grammar builds two-group post corpora in which the
//! share of first-person-singular pronouns and proper nouns is planted per
//! group, with the other knobs (tense mix, adjectives, prepositional
//! phrases) adjustable too.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Label, TaggedDocument};
use crate::error::{Error, Result};
use crate::tagger::{annotate_sentence, assign_tense, ModalLookahead, Ptb, TaggedSentence, Tense};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TenseMix {
    pub past: f64,
    pub present: f64,
    pub future: f64,
}

impl Default for TenseMix {
    fn default() -> Self {
        TenseMix {
            past: 0.4,
            present: 0.45,
            future: 0.15,
        }
    }
}

/// Planted properties of one group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupProfile {
    /// Share of tokens that are I/me/my/mine/myself.
    pub first_singular_rate: f64,
    /// Share of tokens tagged NNP.
    pub propn_rate: f64,
    pub tense_mix: TenseMix,
    /// Chance that a common noun phrase carries an adjective.
    pub adjective_prob: f64,
    /// Chance that a clause ends in a prepositional phrase.
    pub pp_prob: f64,
}

impl GroupProfile {
    pub fn target_default() -> Self {
        GroupProfile {
            first_singular_rate: 0.15,
            propn_rate: 0.02,
            tense_mix: TenseMix::default(),
            adjective_prob: 0.3,
            pp_prob: 0.3,
        }
    }

    pub fn control_default() -> Self {
        GroupProfile {
            first_singular_rate: 0.08,
            propn_rate: 0.06,
            ..Self::target_default()
        }
    }

    fn validate(&self, label: Label) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("{label} profile: {what}")));
        let rates = [self.first_singular_rate, self.propn_rate];
        if rates.iter().any(|r| !(0.0..0.5).contains(r)) || rates.iter().sum::<f64>() >= 0.4 {
            return bad("token rates must lie in [0, 0.5) and sum below 0.4");
        }
        let t = self.tense_mix;
        if [t.past, t.present, t.future]
            .iter()
            .any(|w| w.is_nan() || *w < 0.0)
            || t.past + t.present + t.future <= 0.0
        {
            return bad("tense weights must be non-negative with a positive sum");
        }
        if !(0.0..=1.0).contains(&self.adjective_prob) || !(0.0..=1.0).contains(&self.pp_prob) {
            return bad("probabilities must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub posts_per_group: usize,
    pub posts_per_user: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Each post's token rates are the group rate times U(1 − jitter, 1 + jitter).
    pub jitter: f64,
    pub target: GroupProfile,
    pub control: GroupProfile,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            posts_per_group: 2000,
            posts_per_user: 10,
            min_tokens: 150,
            max_tokens: 250,
            jitter: 0.2,
            target: GroupProfile::target_default(),
            control: GroupProfile::control_default(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// Same config with the Target profile replaced by the Control one.
    pub fn without_separation(mut self) -> Self {
        self.target = self.control.clone();
        self
    }

    pub fn profile(&self, label: Label) -> &GroupProfile {
        match label {
            Label::Target => &self.target,
            Label::Control => &self.control,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.posts_per_group == 0 || self.posts_per_user == 0 {
            return Err(Error::InvalidInput(
                "post and user counts must be positive".into(),
            ));
        }
        if self.min_tokens == 0 || self.min_tokens > self.max_tokens {
            return Err(Error::InvalidInput(
                "token range must satisfy 0 < min ≤ max".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(Error::InvalidInput("jitter must lie in [0, 1)".into()));
        }
        self.target.validate(Label::Target)?;
        self.control.validate(Label::Control)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthPost {
    pub user_id: String,
    pub label: Label,
    pub sentences: Vec<TaggedSentence>,
}

impl SynthPost {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn text(&self) -> String {
        self.sentences
            .iter()
            .map(|s| detokenize(s.iter().map(|(w, _)| w.as_str())))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_document(&self) -> Document {
        Document {
            user_id: self.user_id.clone(),
            label: self.label,
            timestamp: None,
            title: None,
            body: self.text(),
        }
    }

    /// The post with its gold tags.
    pub fn to_tagged(&self, lookahead: ModalLookahead) -> TaggedDocument {
        TaggedDocument {
            user_id: self.user_id.clone(),
            label: self.label,
            sentences: self
                .sentences
                .iter()
                .map(|s| {
                    let (forms, tags): (Vec<String>, Vec<Ptb>) = s.iter().cloned().unzip();
                    annotate_sentence(&forms, &tags, None, None, lookahead)
                })
                .collect(),
        }
    }
}

/// Rates measured on the generated gold tokens of one group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizedRates {
    pub posts: usize,
    pub users: usize,
    pub tokens: usize,
    pub first_singular_rate: f64,
    pub propn_rate: f64,
    /// Shares of past, present and future among tensed verbs.
    pub tense_shares: [f64; 3],
    pub adjective_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupManifest {
    pub label: Label,
    pub planted: GroupProfile,
    pub realized: RealizedRates,
}

/// Target minus Control for each planted knob.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedDeltas {
    pub first_singular_rate: f64,
    pub propn_rate: f64,
    pub tense_past: f64,
    pub tense_present: f64,
    pub tense_future: f64,
    pub adjective_prob: f64,
    pub pp_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub config: SynthConfig,
    pub groups: Vec<GroupManifest>,
    pub planted_deltas: PlantedDeltas,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthCorpus {
    pub posts: Vec<SynthPost>,
    pub manifest: SynthManifest,
}

impl SynthCorpus {
    pub fn to_corpus(&self) -> Result<Corpus> {
        Corpus::new(self.posts.iter().map(SynthPost::to_document).collect())
    }

    pub fn to_tagged(&self, lookahead: ModalLookahead) -> Vec<TaggedDocument> {
        self.posts.iter().map(|p| p.to_tagged(lookahead)).collect()
    }
}

/// Generate Target posts followed by Control posts.
pub fn generate_corpus(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut posts = Vec::with_capacity(2 * config.posts_per_group);
    let mut groups = Vec::new();
    for label in Label::BOTH {
        let profile = config.profile(label);
        let start = posts.len();
        for i in 0..config.posts_per_group {
            let j = config.jitter;
            let scale = |rng: &mut ChaCha8Rng| {
                if j > 0.0 {
                    rng.gen_range(1.0 - j..1.0 + j)
                } else {
                    1.0
                }
            };
            let quota = Quota {
                first_singular: profile.first_singular_rate * scale(&mut rng),
                propn: profile.propn_rate * scale(&mut rng),
                ..Quota::default()
            };
            let length = rng.gen_range(config.min_tokens..=config.max_tokens);
            let mut g = Grammar::new(&mut rng, Style::Profile(profile), Some(quota));
            let mut sentences = Vec::new();
            let mut tokens = 0;
            while tokens < length {
                let s = g.sentence();
                tokens += s.len();
                if let Some(q) = g.quota.as_mut() {
                    q.absorb(&s);
                }
                sentences.push(s);
            }
            posts.push(SynthPost {
                user_id: format!("{label}_{:04}", i / config.posts_per_user),
                label,
                sentences,
            });
        }
        groups.push(GroupManifest {
            label,
            planted: profile.clone(),
            realized: realized(&posts[start..]),
        });
    }
    let (t, c) = (&config.target, &config.control);
    let planted_deltas = PlantedDeltas {
        first_singular_rate: t.first_singular_rate - c.first_singular_rate,
        propn_rate: t.propn_rate - c.propn_rate,
        tense_past: t.tense_mix.past - c.tense_mix.past,
        tense_present: t.tense_mix.present - c.tense_mix.present,
        tense_future: t.tense_mix.future - c.tense_mix.future,
        adjective_prob: t.adjective_prob - c.adjective_prob,
        pp_prob: t.pp_prob - c.pp_prob,
    };
    Ok(SynthCorpus {
        posts,
        manifest: SynthManifest {
            config: config.clone(),
            groups,
            planted_deltas,
        },
    })
}

/// Independent gold-tagged sentences with broad pronoun and tense variety.
pub fn generate_treebank(n_sentences: usize, seed: u64) -> Vec<TaggedSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Grammar::new(&mut rng, Style::Treebank, None);
    (0..n_sentences).map(|_| g.sentence()).collect()
}

fn is_first_singular(word: &str, tag: Ptb) -> bool {
    matches!(tag, Ptb::PRP | Ptb::PRPS)
        && matches!(
            word.to_lowercase().as_str(),
            "i" | "me" | "my" | "mine" | "myself"
        )
}

fn realized(posts: &[SynthPost]) -> RealizedRates {
    let mut tokens = 0;
    let mut first = 0;
    let mut propn = 0;
    let mut adj = 0;
    let mut tenses = [0usize; 3];
    for s in posts.iter().flat_map(|p| &p.sentences) {
        tokens += s.len();
        for (w, t) in s {
            first += is_first_singular(w, *t) as usize;
            propn += matches!(t, Ptb::NNP | Ptb::NNPS) as usize;
            adj += matches!(t, Ptb::JJ | Ptb::JJR | Ptb::JJS) as usize;
        }
        let tags: Vec<Ptb> = s.iter().map(|(_, t)| *t).collect();
        for tense in assign_tense(&tags, ModalLookahead::default())
            .into_iter()
            .flatten()
        {
            tenses[match tense {
                Tense::Past => 0,
                Tense::Present => 1,
                Tense::Future => 2,
            }] += 1;
        }
    }
    let n_tensed = tenses.iter().sum::<usize>().max(1) as f64;
    let mut users: Vec<&str> = posts.iter().map(|p| p.user_id.as_str()).collect();
    users.dedup();
    let per_token = |c: usize| c as f64 / tokens.max(1) as f64;
    RealizedRates {
        posts: posts.len(),
        users: users.len(),
        tokens,
        first_singular_rate: per_token(first),
        propn_rate: per_token(propn),
        tense_shares: tenses.map(|c| c as f64 / n_tensed),
        adjective_rate: per_token(adj),
    }
}

/// Join tokens into text that [`crate::tagger::tokenize`] splits back into
/// the same tokens.
pub fn detokenize<'a>(tokens: impl IntoIterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for tok in tokens {
        let attach = matches!(
            tok,
            "." | "," | "!" | "?" | "..." | "n't" | "'s" | "'m" | "'re" | "'ve" | "'ll" | "'d"
        );
        if !out.is_empty() && !attach {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}

/// Running counts that steer slot choices toward the planted token rates.
#[derive(Clone, Copy, Debug, Default)]
struct Quota {
    first_singular: f64,
    propn: f64,
    tokens: usize,
    first_count: usize,
    propn_count: usize,
}

impl Quota {
    fn absorb(&mut self, s: &[(String, Ptb)]) {
        let (first, propn) = count_planted(s);
        self.tokens += s.len();
        self.first_count += first;
        self.propn_count += propn;
    }
}

fn count_planted(s: &[(String, Ptb)]) -> (usize, usize) {
    let first = s.iter().filter(|(w, t)| is_first_singular(w, *t)).count();
    let propn = s
        .iter()
        .filter(|(_, t)| matches!(t, Ptb::NNP | Ptb::NNPS))
        .count();
    (first, propn)
}

#[derive(Clone, Copy)]
enum Style<'p> {
    Treebank,
    Profile(&'p GroupProfile),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Filler {
    FirstSingular,
    ProperNoun,
    Other,
}

/// Verb agreement class of a subject.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Agr {
    First,
    Third,
    Plural,
}

struct Verb {
    base: &'static str,
    past: &'static str,
    part: &'static str,
    third: &'static str,
    ing: &'static str,
}

macro_rules! verbs {
    ($($b:literal $p:literal $n:literal $t:literal $g:literal),* $(,)?) => {
        &[$(Verb { base: $b, past: $p, part: $n, third: $t, ing: $g }),*]
    };
}

const TRANSITIVE: &[Verb] = verbs![
    "love" "loved" "loved" "loves" "loving",
    "hate" "hated" "hated" "hates" "hating",
    "need" "needed" "needed" "needs" "needing",
    "miss" "missed" "missed" "misses" "missing",
    "call" "called" "called" "calls" "calling",
    "help" "helped" "helped" "helps" "helping",
    "see" "saw" "seen" "sees" "seeing",
    "know" "knew" "known" "knows" "knowing",
    "want" "wanted" "wanted" "wants" "wanting",
    "like" "liked" "liked" "likes" "liking",
    "watch" "watched" "watched" "watches" "watching",
    "find" "found" "found" "finds" "finding",
    "make" "made" "made" "makes" "making",
    "take" "took" "taken" "takes" "taking",
    "get" "got" "gotten" "gets" "getting",
    "lose" "lost" "lost" "loses" "losing",
    "meet" "met" "met" "meets" "meeting",
    "tell" "told" "told" "tells" "telling",
    "text" "texted" "texted" "texts" "texting",
    "visit" "visited" "visited" "visits" "visiting",
    "remember" "remembered" "remembered" "remembers" "remembering",
    "trust" "trusted" "trusted" "trusts" "trusting",
    "leave" "left" "left" "leaves" "leaving",
    "bring" "brought" "brought" "brings" "bringing",
    "buy" "bought" "bought" "buys" "buying",
];

const INTRANSITIVE: &[Verb] = verbs![
    "sleep" "slept" "slept" "sleeps" "sleeping",
    "cry" "cried" "cried" "cries" "crying",
    "work" "worked" "worked" "works" "working",
    "walk" "walked" "walked" "walks" "walking",
    "run" "ran" "run" "runs" "running",
    "talk" "talked" "talked" "talks" "talking",
    "go" "went" "gone" "goes" "going",
    "come" "came" "come" "comes" "coming",
    "wait" "waited" "waited" "waits" "waiting",
    "try" "tried" "tried" "tries" "trying",
    "laugh" "laughed" "laughed" "laughs" "laughing",
    "struggle" "struggled" "struggled" "struggles" "struggling",
    "rest" "rested" "rested" "rests" "resting",
    "stay" "stayed" "stayed" "stays" "staying",
    "move" "moved" "moved" "moves" "moving",
];

const PARTICLE_VERBS: &[(&Verb, &str)] = &[
    (&TRANSITIVE[14], "up"),
    (&INTRANSITIVE[6], "out"),
    (&INTRANSITIVE[9], "out"),
    (&TRANSITIVE[11], "out"),
    (&INTRANSITIVE[7], "back"),
];

const FEEL: Verb = Verb {
    base: "feel",
    past: "felt",
    part: "felt",
    third: "feels",
    ing: "feeling",
};

const COMPLEMENT_VERBS: &[Verb] = verbs![
    "think" "thought" "thought" "thinks" "thinking",
    "know" "knew" "known" "knows" "knowing",
    "guess" "guessed" "guessed" "guesses" "guessing",
    "feel" "felt" "felt" "feels" "feeling",
    "hope" "hoped" "hoped" "hopes" "hoping",
    "realize" "realized" "realized" "realizes" "realizing",
];

const INFINITIVAL: &[Verb] = verbs![
    "want" "wanted" "wanted" "wants" "wanting",
    "need" "needed" "needed" "needs" "needing",
    "try" "tried" "tried" "tries" "trying",
    "decide" "decided" "decided" "decides" "deciding",
    "plan" "planned" "planned" "plans" "planning",
];

/// Singular and plural noun forms; plural `None` marks mass nouns.
const NOUNS: &[(&str, Option<&str>)] = &[
    ("day", Some("days")),
    ("night", Some("nights")),
    ("week", Some("weeks")),
    ("job", Some("jobs")),
    ("friend", Some("friends")),
    ("family", Some("families")),
    ("mom", Some("moms")),
    ("dad", Some("dads")),
    ("sister", Some("sisters")),
    ("brother", Some("brothers")),
    ("dog", Some("dogs")),
    ("cat", Some("cats")),
    ("house", Some("houses")),
    ("car", Some("cars")),
    ("school", Some("schools")),
    ("class", Some("classes")),
    ("book", Some("books")),
    ("movie", Some("movies")),
    ("game", Some("games")),
    ("phone", Some("phones")),
    ("thing", Some("things")),
    ("plan", Some("plans")),
    ("walk", Some("walks")),
    ("call", Some("calls")),
    ("doctor", Some("doctors")),
    ("weekend", Some("weekends")),
    ("party", Some("parties")),
    ("song", Some("songs")),
    ("city", Some("cities")),
    ("problem", Some("problems")),
    ("room", Some("rooms")),
    ("teacher", Some("teachers")),
    ("boss", Some("bosses")),
    ("meeting", Some("meetings")),
    ("run", Some("runs")),
    ("hope", Some("hopes")),
    ("fear", Some("fears")),
    ("life", Some("lives")),
    ("time", Some("times")),
    ("work", None),
    ("help", None),
    ("love", None),
    ("sleep", None),
    ("anxiety", None),
    ("therapy", None),
    ("coffee", None),
    ("music", None),
    ("money", None),
];

const PEOPLE: &str = "people";

const ADJECTIVES: &[&str] = &[
    "sad", "happy", "tired", "good", "bad", "new", "old", "great", "little", "big", "lonely",
    "empty", "anxious", "hard", "nice", "fine", "hopeless", "calm", "angry", "scared", "proud",
    "quiet", "busy", "sick", "awful",
];
const COMPARATIVES: &[(&str, Ptb)] = &[
    ("better", Ptb::JJR),
    ("worse", Ptb::JJR),
    ("harder", Ptb::JJR),
    ("best", Ptb::JJS),
    ("worst", Ptb::JJS),
];
const ADVERBS: &[&str] = &[
    "really",
    "always",
    "never",
    "just",
    "often",
    "sometimes",
    "still",
    "even",
    "maybe",
    "probably",
    "already",
    "actually",
    "finally",
    "barely",
];
const CLAUSE_FINAL_ADVERBS: &[&str] = &[
    "again", "too", "well", "anymore", "later", "together", "here", "there",
];
const INTENSIFIERS: &[&str] = &["so", "very", "really", "pretty", "too"];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "with", "for", "about", "from", "after", "before", "like", "without", "into",
];
const SUBORDINATORS: &[(&str, Ptb)] = &[
    ("because", Ptb::IN),
    ("if", Ptb::IN),
    ("although", Ptb::IN),
    ("since", Ptb::IN),
    ("while", Ptb::IN),
    ("when", Ptb::WRB),
];
const INTERJECTIONS: &[&str] = &["oh", "well", "yeah", "wow", "ugh", "lol", "hey", "okay"];
const NUMBERS: &[&str] = &["two", "three", "five", "ten", "2", "3", "10", "100"];
const NAMES: &[&str] = &[
    "Anna",
    "Mark",
    "Sarah",
    "Tom",
    "Emma",
    "Jake",
    "Lisa",
    "Chris",
    "Reddit",
    "Netflix",
    "London",
    "Texas",
    "Monday",
    "Friday",
    "Christmas",
    "Google",
    "Spotify",
    "Paris",
    "Mike",
    "Jess",
    "Discord",
    "Ohio",
];
const NAME_PAIRS: &[(&str, &str)] = &[
    ("New", "York"),
    ("San", "Diego"),
    ("Los", "Angeles"),
    ("Star", "Wars"),
];
const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ra", "ven", "tor", "sa", "del", "ni", "bru", "an", "el", "jo", "ris", "ta",
    "mar", "ko", "lin",
];

/// Third-person and other non-first-singular pronouns with their object forms.
const OTHER_SUBJECTS: &[(&str, &str, &str, Agr)] = &[
    ("we", "us", "our", Agr::Plural),
    ("you", "you", "your", Agr::Plural),
    ("he", "him", "his", Agr::Third),
    ("she", "her", "her", Agr::Third),
    ("it", "it", "its", Agr::Third),
    ("they", "them", "their", Agr::Plural),
];

struct Grammar<'r, 'p> {
    rng: &'r mut ChaCha8Rng,
    style: Style<'p>,
    quota: Option<Quota>,
    out: Vec<(String, Ptb)>,
}

impl<'r, 'p> Grammar<'r, 'p> {
    fn new(rng: &'r mut ChaCha8Rng, style: Style<'p>, quota: Option<Quota>) -> Self {
        Grammar {
            rng,
            style,
            quota,
            out: Vec::new(),
        }
    }

    fn push(&mut self, word: &str, tag: Ptb) {
        self.out.push((word.to_string(), tag));
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        *items.choose(self.rng).expect("non-empty lexicon")
    }

    fn adjective_prob(&self) -> f64 {
        match self.style {
            Style::Treebank => 0.3,
            Style::Profile(p) => p.adjective_prob,
        }
    }

    fn pp_prob(&self) -> f64 {
        match self.style {
            Style::Treebank => 0.3,
            Style::Profile(p) => p.pp_prob,
        }
    }

    fn tense(&mut self) -> Tense {
        let mix = match self.style {
            Style::Treebank => TenseMix::default(),
            Style::Profile(p) => p.tense_mix,
        };
        let r = self.rng.gen_range(0.0..mix.past + mix.present + mix.future);
        if r < mix.past {
            Tense::Past
        } else if r < mix.past + mix.present {
            Tense::Present
        } else {
            Tense::Future
        }
    }

    /// Decide what fills a nominal slot, steering toward the quota if any.
    fn filler(&mut self, allow_propn: bool) -> Filler {
        let Some(q) = self.quota else {
            let r: f64 = self.rng.gen();
            return if r < 0.25 {
                Filler::FirstSingular
            } else if r < 0.37 && allow_propn {
                Filler::ProperNoun
            } else {
                Filler::Other
            };
        };
        let (first, propn) = count_planted(&self.out);
        let pos = (q.tokens + self.out.len() + 1) as f64;
        let first_gap = q.first_singular * pos - (q.first_count + first) as f64;
        let propn_gap = q.propn * pos - (q.propn_count + propn) as f64;
        if first_gap > 0.0 && (first_gap >= propn_gap || !allow_propn) {
            Filler::FirstSingular
        } else if allow_propn && propn_gap > 0.0 {
            Filler::ProperNoun
        } else {
            Filler::Other
        }
    }

    fn sentence(&mut self) -> TaggedSentence {
        self.out.clear();
        if self.chance(0.08) {
            let uh = self.pick(INTERJECTIONS);
            self.push(uh, Ptb::UH);
            self.push(",", Ptb::Comma);
        }
        let r: f64 = self.rng.gen();
        let question = if r < 0.5 {
            self.clause();
            false
        } else if r < 0.62 {
            self.clause();
            if self.chance(0.5) {
                self.push(",", Ptb::Comma);
            }
            let cc = self.pick(&["and", "but", "or"]);
            self.push(cc, Ptb::CC);
            self.clause();
            false
        } else if r < 0.74 {
            let (sub, tag) = self.pick(SUBORDINATORS);
            if self.chance(0.5) {
                self.clause();
                self.push(sub, tag);
                self.clause();
            } else {
                self.push(sub, tag);
                self.clause();
                self.push(",", Ptb::Comma);
                self.clause();
            }
            false
        } else if r < 0.84 {
            self.complement_clause();
            false
        } else if r < 0.9 {
            self.existential();
            false
        } else {
            self.question();
            true
        };
        let end = if question {
            ("?", Ptb::Period)
        } else {
            let r: f64 = self.rng.gen();
            if r < 0.82 {
                (".", Ptb::Period)
            } else if r < 0.94 {
                ("!", Ptb::Period)
            } else {
                ("...", Ptb::Colon)
            }
        };
        self.push(end.0, end.1);
        capitalize(&mut self.out[0].0);
        std::mem::take(&mut self.out)
    }

    fn subject(&mut self) -> Agr {
        match self.filler(true) {
            Filler::FirstSingular => {
                if self.chance(0.85) {
                    self.push("I", Ptb::PRP);
                    Agr::First
                } else {
                    self.push("my", Ptb::PRPS);
                    self.noun_head(false)
                }
            }
            Filler::ProperNoun => {
                self.name();
                Agr::Third
            }
            Filler::Other => {
                if self.chance(0.55) {
                    let (subj, _, _, agr) = self.pick(OTHER_SUBJECTS);
                    self.push(subj, Ptb::PRP);
                    agr
                } else {
                    self.common_np(true)
                }
            }
        }
    }

    fn object(&mut self) {
        match self.filler(true) {
            Filler::FirstSingular => {
                let r: f64 = self.rng.gen();
                if r < 0.5 {
                    self.push("me", Ptb::PRP);
                } else if r < 0.93 {
                    self.push("my", Ptb::PRPS);
                    self.noun_head(true);
                } else {
                    self.push("myself", Ptb::PRP);
                }
            }
            Filler::ProperNoun => {
                self.name();
                if self.chance(0.15) {
                    self.push("'s", Ptb::POS);
                    self.noun_head(true);
                }
            }
            Filler::Other => {
                if self.chance(0.4) {
                    let (_, obj, _, _) = self.pick(OTHER_SUBJECTS);
                    self.push(obj, Ptb::PRP);
                } else {
                    self.common_np(false);
                }
            }
        }
    }

    fn name(&mut self) {
        let r: f64 = self.rng.gen();
        if r < 0.12 {
            let (a, b) = self.pick(NAME_PAIRS);
            self.push(a, Ptb::NNP);
            self.push(b, Ptb::NNP);
        } else if r < 0.45 {
            let n = self.rng.gen_range(2..=3);
            let mut word: String = (0..n).map(|_| self.pick(SYLLABLES)).collect();
            capitalize(&mut word);
            self.out.push((word, Ptb::NNP));
        } else {
            let n = self.pick(NAMES);
            self.push(n, Ptb::NNP);
        }
    }

    /// Determiner (never first person) plus noun head.
    fn common_np(&mut self, allow_relative: bool) -> Agr {
        let r: f64 = self.rng.gen();
        if r < 0.35 {
            self.push("the", Ptb::DT);
        } else if r < 0.5 {
            // article chosen after the head is known
            let at = self.out.len();
            self.push("a", Ptb::DT);
            let agr = self.noun_head(false);
            if agr == Agr::Plural {
                self.out.remove(at);
            } else if self.out[at + 1].0.starts_with(['a', 'e', 'i', 'o', 'u']) {
                self.out[at].0 = "an".to_string();
            }
            return agr;
        } else if r < 0.6 {
            let d = self.pick(&["this", "that", "every", "another", "no", "some"]);
            self.push(d, Ptb::DT);
        } else if r < 0.85 {
            let (_, _, poss, _) = self.pick(OTHER_SUBJECTS);
            self.push(poss, Ptb::PRPS);
        } else if r < 0.92 {
            let n = self.pick(NUMBERS);
            self.push(n, Ptb::CD);
            self.plural_head();
            return Agr::Plural;
        } else {
            self.push(PEOPLE, Ptb::NNS);
            return Agr::Plural;
        }
        let agr = self.noun_head(true);
        if allow_relative && self.chance(0.08) {
            self.push("that", Ptb::WDT);
            self.finite_verb(agr, true);
        }
        agr
    }

    fn plural_head(&mut self) {
        if self.chance(self.adjective_prob()) {
            let a = self.pick(ADJECTIVES);
            self.push(a, Ptb::JJ);
        }
        let plural = loop {
            if let (_, Some(p)) = self.pick(NOUNS) {
                break p;
            }
        };
        self.push(plural, Ptb::NNS);
    }

    /// Optional adjective and a noun; returns the agreement of the phrase.
    fn noun_head(&mut self, allow_plural: bool) -> Agr {
        if self.chance(self.adjective_prob()) {
            if self.chance(0.15) {
                let (w, t) = self.pick(COMPARATIVES);
                self.push(w, t);
            } else {
                let a = self.pick(ADJECTIVES);
                self.push(a, Ptb::JJ);
            }
        }
        let (sing, plural) = self.pick(NOUNS);
        match plural {
            Some(p) if allow_plural && self.chance(0.3) => {
                self.push(p, Ptb::NNS);
                Agr::Plural
            }
            _ => {
                self.push(sing, Ptb::NN);
                Agr::Third
            }
        }
    }

    fn clause(&mut self) {
        let agr = self.subject();
        let r: f64 = self.rng.gen();
        if r < 0.2 {
            self.copula(agr);
        } else if r < 0.3 {
            self.infinitival(agr);
        } else {
            self.finite_verb(agr, false);
        }
        if self.chance(self.pp_prob()) {
            self.pp();
        }
        if self.chance(0.08) {
            let a = self.pick(CLAUSE_FINAL_ADVERBS);
            self.push(a, Ptb::RB);
        }
    }

    fn pp(&mut self) {
        let p = self.pick(PREPOSITIONS);
        self.push(p, Ptb::IN);
        self.object();
    }

    fn adverb(&mut self) {
        if self.chance(0.15) {
            let a = self.pick(ADVERBS);
            self.push(a, Ptb::RB);
        }
    }

    /// Be/do/have forms, which agree with the subject.
    fn aux(&mut self, agr: Agr, lemma: &str, tense: Tense) {
        let (w, t) = match (lemma, tense, agr) {
            ("be", Tense::Past, Agr::Plural) => ("were", Ptb::VBD),
            ("be", Tense::Past, _) => ("was", Ptb::VBD),
            ("be", _, Agr::First) => ("am", Ptb::VBP),
            ("be", _, Agr::Third) => ("is", Ptb::VBZ),
            ("be", _, Agr::Plural) => ("are", Ptb::VBP),
            ("do", Tense::Past, _) => ("did", Ptb::VBD),
            ("do", _, Agr::Third) => ("does", Ptb::VBZ),
            ("do", _, _) => ("do", Ptb::VBP),
            ("have", Tense::Past, _) => ("had", Ptb::VBD),
            ("have", _, Agr::Third) => ("has", Ptb::VBZ),
            (_, _, _) => ("have", Ptb::VBP),
        };
        let after_pronoun = matches!(self.out.last(), Some((_, Ptb::PRP)));
        let contracted = match w {
            "am" => Some("'m"),
            "is" => Some("'s"),
            "are" => Some("'re"),
            "have" => Some("'ve"),
            _ => None,
        };
        match contracted {
            Some(c) if after_pronoun && lemma != "do" && self.chance(0.35) => self.push(c, t),
            _ => self.push(w, t),
        }
    }

    fn modal(&mut self) {
        let after_pronoun = matches!(self.out.last(), Some((_, Ptb::PRP)));
        let r: f64 = self.rng.gen();
        if r < 0.55 {
            let will = if after_pronoun && self.chance(0.3) {
                "'ll"
            } else {
                "will"
            };
            self.push(will, Ptb::MD);
        } else {
            let m = self.pick(&["can", "could", "should", "would", "might", "must"]);
            self.push(m, Ptb::MD);
        }
        if self.out.last().is_some_and(|(w, _)| w != "'ll") && self.chance(0.12) {
            self.push("n't", Ptb::RB);
            let last = self.out.len() - 2;
            match self.out[last].0.as_str() {
                "will" => self.out[last].0 = "wo".into(),
                "can" => self.out[last].0 = "ca".into(),
                _ => {}
            }
        }
        self.adverb();
    }

    /// A tensed verb group followed by its complements.
    fn finite_verb(&mut self, agr: Agr, relative: bool) {
        let transitive = self.chance(0.6);
        let particle = !transitive && self.chance(0.1);
        let verb = if particle {
            let (v, _) = self.pick(PARTICLE_VERBS);
            v
        } else if transitive {
            &TRANSITIVE[self.rng.gen_range(0..TRANSITIVE.len())]
        } else {
            &INTRANSITIVE[self.rng.gen_range(0..INTRANSITIVE.len())]
        };
        let tense = self.tense();
        self.adverb();
        let r: f64 = self.rng.gen();
        match tense {
            Tense::Future => {
                self.modal();
                self.push(verb.base, Ptb::VB);
            }
            _ if r < 0.1 => {
                self.aux(agr, "do", tense);
                self.push("n't", Ptb::RB);
                self.push(verb.base, Ptb::VB);
            }
            _ if r < 0.22 => {
                self.aux(agr, "be", tense);
                self.push(verb.ing, Ptb::VBG);
            }
            _ if r < 0.3 => {
                self.aux(agr, "have", tense);
                self.adverb();
                self.push(verb.part, Ptb::VBN);
            }
            Tense::Past => self.push(verb.past, Ptb::VBD),
            Tense::Present if agr == Agr::Third => self.push(verb.third, Ptb::VBZ),
            Tense::Present => self.push(verb.base, Ptb::VBP),
        }
        if particle {
            let p = PARTICLE_VERBS
                .iter()
                .find(|(v, _)| std::ptr::eq(*v, verb))
                .map(|(_, p)| *p)
                .unwrap_or("up");
            self.push(p, Ptb::RP);
        }
        if transitive && !relative {
            self.object();
        }
    }

    fn copula(&mut self, agr: Agr) {
        let tense = self.tense();
        let feel = self.chance(0.3);
        match (tense, feel) {
            (Tense::Future, _) => {
                self.modal();
                self.push(if feel { FEEL.base } else { "be" }, Ptb::VB);
            }
            (Tense::Past, true) => self.push(FEEL.past, Ptb::VBD),
            (Tense::Present, true) if agr == Agr::Third => self.push(FEEL.third, Ptb::VBZ),
            (Tense::Present, true) => self.push(FEEL.base, Ptb::VBP),
            (_, false) => self.aux(agr, "be", tense),
        }
        if !feel && self.chance(0.1) {
            self.push("not", Ptb::RB);
        }
        if self.chance(0.35) {
            let i = self.pick(INTENSIFIERS);
            self.push(i, Ptb::RB);
        }
        if self.chance(0.12) {
            let (w, t) = self.pick(COMPARATIVES);
            self.push(w, t);
        } else {
            let a = self.pick(ADJECTIVES);
            self.push(a, Ptb::JJ);
        }
    }

    fn infinitival(&mut self, agr: Agr) {
        let verb = &INFINITIVAL[self.rng.gen_range(0..INFINITIVAL.len())];
        match self.tense() {
            Tense::Past => self.push(verb.past, Ptb::VBD),
            Tense::Present if agr == Agr::Third => self.push(verb.third, Ptb::VBZ),
            Tense::Present => self.push(verb.base, Ptb::VBP),
            Tense::Future => {
                self.modal();
                self.push(verb.base, Ptb::VB);
            }
        }
        self.push("to", Ptb::TO);
        let v = &TRANSITIVE[self.rng.gen_range(0..TRANSITIVE.len())];
        self.push(v.base, Ptb::VB);
        self.object();
    }

    fn complement_clause(&mut self) {
        let agr = self.subject();
        let verb = &COMPLEMENT_VERBS[self.rng.gen_range(0..COMPLEMENT_VERBS.len())];
        match self.tense() {
            Tense::Past => self.push(verb.past, Ptb::VBD),
            Tense::Present if agr == Agr::Third => self.push(verb.third, Ptb::VBZ),
            Tense::Present => self.push(verb.base, Ptb::VBP),
            Tense::Future => {
                self.modal();
                self.push(verb.base, Ptb::VB);
            }
        }
        let r: f64 = self.rng.gen();
        if r < 0.4 {
            self.push("that", Ptb::IN);
        } else if r < 0.5 && verb.base == "feel" {
            self.push("like", Ptb::IN);
        }
        self.clause();
    }

    fn existential(&mut self) {
        self.push("there", Ptb::EX);
        let tense = self.tense();
        let plural = self.chance(0.3);
        match tense {
            Tense::Future => {
                self.modal();
                self.push("be", Ptb::VB);
            }
            Tense::Past => self.push(if plural { "were" } else { "was" }, Ptb::VBD),
            Tense::Present => {
                if plural {
                    self.push("are", Ptb::VBP);
                } else {
                    self.push("is", Ptb::VBZ);
                }
            }
        }
        if plural {
            if self.chance(0.5) {
                self.push("so", Ptb::RB);
                self.push("many", Ptb::JJ);
            }
            self.plural_head();
        } else {
            let det = self.pick(&["a", "no", "this"]);
            self.push(det, Ptb::DT);
            let (sing, _) = self.pick(NOUNS);
            if det == "a" && sing.starts_with(['a', 'e', 'i', 'o', 'u']) {
                self.out.last_mut().expect("determiner").0 = "an".into();
            }
            self.push(sing, Ptb::NN);
        }
        if self.chance(self.pp_prob()) {
            self.pp();
        }
    }

    fn question(&mut self) {
        if self.chance(0.4) {
            let wh = self.pick(&["why", "how", "where"]);
            self.push(wh, Ptb::WRB);
        } else if self.chance(0.2) {
            self.push("what", Ptb::WP);
        }
        let wh_object = matches!(self.out.last(), Some((_, Ptb::WP)));
        let tense = if self.chance(0.5) {
            Tense::Past
        } else {
            Tense::Present
        };
        let at = self.out.len();
        self.push("do", Ptb::VBP);
        let agr = self.subject();
        let (w, t) = match (tense, agr) {
            (Tense::Past, _) => ("did", Ptb::VBD),
            (_, Agr::Third) => ("does", Ptb::VBZ),
            _ => ("do", Ptb::VBP),
        };
        self.out[at] = (w.to_string(), t);
        let verb = &TRANSITIVE[self.rng.gen_range(0..TRANSITIVE.len())];
        self.push(verb.base, Ptb::VB);
        if !wh_object {
            self.object();
        }
    }
}

fn capitalize(word: &mut String) {
    if let Some(c) = word.chars().next() {
        if c.is_lowercase() {
            let upper: String = c.to_uppercase().collect();
            word.replace_range(..c.len_utf8(), &upper);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::tokenize;

    fn small() -> SynthConfig {
        SynthConfig {
            posts_per_group: 60,
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn text_round_trips_through_tokenizer() {
        for s in generate_treebank(400, 1) {
            let text = detokenize(s.iter().map(|(w, _)| w.as_str()));
            let words: Vec<&str> = s.iter().map(|(w, _)| w.as_str()).collect();
            assert_eq!(tokenize(&text), words, "{text}");
        }
    }

    #[test]
    fn treebank_is_seeded() {
        assert_eq!(generate_treebank(50, 3), generate_treebank(50, 3));
        assert_ne!(generate_treebank(50, 3), generate_treebank(50, 4));
    }

    #[test]
    fn planted_rates_are_realized() {
        let corpus = generate_corpus(&small()).unwrap();
        let m = &corpus.manifest;
        for g in &m.groups {
            assert!((g.realized.first_singular_rate - g.planted.first_singular_rate).abs() < 0.01);
            assert!((g.realized.propn_rate - g.planted.propn_rate).abs() < 0.01);
            assert_eq!(g.realized.posts, 60);
            assert_eq!(g.realized.users, 6);
        }
        assert!((m.planted_deltas.first_singular_rate - 0.07).abs() < 1e-12);
        for p in &corpus.posts {
            let n = p.token_count();
            assert!((150..250 + 40).contains(&n), "{n}");
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        assert_eq!(
            generate_corpus(&small()).unwrap(),
            generate_corpus(&small()).unwrap()
        );
    }

    #[test]
    fn zero_separation() {
        let m = generate_corpus(&small().without_separation())
            .unwrap()
            .manifest;
        let d = &m.planted_deltas;
        let all = [
            d.first_singular_rate,
            d.propn_rate,
            d.tense_past,
            d.tense_present,
            d.tense_future,
            d.adjective_prob,
            d.pp_prob,
        ];
        assert!(all.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn invalid_configs() {
        let mut c = small();
        c.min_tokens = 300;
        assert!(generate_corpus(&c).is_err());
        let mut c = small();
        c.target.first_singular_rate = 0.6;
        assert!(generate_corpus(&c).is_err());
    }

    #[test]
    fn ambiguous_words_occur_with_several_tags() {
        let bank = generate_treebank(3000, 2);
        let tags_of = |word: &str| {
            let mut t: Vec<Ptb> = bank
                .iter()
                .flatten()
                .filter(|(w, _)| w.eq_ignore_ascii_case(word))
                .map(|(_, t)| *t)
                .collect();
            t.sort();
            t.dedup();
            t
        };
        for word in ["love", "her", "that", "'s", "like", "work"] {
            assert!(tags_of(word).len() >= 2, "{word}: {:?}", tags_of(word));
        }
    }
}
