//! Greedy averaged-perceptron PTB tagger.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tags::Ptb;
use crate::error::{Error, Result};

const FORMAT_HEADER: &str = "poslens-tagger v1";
const START: [&str; 2] = ["-START-", "-START2-"];
const END: &str = "-END-";

/// One training sentence: token forms paired with gold tags.
pub type TaggedSentence = Vec<(String, Ptb)>;

#[derive(Clone, Debug, Default)]
struct Param {
    weight: f64,
    total: f64,
    stamp: u64,
}

/// Trained tagger weights.
///
/// `tags` is ordered by descending training frequency, so a tie between
/// scores (including an untrained model, where every score is 0) resolves to
/// the more frequent tag.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggerModel {
    tags: Vec<Ptb>,
    weights: HashMap<String, Vec<f64>>,
    epochs: usize,
    seed: u64,
    updates: u64,
}

impl TaggerModel {
    pub fn tags(&self) -> &[Ptb] {
        &self.tags
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of token instances seen during training (the averaging denominator).
    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn weight(&self, feature: &str, tag: Ptb) -> f64 {
        let Some(i) = self.tags.iter().position(|&t| t == tag) else {
            return 0.0;
        };
        self.weights.get(feature).map_or(0.0, |w| w[i])
    }

    fn predict(&self, features: &[String]) -> Ptb {
        let mut scores = vec![0.0; self.tags.len()];
        for f in features {
            if let Some(w) = self.weights.get(f) {
                for (s, w) in scores.iter_mut().zip(w) {
                    *s += w;
                }
            }
        }
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        self.tags[best]
    }

    /// Tag one sentence greedily, left to right.
    pub fn tag_sentence<S: AsRef<str>>(&self, words: &[S]) -> Vec<Ptb> {
        let lowered: Vec<String> = words.iter().map(|w| w.as_ref().to_lowercase()).collect();
        let mut history: Vec<Ptb> = Vec::with_capacity(words.len());
        for (i, word) in words.iter().enumerate() {
            let features = token_features(word.as_ref(), &lowered, i, &history);
            history.push(self.predict(&features));
        }
        history
    }

    /// Token accuracy against gold sentences.
    pub fn accuracy(&self, gold: &[TaggedSentence]) -> f64 {
        let (mut right, mut total) = (0usize, 0usize);
        for sentence in gold {
            let words: Vec<&str> = sentence.iter().map(|(w, _)| w.as_str()).collect();
            let predicted = self.tag_sentence(&words);
            right += predicted
                .iter()
                .zip(sentence)
                .filter(|(p, (_, g))| *p == g)
                .count();
            total += sentence.len();
        }
        if total == 0 {
            0.0
        } else {
            right as f64 / total as f64
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file), path)
    }

    /// Serialize to the versioned text layout; features are sorted so equal
    /// models produce identical bytes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_HEADER}");
        let _ = writeln!(out, "epochs {}", self.epochs);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "updates {}", self.updates);
        let tags: Vec<&str> = self.tags.iter().map(|t| t.as_str()).collect();
        let _ = writeln!(out, "tags {}", tags.join(" "));
        let mut features: Vec<&String> = self.weights.keys().collect();
        features.sort();
        for f in features {
            let w = &self.weights[f];
            if w.iter().all(|&x| x == 0.0) {
                continue;
            }
            out.push_str(&escape(f));
            out.push('\t');
            let mut first = true;
            for (i, &x) in w.iter().enumerate() {
                if x != 0.0 {
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    let _ = write!(out, "{i}:{x:?}");
                }
            }
            out.push('\n');
        }
        out
    }

    fn read<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::parse(path, line, msg);
        let mut lines = reader.lines().enumerate();
        let mut next_line = |expect: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i + 1, l)),
                Some((i, Err(e))) => Err(Error::parse(path, i + 1, e.to_string())),
                None => Err(Error::parse(path, 0, format!("missing {expect}"))),
            }
        };
        let (n, header) = next_line("header")?;
        if header != FORMAT_HEADER {
            return Err(Error::ModelFormat(format!(
                "{}: expected header {FORMAT_HEADER:?} on line {n}, found {header:?}",
                path.display()
            )));
        }
        let mut field = |name: &str| -> Result<String> {
            let (n, line) = next_line(name)?;
            line.strip_prefix(name)
                .and_then(|r| {
                    r.strip_prefix(' ')
                        .or(if r.is_empty() { Some("") } else { None })
                })
                .map(str::to_string)
                .ok_or_else(|| bad(n, &format!("expected `{name}`")))
        };
        let parse_num = |s: String, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::ModelFormat(format!("bad {what}: {s:?}")))
        };
        let epochs = parse_num(field("epochs")?, "epochs")? as usize;
        let seed = parse_num(field("seed")?, "seed")?;
        let updates = parse_num(field("updates")?, "updates")?;
        let tags = field("tags")?
            .split_whitespace()
            .map(str::parse::<Ptb>)
            .collect::<Result<Vec<_>>>()?;
        if tags.is_empty() {
            return Err(Error::ModelFormat("empty tag set".into()));
        }
        let mut weights = HashMap::new();
        for (i, line) in lines {
            let line = line.map_err(|e| bad(i + 1, &e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let (feat, rest) = line
                .split_once('\t')
                .ok_or_else(|| bad(i + 1, "expected feature<TAB>weights"))?;
            let mut w = vec![0.0; tags.len()];
            for entry in rest.split(' ') {
                let (idx, val) = entry
                    .split_once(':')
                    .ok_or_else(|| bad(i + 1, "expected index:weight"))?;
                let idx: usize = idx.parse().map_err(|_| bad(i + 1, "bad tag index"))?;
                if idx >= tags.len() {
                    return Err(bad(i + 1, "tag index out of range"));
                }
                w[idx] = val.parse().map_err(|_| bad(i + 1, "bad weight"))?;
            }
            weights.insert(unescape(feat), w);
        }
        Ok(TaggerModel {
            tags,
            weights,
            epochs,
            seed,
            updates,
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('\t', "\\t")
        .replace('\n', "\\n")
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('t') => out.push('\t'),
                Some('n') => out.push('\n'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn token_features(word: &str, lowered: &[String], i: usize, history: &[Ptb]) -> Vec<String> {
    let lower = &lowered[i];
    let chars: Vec<char> = lower.chars().collect();
    let suffix = |n: usize| -> String { chars[chars.len().saturating_sub(n)..].iter().collect() };
    let tag_at = |back: usize| -> &str {
        if back <= i {
            history[i - back].as_str()
        } else {
            START[back - i - 1]
        }
    };
    let prev_word = if i == 0 {
        START[0]
    } else {
        lowered[i - 1].as_str()
    };
    let next_word = lowered.get(i + 1).map_or(END, String::as_str);

    let mut f = vec![
        "bias".to_string(),
        format!("w={lower}"),
        format!("s1={}", suffix(1)),
        format!("s2={}", suffix(2)),
        format!("s3={}", suffix(3)),
        format!("p1={}", chars.first().copied().unwrap_or(' ')),
        format!("t-1={}", tag_at(1)),
        format!("t-2,t-1={},{}", tag_at(2), tag_at(1)),
        format!("w-1={prev_word}"),
        format!("w+1={next_word}"),
    ];
    if word.chars().any(|c| c.is_ascii_digit()) {
        f.push("shape=digit".to_string());
    }
    if word.contains('-') {
        f.push("shape=hyphen".to_string());
    }
    if word.chars().next().is_some_and(char::is_uppercase) {
        f.push("shape=cap".to_string());
    }
    f
}

/// Train an averaged perceptron on gold-tagged sentences.
///
/// Sentence order is reshuffled with a generator seeded from `seed` before
/// every epoch, so the same inputs always yield the same model.
pub fn train_tagger(sentences: &[TaggedSentence], epochs: usize, seed: u64) -> Result<TaggerModel> {
    if sentences.iter().all(|s| s.is_empty()) {
        return Err(Error::InsufficientData(
            "tagger training set is empty".into(),
        ));
    }

    let mut freq: HashMap<Ptb, usize> = HashMap::new();
    for (_, tag) in sentences.iter().flatten() {
        *freq.entry(*tag).or_default() += 1;
    }
    let mut tags: Vec<Ptb> = freq.keys().copied().collect();
    tags.sort_by(|a, b| freq[b].cmp(&freq[a]).then(a.cmp(b)));
    let index: HashMap<Ptb, usize> = tags.iter().enumerate().map(|(i, &t)| (t, i)).collect();

    let mut params: HashMap<String, Vec<Param>> = HashMap::new();
    let mut instances: u64 = 0;
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &s in &order {
            let sentence = &sentences[s];
            let lowered: Vec<String> = sentence.iter().map(|(w, _)| w.to_lowercase()).collect();
            let mut history: Vec<Ptb> = Vec::with_capacity(sentence.len());
            for (i, (word, gold)) in sentence.iter().enumerate() {
                let features = token_features(word, &lowered, i, &history);
                let guess = {
                    let mut scores = vec![0.0; tags.len()];
                    for f in &features {
                        if let Some(ps) = params.get(f) {
                            for (s, p) in scores.iter_mut().zip(ps) {
                                *s += p.weight;
                            }
                        }
                    }
                    let mut best = 0;
                    for (k, &s) in scores.iter().enumerate() {
                        if s > scores[best] {
                            best = k;
                        }
                    }
                    best
                };
                instances += 1;
                let truth = index[gold];
                if guess != truth {
                    for f in &features {
                        let ps = params
                            .entry(f.clone())
                            .or_insert_with(|| vec![Param::default(); tags.len()]);
                        for (k, delta) in [(truth, 1.0), (guess, -1.0)] {
                            let p = &mut ps[k];
                            p.total += (instances - p.stamp) as f64 * p.weight;
                            p.stamp = instances;
                            p.weight += delta;
                        }
                    }
                }
                history.push(tags[guess]);
            }
        }
    }

    let weights = params
        .into_iter()
        .map(|(f, ps)| {
            let averaged = ps
                .iter()
                .map(|p| {
                    if instances == 0 {
                        0.0
                    } else {
                        (p.total + (instances - p.stamp) as f64 * p.weight) / instances as f64
                    }
                })
                .collect();
            (f, averaged)
        })
        .collect();

    Ok(TaggerModel {
        tags,
        weights,
        epochs,
        seed,
        updates: instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(pairs: &[(&str, Ptb)]) -> TaggedSentence {
        pairs.iter().map(|(w, t)| (w.to_string(), *t)).collect()
    }

    fn toy() -> Vec<TaggedSentence> {
        use Ptb::*;
        vec![
            sent(&[("I", PRP), ("slept", VBD), (".", Period)]),
            sent(&[("the", DT), ("dog", NN), ("slept", VBD), (".", Period)]),
            sent(&[("I", PRP), ("will", MD), ("sleep", VB), (".", Period)]),
            sent(&[("the", DT), ("cat", NN), ("runs", VBZ), (".", Period)]),
            sent(&[("we", PRP), ("run", VBP), ("home", RB), (".", Period)]),
        ]
    }

    #[test]
    fn learns_toy_treebank() {
        let model = train_tagger(&toy(), 5, 7).unwrap();
        assert_eq!(model.accuracy(&toy()), 1.0);
        assert_eq!(
            model.tag_sentence(&["I", "slept"]),
            vec![Ptb::PRP, Ptb::VBD]
        );
    }

    #[test]
    fn zero_epochs_predicts_majority_tag() {
        let model = train_tagger(&toy(), 0, 1).unwrap();
        // "." is the most frequent tag in the toy set
        assert_eq!(model.tags()[0], Ptb::Period);
        assert!(model
            .tag_sentence(&["anything", "at", "all"])
            .iter()
            .all(|&t| t == Ptb::Period));
    }

    #[test]
    fn empty_training_set_errors() {
        assert!(train_tagger(&[], 3, 0).is_err());
        assert!(train_tagger(&[vec![]], 3, 0).is_err());
    }

    #[test]
    fn deterministic_and_round_trips() {
        let a = train_tagger(&toy(), 4, 11).unwrap();
        let b = train_tagger(&toy(), 4, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());

        let text = a.to_text();
        let back = TaggerModel::read(std::io::Cursor::new(text.clone()), Path::new("mem")).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(
            back.tag_sentence(&["the", "dog", "slept"]),
            a.tag_sentence(&["the", "dog", "slept"])
        );
    }

    #[test]
    fn averaged_weight_is_mean_over_instances() {
        use Ptb::*;
        // Traced by hand. Epoch 1: "a" guessed NN (tie -> NN), correct;
        // "b" guessed NN, wrong at instance 2 -> its features get VB +1, NN -1.
        // Epoch 2: "a" shares only `bias` with "b", scores NN -1 / VB +1,
        // wrong at instance 3 -> bias back to 0, "a" features NN +1.
        // "b" is then correct at instance 4.
        let data = vec![sent(&[("a", NN), ("b", VB)])];
        let model = train_tagger(&data, 2, 0).unwrap();
        assert_eq!(model.updates(), 4);
        assert_eq!(model.weight("bias", NN), -0.25);
        assert_eq!(model.weight("bias", VB), 0.25);
        assert_eq!(model.weight("w=a", NN), 0.25);
        assert_eq!(model.weight("w=b", VB), 0.5);
        assert_eq!(model.weight("w=b", NN), -0.5);
    }

    #[test]
    fn escape_round_trip() {
        let s = "w=a\tb\\c\nd";
        assert_eq!(unescape(&escape(s)), s);
    }
}
