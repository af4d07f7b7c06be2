//! Penn-Treebank-style word tokenizer.

const OPENERS: &[char] = &['"', '(', '[', '{', '`', '\u{201c}', '\u{2018}'];
const CLOSERS: &[char] = &[
    '.', ',', '!', '?', ';', ':', ')', ']', '}', '"', '\'', '\u{201d}', '\u{2019}',
];
const CLITICS: &[&str] = &["n't", "'s", "'m", "'re", "'ve", "'ll", "'d"];
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "st.", "jr.", "sr.", "vs.", "etc.", "prof.", "inc.", "co.",
];

/// Split raw text into PTB-style tokens.
///
/// Whitespace separates chunks; surrounding punctuation is peeled off each
/// chunk, clitics are split ("don't" -> "do" "n't", "I'm" -> "I" "'m") and
/// URLs are kept whole. Typographic apostrophes are folded to `'`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(&chunk.replace('\u{2019}', "'"), &mut out);
    }
    out
}

fn is_url(s: &str) -> bool {
    let lower = s.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

fn tokenize_chunk(chunk: &str, out: &mut Vec<String>) {
    let mut rest = chunk;

    while let Some(c) = rest.chars().next() {
        if OPENERS.contains(&c) && rest.len() > c.len_utf8() {
            out.push(c.to_string());
            rest = &rest[c.len_utf8()..];
        } else {
            break;
        }
    }

    let mut trailing = Vec::new();
    loop {
        if rest.is_empty() || keep_final_period(rest) {
            break;
        }
        if let Some(stripped) = rest.strip_suffix("...") {
            if !stripped.is_empty() || trailing.is_empty() {
                trailing.push("...".to_string());
                rest = stripped;
                continue;
            }
        }
        let Some(c) = rest.chars().next_back() else {
            break;
        };
        if !CLOSERS.contains(&c) || rest.len() == c.len_utf8() {
            break;
        }
        trailing.push(c.to_string());
        rest = &rest[..rest.len() - c.len_utf8()];
    }

    if !rest.is_empty() {
        if is_url(rest) {
            out.push(rest.to_string());
        } else {
            split_clitic(rest, out);
        }
    }
    out.extend(trailing.into_iter().rev());
}

fn keep_final_period(s: &str) -> bool {
    if !s.ends_with('.') || s.len() < 2 {
        return false;
    }
    let lower = s.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // initialisms such as "U.S." or "e.g."
    let body = &s[..s.len() - 1];
    body.contains('.') && body.split('.').all(|p| p.chars().count() == 1)
}

fn split_clitic(word: &str, out: &mut Vec<String>) {
    let lower = word.to_lowercase();
    if lower == "cannot" {
        out.push(word[..3].to_string());
        out.push(word[3..].to_string());
        return;
    }
    for clitic in CLITICS {
        if lower.len() > clitic.len() && lower.ends_with(clitic) {
            let cut = word.len() - clitic.len();
            if word.is_char_boundary(cut) {
                out.push(word[..cut].to_string());
                out.push(word[cut..].to_string());
                return;
            }
        }
    }
    out.push(word.to_string());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn contractions_and_final_period() {
        assert_eq!(toks("I'm sad."), ["I", "'m", "sad", "."]);
        assert_eq!(toks("don't go"), ["do", "n't", "go"]);
        assert_eq!(toks("I can't"), ["I", "ca", "n't"]);
        assert_eq!(
            toks("We'll see, they've said"),
            ["We", "'ll", "see", ",", "they", "'ve", "said"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(toks("").is_empty());
        assert!(toks("   \n\t").is_empty());
    }

    #[test]
    fn quotes_and_brackets() {
        assert_eq!(
            toks("\"Hello\" (really)!"),
            ["\"", "Hello", "\"", "(", "really", ")", "!"]
        );
        assert_eq!(toks("what?!"), ["what", "?", "!"]);
        assert_eq!(toks("wait..."), ["wait", "..."]);
    }

    #[test]
    fn urls_and_abbreviations() {
        assert_eq!(
            toks("see https://example.com/a?b=c, ok"),
            ["see", "https://example.com/a?b=c", ",", "ok"]
        );
        assert_eq!(
            toks("Dr. Smith in the U.S. today."),
            ["Dr.", "Smith", "in", "the", "U.S.", "today", "."]
        );
    }

    #[test]
    fn curly_apostrophe_folds() {
        assert_eq!(toks("it\u{2019}s"), ["it", "'s"]);
    }

    #[test]
    fn lone_punctuation() {
        assert_eq!(toks("a - b ."), ["a", "-", "b", "."]);
        assert_eq!(toks("\""), ["\""]);
    }
}
