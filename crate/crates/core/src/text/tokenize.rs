use super::{PosTag, Token};

/// Clitics split off at an apostrophe, in lowercase.
pub const CONTRACTIONS: [&str; 7] = ["'d", "'ll", "'m", "n't", "'re", "'s", "'ve"];

pub fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}' | '\u{2019}' | '\u{201C}' | '\u{201D}' | '\u{2013}' | '\u{2014}' | '\u{2026}' | '\u{00AB}' | '\u{00BB}'
        )
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

pub fn is_contraction(s: &str) -> bool {
    let lower = fold_case(s).replace('\u{2019}', "'");
    CONTRACTIONS.contains(&lower.as_str())
}

/// ASCII-only lowercase; other characters pass through unchanged.
pub fn fold_case(s: &str) -> String {
    s.to_ascii_lowercase()
}

/// Splits a sentence into tokens with `pos` left as [`PosTag::Other`].
///
/// Whitespace separates chunks; leading and trailing punctuation characters
/// become tokens of their own and clitics are split at the apostrophe
/// (`don't` → `do n't`, `it's` → `it 's`). Joining the surfaces with single
/// spaces and tokenizing again yields the same tokens.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let mut surfaces = Vec::new();
    for chunk in sentence.split_whitespace() {
        split_chunk(chunk, &mut surfaces);
    }
    surfaces
        .into_iter()
        .enumerate()
        .map(|(index, surface)| Token::new(surface, PosTag::Other, index))
        .collect()
}

/// Whitespace-only tokenization, for pre-tokenized corpora such as M2.
pub fn tokenize_pretokenized(sentence: &str) -> Vec<Token> {
    sentence
        .split_whitespace()
        .enumerate()
        .map(|(index, s)| Token::new(s.to_string(), PosTag::Other, index))
        .collect()
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let mut core = chunk;
    let mut trailing = Vec::new();
    while let Some(c) = core.chars().last() {
        if is_punct(c) && core.len() > c.len_utf8() && !is_contraction(core) {
            trailing.push(c);
            core = &core[..core.len() - c.len_utf8()];
        } else {
            break;
        }
    }
    while let Some(c) = core.chars().next() {
        if is_punct(c) && core.len() > c.len_utf8() && !is_contraction(core) {
            out.push(c.to_string());
            core = &core[c.len_utf8()..];
        } else {
            break;
        }
    }
    split_clitic(core, out);
    out.extend(trailing.into_iter().rev().map(String::from));
}

fn split_clitic(core: &str, out: &mut Vec<String>) {
    if is_contraction(core) {
        out.push(core.to_string());
        return;
    }
    if let Some((pos, c)) = core.char_indices().rfind(|&(_, c)| is_apostrophe(c)) {
        let (head, tail) = core.split_at(pos);
        if !head.is_empty() && tail.len() > c.len_utf8() {
            if is_contraction(tail) {
                split_chunk(head, out);
                out.push(tail.to_string());
                return;
            }
            // n't belongs to the clitic, not the verb: "don't" -> "do" + "n't"
            let tail_rest = &tail[c.len_utf8()..];
            if tail_rest.eq_ignore_ascii_case("t") && head.len() > 1 && head.ends_with(['n', 'N']) {
                let split = head.len() - 1;
                split_chunk(&head[..split], out);
                out.push(format!("{}{}", &head[split..], tail));
                return;
            }
        }
    }
    out.push(core.to_string());
}

/// Joins token surfaces with single spaces.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn detaches_punctuation() {
        assert_eq!(surfaces("I go."), ["I", "go", "."]);
        assert!(surfaces("").is_empty());
        assert!(surfaces("   \t ").is_empty());
    }

    #[test]
    fn trailing_apostrophe_is_split() {
        assert_eq!(surfaces("clients' interests ."), ["clients", "'", "interests", "."]);
    }

    #[test]
    fn clitics() {
        assert_eq!(surfaces("I don't know"), ["I", "do", "n't", "know"]);
        assert_eq!(surfaces("it's fine."), ["it", "'s", "fine", "."]);
        assert_eq!(surfaces("We'll see"), ["We", "'ll", "see"]);
        assert_eq!(surfaces("can't"), ["ca", "n't"]);
        assert_eq!(surfaces("o'clock"), ["o'clock"]);
        assert_eq!(surfaces("'s"), ["'s"]);
        assert_eq!(surfaces("dog's."), ["dog", "'s", "."]);
    }

    #[test]
    fn brackets_and_numbers() {
        assert_eq!(
            surfaces("19. Develop (Environment + Agriculture)"),
            ["19", ".", "Develop", "(", "Environment", "+", "Agriculture", ")"]
        );
        assert_eq!(surfaces("3.5 well-known"), ["3.5", "well-known"]);
        assert_eq!(surfaces("..."), [".", ".", "."]);
    }

    #[test]
    fn indices_and_case() {
        let toks = tokenize("The Cat");
        assert_eq!(toks[1].index, 1);
        assert_eq!(toks[1].lower, "cat");
        assert_eq!(fold_case("ÉCOLE"), "École");
    }
}
