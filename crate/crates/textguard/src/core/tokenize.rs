//! Word tokenizer shared by attacks, constraints, and transforms.
//!
//! All word-level operations in the toolkit must agree on word boundaries,
//! so this is the single tokenization authority: split on whitespace, then
//! peel leading/trailing punctuation off each chunk into separate tokens.
//! Apostrophes and hyphens inside a word stay attached ("couldn't",
//! "well-made").

/// Returns true for characters that belong inside a word token.
fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '-' || c == '_'
}

/// Split `text` into word and punctuation tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        // leading punctuation, one token per char
        while start < chars.len() && !is_word_char(chars[start]) {
            tokens.push(chars[start].to_string());
            start += 1;
        }
        let mut end = chars.len();
        let mut trailing = Vec::new();
        while end > start && !is_word_char(chars[end - 1]) {
            trailing.push(chars[end - 1].to_string());
            end -= 1;
        }
        if end > start {
            tokens.push(chars[start..end].iter().collect());
        }
        tokens.extend(trailing.into_iter().rev());
    }
    tokens
}

/// Render a token sequence back to text. Tokens are joined with single
/// spaces; this is the canonical surface form used throughout the toolkit,
/// so `detokenize(tokenize(t))` is a fixed point.
pub fn detokenize(tokens: &[String]) -> String {
    tokens.join(" ")
}

/// Positions of tokens that contain at least one alphanumeric character,
/// i.e. the positions word-level operations may touch.
pub fn word_positions(tokens: &[String]) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.chars().any(char::is_alphanumeric))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_whitespace_and_punctuation() {
        assert_eq!(
            tokenize("great movie, really!"),
            vec!["great", "movie", ",", "really", "!"]
        );
    }

    #[test]
    fn keeps_inner_apostrophes_and_hyphens() {
        assert_eq!(
            tokenize("couldn't be well-made."),
            vec!["couldn't", "be", "well-made", "."]
        );
    }

    #[test]
    fn detokenize_is_fixed_point() {
        let text = "a fine , quiet film !";
        let once = detokenize(&tokenize(text));
        let twice = detokenize(&tokenize(&once));
        assert_eq!(once, twice);
    }

    #[test]
    fn word_positions_skip_punctuation() {
        let toks = tokenize("good , bad !");
        assert_eq!(word_positions(&toks), vec![0, 2]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("   ").is_empty());
    }
}
