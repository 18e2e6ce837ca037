//! Word / emoji / symbol segmentation of post bodies.
//!
//! [`TokenizerMode::PaperRegex`] reproduces the pattern `\w+|[^\s]`: maximal
//! runs of word characters form one token and every other non-space scalar is
//! a token of its own. That splits multi-scalar emoji (ZWJ sequences, skin
//! tones, flags) into their parts. [`TokenizerMode::GraphemeEmoji`] keeps
//! emoji extended grapheme clusters whole and is otherwise identical.
//!
//! Emoji classification uses the vendored Extended_Pictographic and
//! Regional_Indicator tables, so results do not drift with the toolchain's
//! Unicode version.

mod ucd;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

pub use ucd::UCD_VERSION;

/// Unicode version of the grapheme-cluster rules, e.g. `"17.0.0"`.
pub fn segmentation_unicode_version() -> String {
    let (major, minor, patch) = unicode_segmentation::UNICODE_VERSION;
    format!("{major}.{minor}.{patch}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Emoji,
    Symbol,
}

/// A token borrowed from the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub kind: TokenKind,
    /// Byte offsets `[start, end)` into the source.
    pub byte_span: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizerMode {
    #[default]
    PaperRegex,
    GraphemeEmoji,
}

impl TokenizerMode {
    pub fn name(self) -> &'static str {
        match self {
            TokenizerMode::PaperRegex => "paper-regex",
            TokenizerMode::GraphemeEmoji => "grapheme-emoji",
        }
    }
}

impl std::str::FromStr for TokenizerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper-regex" | "paper" => Ok(TokenizerMode::PaperRegex),
            "grapheme-emoji" | "grapheme" => Ok(TokenizerMode::GraphemeEmoji),
            other => Err(format!("unknown tokenizer mode {other:?}")),
        }
    }
}

/// Is `cluster` an emoji?
///
/// True when the first scalar is Extended_Pictographic or a Regional
/// Indicator, or when the cluster is a keycap sequence (`[0-9#*] FE0F? 20E3`).
/// Presentation selectors are ignored: `"☺\u{FE0E}"` counts as an emoji.
pub fn is_emoji(cluster: &str) -> bool {
    let mut chars = cluster.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if ucd::is_extended_pictographic(first) || ucd::is_regional_indicator(first) {
        return true;
    }
    if first.is_ascii_digit() || first == '#' || first == '*' {
        let rest: Vec<char> = chars.collect();
        return matches!(rest.as_slice(), ['\u{20E3}'] | ['\u{FE0F}', '\u{20E3}']);
    }
    false
}

/// Segment `text` into tokens. Whitespace is skipped; everything else is
/// covered by exactly one token.
pub fn tokenize(text: &str, mode: TokenizerMode) -> Vec<Token<'_>> {
    let clusters: Vec<(usize, &str)> = match mode {
        TokenizerMode::PaperRegex => Vec::new(),
        TokenizerMode::GraphemeEmoji => text.grapheme_indices(true).collect(),
    };
    let mut cursor = 0usize;
    // Emoji cluster starting exactly at `pos`, if any. Positions only ever
    // increase, so a forward-moving cursor over the cluster list suffices.
    let mut emoji_cluster_at = |pos: usize| -> Option<usize> {
        while cursor < clusters.len() && clusters[cursor].0 < pos {
            cursor += 1;
        }
        match clusters.get(cursor) {
            Some(&(start, g)) if start == pos && is_emoji(g) => Some(start + g.len()),
            _ => None,
        }
    };

    let mut tokens = Vec::new();
    let mut iter = text.char_indices().peekable();
    while let Some((start, c)) = iter.next() {
        if ucd::is_white_space(c) {
            continue;
        }
        if mode == TokenizerMode::GraphemeEmoji {
            if let Some(end) = emoji_cluster_at(start) {
                while matches!(iter.peek(), Some(&(i, _)) if i < end) {
                    iter.next();
                }
                tokens.push(Token {
                    text: &text[start..end],
                    kind: TokenKind::Emoji,
                    byte_span: (start, end),
                });
                continue;
            }
        }
        if ucd::is_word_char(c) {
            let mut end = start + c.len_utf8();
            while let Some(&(i, next)) = iter.peek() {
                if !ucd::is_word_char(next)
                    || (mode == TokenizerMode::GraphemeEmoji && emoji_cluster_at(i).is_some())
                {
                    break;
                }
                end = i + next.len_utf8();
                iter.next();
            }
            tokens.push(Token {
                text: &text[start..end],
                kind: TokenKind::Word,
                byte_span: (start, end),
            });
            continue;
        }
        let end = start + c.len_utf8();
        let piece = &text[start..end];
        tokens.push(Token {
            text: piece,
            kind: if is_emoji(piece) {
                TokenKind::Emoji
            } else {
                TokenKind::Symbol
            },
            byte_span: (start, end),
        });
    }
    tokens
}

/// Token texts only, for feeding the vectorizer.
pub fn token_texts(text: &str, mode: TokenizerMode) -> Vec<&str> {
    tokenize(text, mode).into_iter().map(|t| t.text).collect()
}

/// All emoji tokens in order, duplicates kept.
pub fn extract_emojis(text: &str, mode: TokenizerMode) -> Vec<&str> {
    tokenize(text, mode)
        .into_iter()
        .filter(|t| t.kind == TokenKind::Emoji)
        .map(|t| t.text)
        .collect()
}

/// Distinct emojis of `text`, sorted by code point.
pub fn distinct_emojis(text: &str, mode: TokenizerMode) -> Vec<&str> {
    let mut emojis = extract_emojis(text, mode);
    emojis.sort_unstable();
    emojis.dedup();
    emojis
}

/// Remove emoji tokens, collapse whitespace runs to one space and trim.
///
/// Each removed emoji acts as a separator, so the words on either side never
/// merge into a new token.
pub fn strip_emojis(text: &str, mode: TokenizerMode) -> String {
    let mut spaced = String::with_capacity(text.len());
    let mut last = 0;
    for t in tokenize(text, mode) {
        if t.kind == TokenKind::Emoji {
            spaced.push_str(&text[last..t.byte_span.0]);
            spaced.push(' ');
            last = t.byte_span.1;
        }
    }
    spaced.push_str(&text[last..]);
    collapse_whitespace(&spaced)
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if ucd::is_white_space(c) {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use TokenKind::*;

    fn kinds(text: &str, mode: TokenizerMode) -> Vec<(&str, TokenKind)> {
        tokenize(text, mode)
            .iter()
            .map(|t| (t.text, t.kind))
            .collect()
    }

    #[test]
    fn paper_regex_example() {
        assert_eq!(
            kinds("AAPL 🚀🚀 up!", TokenizerMode::PaperRegex),
            vec![
                ("AAPL", Word),
                ("🚀", Emoji),
                ("🚀", Emoji),
                ("up", Word),
                ("!", Symbol)
            ]
        );
        assert!(tokenize("", TokenizerMode::PaperRegex).is_empty());
        assert!(tokenize(" \t\n", TokenizerMode::GraphemeEmoji).is_empty());
    }

    #[test]
    fn zwj_sequence_per_mode() {
        let astronaut = "👩\u{200D}🚀";
        assert_eq!(
            kinds(astronaut, TokenizerMode::GraphemeEmoji),
            vec![(astronaut, Emoji)]
        );
        assert_eq!(
            kinds(astronaut, TokenizerMode::PaperRegex),
            vec![("👩", Emoji), ("\u{200D}", Symbol), ("🚀", Emoji)]
        );
    }

    #[test]
    fn grapheme_mode_keeps_modifiers_flags_and_keycaps() {
        let thumbs = "👍🏽";
        let flag = "🇺🇸";
        let keycap = "1\u{FE0F}\u{20E3}";
        let text = format!("x{thumbs}{flag} ab{keycap}c");
        assert_eq!(
            kinds(&text, TokenizerMode::GraphemeEmoji),
            vec![
                ("x", Word),
                (thumbs, Emoji),
                (flag, Emoji),
                ("ab", Word),
                (keycap, Emoji),
                ("c", Word)
            ]
        );
        // the regex splits the keycap into a digit and two symbols
        assert_eq!(
            kinds(keycap, TokenizerMode::PaperRegex),
            vec![("1", Word), ("\u{FE0F}", Symbol), ("\u{20E3}", Symbol)]
        );
    }

    #[test]
    fn cashtags_are_not_special() {
        assert_eq!(
            kinds("$AAPL to_the_moon 42x", TokenizerMode::PaperRegex),
            vec![
                ("$", Symbol),
                ("AAPL", Word),
                ("to_the_moon", Word),
                ("42x", Word)
            ]
        );
    }

    #[test]
    fn emoji_classifier() {
        assert!(is_emoji("🚀"));
        assert!(!is_emoji("A"));
        assert!(!is_emoji("7"));
        assert!(!is_emoji(""));
        assert!(is_emoji("☺\u{FE0E}"));
        assert!(is_emoji("#\u{FE0F}\u{20E3}"));
        assert!(is_emoji("🇺🇸"));
        assert!(!is_emoji("\u{FE0F}"));
    }

    #[test]
    fn extract_and_strip() {
        let e = extract_emojis("🚀💎💎🚀", TokenizerMode::PaperRegex);
        assert_eq!(e, vec!["🚀", "💎", "💎", "🚀"]);
        assert_eq!(
            distinct_emojis("🚀💎💎🚀", TokenizerMode::PaperRegex).len(),
            2
        );
        assert!(extract_emojis("plain text only", TokenizerMode::PaperRegex).is_empty());
        assert_eq!(
            extract_emojis("moon 🌙!", TokenizerMode::PaperRegex),
            vec!["🌙"]
        );

        assert_eq!(
            strip_emojis("AAPL 🚀 moon", TokenizerMode::PaperRegex),
            "AAPL moon"
        );
        assert_eq!(strip_emojis("🚀🚀", TokenizerMode::PaperRegex), "");
        assert_eq!(
            strip_emojis("buy the dip", TokenizerMode::PaperRegex),
            "buy the dip"
        );
        assert_eq!(
            strip_emojis("AAPL🚀moon", TokenizerMode::PaperRegex),
            "AAPL moon"
        );
    }

    fn arb_text() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "a",
            "Zz",
            "_",
            "9",
            "é",
            " ",
            "  ",
            "\n",
            "$",
            "!",
            "🚀",
            "💎",
            "👩\u{200D}🚀",
            "👍🏽",
            "🇺🇸",
            "1\u{FE0F}\u{20E3}",
            "\u{FE0F}",
            "e\u{301}",
            "☺\u{FE0E}",
            "中文",
        ]);
        prop::collection::vec(pieces, 0..24).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn paper_mode_is_lossless(text in arb_text()) {
            let tokens = tokenize(&text, TokenizerMode::PaperRegex);
            let mut rebuilt = String::new();
            let mut last = 0;
            for t in &tokens {
                let gap = &text[last..t.byte_span.0];
                prop_assert!(gap.chars().all(ucd::is_white_space));
                rebuilt.push_str(gap);
                rebuilt.push_str(t.text);
                last = t.byte_span.1;
            }
            prop_assert!(text[last..].chars().all(ucd::is_white_space));
            rebuilt.push_str(&text[last..]);
            prop_assert_eq!(rebuilt, text.clone());
        }

        #[test]
        fn spans_are_increasing_and_nonempty(text in arb_text()) {
            for mode in [TokenizerMode::PaperRegex, TokenizerMode::GraphemeEmoji] {
                let tokens = tokenize(&text, mode);
                let mut last = 0;
                for t in &tokens {
                    prop_assert!(t.byte_span.0 >= last);
                    prop_assert!(t.byte_span.0 < t.byte_span.1);
                    prop_assert_eq!(&text[t.byte_span.0..t.byte_span.1], t.text);
                    last = t.byte_span.1;
                }
            }
        }

        #[test]
        fn retokenizing_joined_texts_is_stable(text in arb_text()) {
            for mode in [TokenizerMode::PaperRegex, TokenizerMode::GraphemeEmoji] {
                let first = token_texts(&text, mode);
                let joined = first.join(" ");
                prop_assert_eq!(token_texts(&joined, mode), first);
            }
        }

        #[test]
        fn extract_matches_emoji_tokens(text in arb_text()) {
            for mode in [TokenizerMode::PaperRegex, TokenizerMode::GraphemeEmoji] {
                let via_tokens: Vec<&str> = tokenize(&text, mode)
                    .into_iter()
                    .filter(|t| t.kind == Emoji)
                    .map(|t| t.text)
                    .collect();
                prop_assert_eq!(extract_emojis(&text, mode), via_tokens);
            }
        }
    }
}
