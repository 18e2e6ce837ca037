//! Unicode property lookups backed by vendored UCD tables (see `data/ucd`).

include!(concat!(env!("OUT_DIR"), "/ucd_tables.rs"));

fn in_table(table: &[(u32, u32)], c: char) -> bool {
    let cp = c as u32;
    table
        .binary_search_by(|&(lo, hi)| {
            if hi < cp {
                std::cmp::Ordering::Less
            } else if lo > cp {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
        .is_ok()
}

pub fn is_extended_pictographic(c: char) -> bool {
    in_table(EXTENDED_PICTOGRAPHIC, c)
}

pub fn is_regional_indicator(c: char) -> bool {
    in_table(REGIONAL_INDICATOR, c)
}

/// `\w` under Unicode rules: Alphabetic, decimal digits and underscore.
pub fn is_word_char(c: char) -> bool {
    c == '_' || in_table(ALPHABETIC, c) || in_table(DECIMAL_NUMBER, c)
}

pub fn is_white_space(c: char) -> bool {
    in_table(WHITE_SPACE, c)
}
