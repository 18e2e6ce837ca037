use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

const TABLES: &[(&str, &str)] = &[
    ("EXTENDED_PICTOGRAPHIC", "extended_pictographic.txt"),
    ("REGIONAL_INDICATOR", "regional_indicator.txt"),
    ("ALPHABETIC", "alphabetic.txt"),
    ("DECIMAL_NUMBER", "decimal_number.txt"),
    ("WHITE_SPACE", "white_space.txt"),
];

fn parse_ranges(text: &str) -> (Option<String>, Vec<(u32, u32)>) {
    let mut version = None;
    let mut ranges = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("Unicode ") {
                version = Some(v.trim().to_string());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (lo, hi) = match line.split_once("..") {
            Some((a, b)) => (a, b),
            None => (line, line),
        };
        let lo = u32::from_str_radix(lo, 16).expect("bad code point");
        let hi = u32::from_str_radix(hi, 16).expect("bad code point");
        assert!(lo <= hi, "inverted range {line}");
        ranges.push((lo, hi));
    }
    for pair in ranges.windows(2) {
        assert!(pair[0].1 < pair[1].0, "ranges must be sorted and disjoint");
    }
    (version, ranges)
}

fn main() {
    let data_dir = Path::new("data/ucd");
    let mut out = String::new();
    let mut version: Option<String> = None;
    for (name, file) in TABLES {
        let path = data_dir.join(file);
        println!("cargo:rerun-if-changed={}", path.display());
        let text = fs::read_to_string(&path).expect("missing vendored UCD table");
        let (v, ranges) = parse_ranges(&text);
        let v = v.expect("table has no version line");
        match &version {
            Some(prev) => assert_eq!(prev, &v, "UCD tables disagree on version"),
            None => version = Some(v),
        }
        writeln!(out, "pub(crate) static {name}: &[(u32, u32)] = &[").unwrap();
        for (lo, hi) in ranges {
            writeln!(out, "    (0x{lo:X}, 0x{hi:X}),").unwrap();
        }
        writeln!(out, "];").unwrap();
    }
    writeln!(
        out,
        "pub const UCD_VERSION: &str = \"{}\";",
        version.expect("no tables")
    )
    .unwrap();
    let dest = Path::new(&env::var("OUT_DIR").unwrap()).join("ucd_tables.rs");
    fs::write(dest, out).unwrap();
}
