use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::GroupSchema;
use crate::error::{Error, Result};

/// One corpus line before vocabulary filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTuple {
    pub words: Vec<String>,
    pub count: u64,
}

impl RawTuple {
    pub fn new<S: Into<String>>(words: impl IntoIterator<Item = S>, count: u64) -> Self {
        Self {
            words: words.into_iter().map(Into::into).collect(),
            count,
        }
    }
}

/// A line that was not accepted, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadedTuples {
    pub tuples: Vec<RawTuple>,
    pub rejections: Vec<Rejection>,
}

/// Reads a tab-separated tuple file.
///
/// In `strict` mode tokens containing anything other than alphanumeric
/// characters are rejected. Blank lines are skipped silently.
pub fn load_tuples(path: &Path, schema: &GroupSchema, strict: bool) -> Result<LoadedTuples> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let loaded = parse_tuples(BufReader::new(file), schema, strict)
        .map_err(|e| Error::io(path, e))?;
    if loaded.tuples.is_empty() {
        return Err(Error::EmptyCorpus {
            path: path.to_path_buf(),
        });
    }
    Ok(loaded)
}

/// Same as [`load_tuples`] over any reader; an empty result is not an error here.
pub fn parse_tuples<R: BufRead>(
    reader: R,
    schema: &GroupSchema,
    strict: bool,
) -> std::io::Result<LoadedTuples> {
    let arity = schema.arity();
    let mut out = LoadedTuples::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line, arity, strict) {
            Ok(t) => out.tuples.push(t),
            Err(reason) => {
                log::debug!("line {line_no} rejected: {reason}");
                out.rejections.push(Rejection {
                    line: line_no,
                    reason,
                });
            }
        }
    }
    Ok(out)
}

fn parse_line(line: &str, arity: usize, strict: bool) -> std::result::Result<RawTuple, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    let (words, count) = if fields.len() == arity {
        (&fields[..], 1)
    } else if fields.len() == arity + 1 {
        let raw = fields[arity].trim();
        let count: u64 = raw
            .parse()
            .map_err(|_| format!("expected {arity} fields plus a count, got {raw:?} as count"))?;
        if count == 0 {
            return Err("count must be positive".into());
        }
        (&fields[..arity], count)
    } else {
        return Err(format!("expected {arity} fields, found {}", fields.len()));
    };

    let mut out = Vec::with_capacity(arity);
    for (slot, w) in words.iter().enumerate() {
        let w = w.trim();
        if w.is_empty() {
            return Err(format!("empty field at position {}", slot + 1));
        }
        if strict && !w.chars().all(char::is_alphanumeric) {
            return Err(format!("non-alphanumeric token {w:?}"));
        }
        out.push(w.to_string());
    }
    Ok(RawTuple { words: out, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn svo() -> GroupSchema {
        GroupSchema::parse("S,V,O").unwrap()
    }

    fn parse(text: &str, strict: bool) -> LoadedTuples {
        parse_tuples(text.as_bytes(), &svo(), strict).unwrap()
    }

    #[test]
    fn plain_line() {
        let got = parse("cat\teat\tfood\n", true);
        assert_eq!(got.tuples, vec![RawTuple::new(["cat", "eat", "food"], 1)]);
        assert!(got.rejections.is_empty());
    }

    #[test]
    fn arity_mismatch_is_logged_with_line_number() {
        let got = parse("cat\teat\tfood\ncat\teat\n", true);
        assert_eq!(got.tuples.len(), 1);
        assert_eq!(got.rejections.len(), 1);
        assert_eq!(got.rejections[0].line, 2);
    }

    #[test]
    fn count_field() {
        let got = parse("people\thave\tplace\t12\n", true);
        assert_eq!(got.tuples[0].count, 12);
        assert_eq!(got.tuples[0].words, ["people", "have", "place"]);
    }

    #[test]
    fn bad_count_zero_count_and_empty_field() {
        let got = parse("a\tb\tc\tx\na\tb\tc\t0\na\t\tc\n", true);
        assert!(got.tuples.is_empty());
        assert_eq!(
            got.rejections.iter().map(|r| r.line).collect::<Vec<_>>(),
            [1, 2, 3]
        );
    }

    #[test]
    fn strict_mode_filters_punctuation() {
        let text = "don't\teat\tfood\n";
        assert_eq!(parse(text, true).tuples.len(), 0);
        assert_eq!(parse(text, false).tuples.len(), 1);
    }

    #[test]
    fn crlf_and_blank_lines() {
        let got = parse("cat\teat\tfood\r\n\n\ndog\teat\tbone\n", true);
        assert_eq!(got.tuples.len(), 2);
        assert!(got.rejections.is_empty());
    }

    #[test]
    fn missing_file_and_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.tsv");
        assert!(matches!(
            load_tuples(&missing, &svo(), true),
            Err(Error::Io { .. })
        ));
        let empty = dir.path().join("empty.tsv");
        std::fs::write(&empty, "bad\tline\n").unwrap();
        assert!(matches!(
            load_tuples(&empty, &svo(), true),
            Err(Error::EmptyCorpus { .. })
        ));
    }
}
