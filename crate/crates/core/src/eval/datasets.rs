use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::compose::EventRecord;
use crate::error::{Error, Result};

/// Pairs of events with a mean human similarity rating.
///
/// File format: one item per line, `s1 v1 o1 s2 v2 o2 score`, whitespace
/// separated. Blank lines and lines starting with `#` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityDataset {
    pub name: String,
    pub items: Vec<SimilarityItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityItem {
    pub a: EventRecord,
    pub b: EventRecord,
    pub score: f64,
}

/// Thematic role of a noun relative to a verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// read from the `S` space
    Agent,
    /// read from the `O` space
    Patient,
}

impl Role {
    pub fn group_label(&self) -> &'static str {
        match self {
            Role::Agent => "S",
            Role::Patient => "O",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Agent => "agent",
            Role::Patient => "patient",
        })
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "agent" => Ok(Role::Agent),
            "patient" => Ok(Role::Patient),
            _ => Err(Error::Config(format!("unknown role {s:?} (agent, patient)"))),
        }
    }
}

/// Verb/noun/role triples with a 1-7 human fit rating.
///
/// File format: `verb noun role score` per line, role `agent` or `patient`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThematicFitDataset {
    pub name: String,
    pub items: Vec<ThematicItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThematicItem {
    pub verb: String,
    pub noun: String,
    pub role: Role,
    pub score: f64,
}

fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| (i + 1, l.to_string()))
        .collect())
}

fn parse_score(path: &Path, line: usize, raw: &str) -> Result<f64> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            detail: format!("bad score {raw:?}"),
        }),
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}

impl SimilarityDataset {
    pub fn load(path: &Path) -> Result<Self> {
        let mut items = Vec::new();
        for (line, text) in data_lines(path)? {
            let f: Vec<&str> = text.split_whitespace().collect();
            if f.len() != 7 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    detail: format!("expected 7 fields, found {}", f.len()),
                });
            }
            items.push(SimilarityItem {
                a: EventRecord::new(f[0], f[1], f[2]),
                b: EventRecord::new(f[3], f[4], f[5]),
                score: parse_score(path, line, f[6])?,
            });
        }
        Ok(Self {
            name: dataset_name(path),
            items,
        })
    }
}

impl ThematicFitDataset {
    pub fn load(path: &Path) -> Result<Self> {
        let mut items = Vec::new();
        for (line, text) in data_lines(path)? {
            let f: Vec<&str> = text.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    detail: format!("expected 4 fields, found {}", f.len()),
                });
            }
            let role = f[2].parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                detail: format!("bad role {:?}", f[2]),
            })?;
            items.push(ThematicItem {
                verb: f[0].to_string(),
                noun: f[1].to_string(),
                role,
                score: parse_score(path, line, f[3])?,
            });
        }
        Ok(Self {
            name: dataset_name(path),
            items,
        })
    }

    pub fn filter_role(&self, role: Role) -> Self {
        Self {
            name: format!("{}-{role}", self.name),
            items: self.items.iter().filter(|i| i.role == role).cloned().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn similarity_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gs.txt");
        std::fs::write(&p, "# header\npeople run company people operate company 6.53\n\nriver meet sea river satisfy sea 1.84\n").unwrap();
        let ds = SimilarityDataset::load(&p).unwrap();
        assert_eq!(ds.name, "gs");
        assert_eq!(ds.items.len(), 2);
        assert_eq!(ds.items[0].b, EventRecord::new("people", "operate", "company"));
        assert_eq!(ds.items[1].score, 1.84);

        std::fs::write(&p, "a b c d e f\n").unwrap();
        assert!(matches!(SimilarityDataset::load(&p), Err(Error::Parse { line: 1, .. })));
        std::fs::write(&p, "a b c d e f nan\n").unwrap();
        assert!(SimilarityDataset::load(&p).is_err());
    }

    #[test]
    fn thematic_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mst.txt");
        std::fs::write(&p, "frighten monster agent 6.1\nfrighten baby patient 5.9\n").unwrap();
        let ds = ThematicFitDataset::load(&p).unwrap();
        assert_eq!(ds.items[0].role, Role::Agent);
        assert_eq!(ds.items[0].role.group_label(), "S");
        assert_eq!(ds.items[1].role.group_label(), "O");
        assert_eq!(ds.filter_role(Role::Agent).items.len(), 1);

        std::fs::write(&p, "frighten monster instrument 3\n").unwrap();
        assert!(matches!(ThematicFitDataset::load(&p), Err(Error::Parse { .. })));
    }
}
