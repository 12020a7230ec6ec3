//! Single-file corpus store.
//!
//! The store is one JSON document holding the cleaned articles in insertion
//! order and, once extraction has run, the normalized mention events. Writes go
//! through a temporary file and a rename so a crash never leaves a torn store.

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{compute_stats, ArticleRecord, CorpusStats};
use crate::ner::{CountMode, MentionEvent};

const STORE_FORMAT: &str = "inthenews-store";
const STORE_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: not a valid store: {message}")]
    Format { path: String, message: String },
}

impl StoreError {
    pub fn is_io(&self) -> bool {
        matches!(self, StoreError::Io { .. })
    }
}

/// Mention events persisted alongside the articles they came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionSet {
    pub count_mode: CountMode,
    pub events: Vec<MentionEvent>,
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    format: String,
    version: u32,
    articles: Vec<ArticleRecord>,
    #[serde(default)]
    mentions: Option<MentionSet>,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    articles: Vec<ArticleRecord>,
    ids: HashSet<String>,
    mentions: Option<MentionSet>,
}

impl CorpusStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|message| StoreError::Format {
            path: path.display().to_string(),
            message,
        })
    }

    /// Opens an existing store, or starts an empty one if `path` does not exist.
    pub fn open_or_create(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        if path.as_ref().exists() {
            Self::open(path)
        } else {
            Ok(Self::new())
        }
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let file: StoreFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if file.format != STORE_FORMAT {
            return Err(format!("unexpected format tag {:?}", file.format));
        }
        if file.version != STORE_VERSION {
            return Err(format!("unsupported store version {}", file.version));
        }
        let mut store = Self::new();
        for a in file.articles {
            if !store.insert_article(a) {
                return Err("duplicate article id in store".into());
            }
        }
        store.mentions = file.mentions;
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let path = path.as_ref();
        let io_err = |source| StoreError::Io {
            path: path.display().to_string(),
            source,
        };
        let tmp = tmp_path(path);
        {
            let f = fs::File::create(&tmp).map_err(io_err)?;
            let mut w = BufWriter::new(f);
            self.write_json(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        fs::rename(&tmp, path).map_err(io_err)
    }

    fn write_json<W: Write>(&self, w: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct StoreFileRef<'a> {
            format: &'a str,
            version: u32,
            articles: &'a [ArticleRecord],
            mentions: &'a Option<MentionSet>,
        }
        serde_json::to_writer(
            w,
            &StoreFileRef {
                format: STORE_FORMAT,
                version: STORE_VERSION,
                articles: &self.articles,
                mentions: &self.mentions,
            },
        )
        .map_err(io::Error::other)
    }

    /// Inserts a record unless its id is already present (first write wins).
    pub fn insert_article(&mut self, record: ArticleRecord) -> bool {
        if !self.ids.insert(record.id.clone()) {
            return false;
        }
        self.articles.push(record);
        true
    }

    pub fn articles(&self) -> &[ArticleRecord] {
        &self.articles
    }

    pub fn article_count(&self) -> usize {
        self.articles.len()
    }

    pub fn corpus_stats(&self) -> CorpusStats {
        compute_stats(&self.articles)
    }

    pub fn mentions(&self) -> Option<&MentionSet> {
        self.mentions.as_ref()
    }

    pub fn set_mentions(&mut self, mentions: MentionSet) {
        self.mentions = Some(mentions);
    }

    /// Writes the cleaned articles as JSONL, one record per line.
    pub fn export_articles<W: Write>(&self, mut w: W) -> io::Result<()> {
        for a in &self.articles {
            serde_json::to_writer(&mut w, a).map_err(io::Error::other)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Writes the stored mention events as JSONL.
    pub fn export_mentions<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in self.mentions.iter().flat_map(|m| &m.events) {
            serde_json::to_writer(&mut w, e).map_err(io::Error::other)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}
