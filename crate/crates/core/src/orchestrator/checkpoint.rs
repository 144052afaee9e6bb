//! The checkpoint directory: a versioned header, line-delimited records, and a
//! ledger of completed work with checksums. Every file is replaced atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DegreeOutcome, SearchConfig};
use crate::error::{Error, Result};
use crate::search::ShardResult;

pub const FORMAT_VERSION: u32 = 1;

pub const HEADER_FILE: &str = "header.json";
pub const LEDGER_FILE: &str = "ledger.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const P1_FILE: &str = "p1.jsonl";
pub const CERT_DIR: &str = "certificates";

pub fn p2_file(m: usize) -> String {
    format!("p2_m{m}.jsonl")
}

pub fn p3_file(m: usize) -> String {
    format!("p3_m{m}.jsonl")
}

pub fn certificate_file(n: usize, m: usize) -> String {
    format!("{CERT_DIR}/n{n}_m{m}.json")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Conventions recorded so that files can be read without this program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub points: String,
    pub permutation_product: String,
    pub automorphism_product: String,
    pub d_prime_generators: String,
    pub alternating_next_generators: String,
    pub signed_points: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            points: "0-based; a permutation is its image array, images[x] = x^p".into(),
            permutation_product: "p*q applies p first, then q; p^g = g^-1 p g".into(),
            automorphism_product: "f*g = f o g, x -> f(g(x))".into(),
            d_prime_generators: "eps1 eps2, eps2 eps3, then the 3-cycles a_k -> a_{k+1} -> a_{k+2} for k = 1..n-2".into(),
            alternating_next_generators: "the same n-2 3-cycles, then n-1 -> n -> n+1 on n+1 points".into(),
            signed_points: "point 2k is a_{k+1}, point 2k+1 its inverse".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: u32,
    pub config: SearchConfig,
    pub conventions: Conventions,
}

/// One completed unit of work.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LedgerRecord {
    /// Restriction classes for degree `m` were enumerated and filtered; `file_sha256`
    /// covers the `p2` file.
    P2 { m: usize, file_sha256: String },
    Shard { m: usize, result: ShardResult },
    Degree { m: usize, outcome: DegreeOutcome },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LedgerLine {
    record: LedgerRecord,
    sha256: String,
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).map_err(|e| Error::Parse(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// An open checkpoint directory.
#[derive(Debug)]
pub struct Checkpoint {
    dir: PathBuf,
    ledger: Vec<LedgerRecord>,
}

impl Checkpoint {
    /// Creates a fresh checkpoint; refuses a directory that already holds a header.
    pub fn create(dir: &Path, config: &SearchConfig) -> Result<Self> {
        fs::create_dir_all(dir.join(CERT_DIR)).map_err(|e| Error::io(dir, e))?;
        let header_path = dir.join(HEADER_FILE);
        if header_path.exists() {
            return Err(Error::checkpoint(&header_path, "checkpoint already exists; use resume"));
        }
        let header = Header { format_version: FORMAT_VERSION, config: config.clone(), conventions: Conventions::default() };
        write_atomic(&header_path, to_pretty(&header)?.as_bytes())?;
        let cp = Checkpoint { dir: dir.to_path_buf(), ledger: Vec::new() };
        cp.flush_ledger()?;
        Ok(cp)
    }

    /// Opens an existing checkpoint, checking the header version and every ledger line.
    pub fn open(dir: &Path) -> Result<(Self, Header)> {
        let header_path = dir.join(HEADER_FILE);
        let text = fs::read_to_string(&header_path).map_err(|e| Error::checkpoint(&header_path, e.to_string()))?;
        let header: Header =
            serde_json::from_str(&text).map_err(|e| Error::checkpoint(&header_path, format!("unreadable header: {e}")))?;
        if header.format_version != FORMAT_VERSION {
            return Err(Error::checkpoint(
                &header_path,
                format!("format version {} (expected {FORMAT_VERSION})", header.format_version),
            ));
        }
        if header.conventions != Conventions::default() {
            return Err(Error::checkpoint(&header_path, "generator or point conventions differ"));
        }
        let ledger_path = dir.join(LEDGER_FILE);
        let text = fs::read_to_string(&ledger_path).map_err(|e| Error::checkpoint(&ledger_path, e.to_string()))?;
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(Error::checkpoint(&ledger_path, "truncated final line"));
        }
        let mut ledger = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let parsed: LedgerLine = serde_json::from_str(line)
                .map_err(|e| Error::checkpoint(&ledger_path, format!("line {}: {e}", k + 1)))?;
            let expected = sha256_hex(serde_json::to_string(&parsed.record).expect("serializable").as_bytes());
            if parsed.sha256 != expected {
                return Err(Error::checkpoint(&ledger_path, format!("line {}: checksum mismatch", k + 1)));
            }
            ledger.push(parsed.record);
        }
        Ok((Checkpoint { dir: dir.to_path_buf(), ledger }, header))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.ledger
    }

    fn flush_ledger(&self) -> Result<()> {
        let mut out = String::new();
        for record in &self.ledger {
            let body = serde_json::to_string(record).map_err(|e| Error::Parse(e.to_string()))?;
            let line = LedgerLine { record: record.clone(), sha256: sha256_hex(body.as_bytes()) };
            out.push_str(&serde_json::to_string(&line).map_err(|e| Error::Parse(e.to_string()))?);
            out.push('\n');
        }
        write_atomic(&self.dir.join(LEDGER_FILE), out.as_bytes())
    }

    pub fn append(&mut self, records: impl IntoIterator<Item = LedgerRecord>) -> Result<()> {
        self.ledger.extend(records);
        self.flush_ledger()
    }

    pub fn write_file(&self, name: &str, contents: &str) -> Result<()> {
        write_atomic(&self.dir.join(name), contents.as_bytes())
    }

    pub fn read_file(&self, name: &str) -> Result<String> {
        let path = self.dir.join(name);
        fs::read_to_string(&path).map_err(|e| Error::checkpoint(&path, e.to_string()))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn read_jsonl<T: DeserializeOwned>(&self, name: &str) -> Result<Vec<T>> {
        let path = self.dir.join(name);
        let text = self.read_file(name)?;
        text.lines()
            .enumerate()
            .map(|(k, l)| serde_json::from_str(l).map_err(|e| Error::checkpoint(&path, format!("line {}: {e}", k + 1))))
            .collect()
    }
}
