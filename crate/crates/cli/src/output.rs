use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::svg::Svg;
use crate::CliError;

/// Output directory of one run. Every file written through it starts with
/// the command name and config hash, as a comment where the format has one
/// and as a `config_sha256` field in JSON.
#[derive(Debug, Clone)]
pub struct Output {
    dir: PathBuf,
    command: &'static str,
    hash: String,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    command: &'a str,
    config_sha256: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

impl Output {
    pub fn create(dir: &Path, command: &'static str, hash: String) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), command, hash })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn header(&self) -> String {
        format!("legkit {} config-sha256={}", self.command, self.hash)
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// CSV with a leading `#` header line.
    pub fn csv<F>(&self, name: &str, fill: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<(), csv::Error>,
    {
        let mut buf = format!("# {}\n", self.header()).into_bytes();
        fill(&mut buf).map_err(|e| CliError::io(&self.path(name), std::io::Error::other(e)))?;
        self.write(name, &buf)
    }

    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf, CliError> {
        let stamped = Stamped { command: self.command, config_sha256: &self.hash, body };
        let mut text = serde_json::to_string_pretty(&stamped).expect("reports serialize to JSON");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn svg(&self, name: &str, svg: Svg) -> Result<PathBuf, CliError> {
        self.write(name, svg.finish(&self.header()).as_bytes())
    }

    /// Plain text with a leading `#` header line.
    pub fn text(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        self.write(name, format!("# {}\n{body}", self.header()).as_bytes())
    }

    /// Plain PGM; the comment goes after the magic number as the format requires.
    pub fn pgm(&self, name: &str, pgm: &str) -> Result<PathBuf, CliError> {
        let (magic, rest) = pgm.split_once('\n').unwrap_or((pgm, ""));
        self.write(name, format!("{magic}\n# {}\n{rest}", self.header()).as_bytes())
    }
}
