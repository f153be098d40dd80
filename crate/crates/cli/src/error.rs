use std::path::Path;

use diacorp::chrono::ChronoError;
use diacorp::colloc::QueryError;
use diacorp::corpus::{CorpusError, GroupError};
use diacorp::dsm::DsmError;
use diacorp::fixture::PlanError;
use diacorp::report::ReportError;
use diacorp::vertical::ParseError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus has no dated documents for chronological analysis")]
    EmptyDated,
    #[error("unknown group {0:?}; define it under [groups] or pass name=lemma,lemma")]
    UnknownGroup(String),
    #[error(transparent)]
    Groups(#[from] GroupError),
    #[error(transparent)]
    Chrono(ChronoError),
    #[error(transparent)]
    Query(QueryError),
    #[error(transparent)]
    Dsm(#[from] DsmError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

impl From<ChronoError> for CliError {
    fn from(e: ChronoError) -> Self {
        match e {
            ChronoError::EmptyDatedCorpus => CliError::EmptyDated,
            other => CliError::Chrono(other),
        }
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Groups(g) => CliError::Groups(g),
            other => CliError::Query(other),
        }
    }
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    /// 1 usage or I/O, 2 unreadable or empty corpus, 3 nothing dated, 4 bad groups.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Corpus(_) | CliError::EmptyCorpus => 2,
            CliError::EmptyDated => 3,
            CliError::UnknownGroup(_) | CliError::Groups(_) => 4,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Parse { .. } => "parse",
            CliError::Corpus(_) => "corpus",
            CliError::EmptyCorpus => "empty_corpus",
            CliError::EmptyDated => "empty_dated_corpus",
            CliError::UnknownGroup(_) | CliError::Groups(_) => "groups",
            CliError::Chrono(_) => "chrono",
            CliError::Query(_) => "query",
            CliError::Dsm(_) => "dsm",
            CliError::Report(_) => "report",
            CliError::Plan(_) => "plan",
        }
    }

    /// Single-line JSON rendering for `--json`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            exit_code: i32,
            message: String,
        }
        serde_json::to_string(&Line { error: self.kind(), exit_code: self.exit_code(), message: self.to_string() })
            .expect("error line serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::EmptyCorpus.exit_code(), 2);
        assert_eq!(CliError::from(ChronoError::EmptyDatedCorpus).exit_code(), 3);
        assert_eq!(CliError::UnknownGroup("x".into()).exit_code(), 4);
        assert_eq!(CliError::from(QueryError::Groups(GroupError::EmptyName)).exit_code(), 4);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }

    #[test]
    fn json_is_one_line() {
        let e = CliError::Io { path: "a\nb".into(), message: "gone".into() };
        let line = e.to_json();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["exit_code"], 1);
        assert_eq!(v["error"], "io");
    }
}
