//! Reader and writer for the one-token-per-line corpus format.
//!
//! ```text
//! <doc id="c1" date="1096" collection="Cluny">
//! horrea	horreum	NOUN
//! frumenti	frumentum
//! </doc>
//! ```
//!
//! Documents are dated with `date="Y"`, with `date_min="A" date_max="B"`, or not at all.
//! Attribute values are double-quoted with `&quot;` and `&amp;` escapes. Lines without a
//! tab that look like other structural tags (`<s>`, `</p>`) are ignored.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    Corpus, CorpusError, DateError, DateSpec, Document, EraBounds, Token, TokenError,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    /// The first bad document aborts the parse.
    #[default]
    Strict,
    /// Bad documents are skipped and reported.
    Lenient,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub mode: ParseMode,
    pub era: EraBounds,
}

impl ParseOptions {
    pub fn lenient() -> Self {
        ParseOptions { mode: ParseMode::Lenient, ..Default::default() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("malformed document header: {0}")]
    MalformedHeader(String),
    #[error("malformed token line: {0}")]
    MalformedToken(String),
    #[error("invalid token: {0}")]
    Token(#[from] TokenError),
    #[error("invalid date: {0}")]
    Date(#[from] DateError),
    #[error("duplicate document id")]
    DuplicateId,
    #[error("document is not closed before {0}")]
    Unterminated(&'static str),
    #[error("document has no tokens")]
    EmptyDocument,
    #[error("line outside of any document")]
    OutsideDocument,
    #[error("closing tag without an open document")]
    UnexpectedClose,
    #[error("read failure: {0}")]
    Io(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}{}: {kind}", .doc_id.as_ref().map(|d| format!(" (document {d:?})")).unwrap_or_default())]
pub struct ParseError {
    pub line: usize,
    pub doc_id: Option<String>,
    pub kind: ParseErrorKind,
}

/// One skipped document (or stray line) in lenient mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub id: Option<String>,
    pub line: usize,
    pub reason: String,
}

impl From<&ParseError> for Reject {
    fn from(e: &ParseError) -> Self {
        Reject { id: e.doc_id.clone(), line: e.line, reason: e.kind.to_string() }
    }
}

/// Renders rejects as JSON lines, one object per rejected document.
pub fn rejects_to_jsonl(rejects: &[Reject]) -> String {
    let mut out = String::new();
    for r in rejects {
        out.push_str(&serde_json::to_string(r).expect("reject serializes"));
        out.push('\n');
    }
    out
}

#[derive(Debug)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    pub rejects: Vec<Reject>,
}

pub fn parse_vertical(input: &str, opts: &ParseOptions) -> Result<ParseOutcome, ParseError> {
    let lines = input.split('\n').map(|l| Ok(l.to_string()));
    // A trailing newline yields one empty final piece, which is ignored like any blank line.
    parse_lines(lines, opts)
}

pub fn parse_vertical_reader<R: BufRead>(reader: R, opts: &ParseOptions) -> Result<ParseOutcome, ParseError> {
    parse_lines(reader.lines().map(|l| l.map_err(|e| e.to_string())), opts)
}

struct OpenDoc {
    header_line: usize,
    id: String,
    date: DateSpec,
    collection: String,
    region: Option<String>,
    tokens: Vec<Token>,
    /// Set once the document is known to be bad; remaining lines are skipped up to `</doc>`.
    failed: bool,
}

enum Line<'a> {
    Blank,
    Open(&'a str),
    Close,
    OtherTag,
    Token(&'a str),
    Stray,
}

fn classify(line: &str) -> Line<'_> {
    if line.contains('\t') {
        return Line::Token(line);
    }
    let t = line.trim();
    if t.is_empty() {
        Line::Blank
    } else if t == "</doc>" {
        Line::Close
    } else if let Some(rest) = t.strip_prefix("<doc") {
        if rest.starts_with(|c: char| c.is_whitespace() || c == '>') {
            Line::Open(t)
        } else {
            Line::OtherTag
        }
    } else if t.starts_with('<') && t.ends_with('>') {
        Line::OtherTag
    } else {
        Line::Stray
    }
}

fn parse_lines<I>(lines: I, opts: &ParseOptions) -> Result<ParseOutcome, ParseError>
where
    I: Iterator<Item = Result<String, String>>,
{
    let lenient = opts.mode == ParseMode::Lenient;
    let mut docs: Vec<Document> = Vec::new();
    let mut ids: HashSet<String> = HashSet::new();
    let mut rejects = Vec::new();
    let mut open: Option<OpenDoc> = None;
    let mut last_line = 0;

    // Records the error in lenient mode, returns it in strict mode.
    let fail = |err: ParseError, rejects: &mut Vec<Reject>| -> Result<(), ParseError> {
        if lenient {
            rejects.push(Reject::from(&err));
            Ok(())
        } else {
            Err(err)
        }
    };

    for (idx, raw) in lines.enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let raw = raw.map_err(|e| ParseError { line: line_no, doc_id: None, kind: ParseErrorKind::Io(e) })?;
        let mut line = raw.strip_suffix('\r').unwrap_or(&raw);
        if idx == 0 {
            line = line.strip_prefix('\u{feff}').unwrap_or(line);
        }

        match classify(line) {
            Line::Blank | Line::OtherTag => {}
            Line::Open(tag) => {
                if let Some(prev) = open.take() {
                    if !prev.failed {
                        fail(
                            ParseError {
                                line: line_no,
                                doc_id: Some(prev.id),
                                kind: ParseErrorKind::Unterminated("the next document header"),
                            },
                            &mut rejects,
                        )?;
                    }
                }
                match parse_header(tag, opts.era) {
                    Ok(h) => {
                        open = Some(OpenDoc {
                            header_line: line_no,
                            id: h.id,
                            date: h.date,
                            collection: h.collection,
                            region: h.region,
                            tokens: Vec::new(),
                            failed: false,
                        })
                    }
                    Err((id, kind)) => {
                        fail(ParseError { line: line_no, doc_id: id.clone(), kind }, &mut rejects)?;
                        open = Some(OpenDoc {
                            header_line: line_no,
                            id: id.unwrap_or_default(),
                            date: DateSpec::Undated,
                            collection: String::new(),
                            region: None,
                            tokens: Vec::new(),
                            failed: true,
                        });
                    }
                }
            }
            Line::Close => match open.take() {
                None => fail(
                    ParseError { line: line_no, doc_id: None, kind: ParseErrorKind::UnexpectedClose },
                    &mut rejects,
                )?,
                Some(doc) if doc.failed => {}
                Some(doc) => {
                    let kind = if doc.tokens.is_empty() {
                        Some(ParseErrorKind::EmptyDocument)
                    } else if ids.contains(&doc.id) {
                        Some(ParseErrorKind::DuplicateId)
                    } else {
                        None
                    };
                    match kind {
                        Some(kind) => fail(
                            ParseError { line: doc.header_line, doc_id: Some(doc.id), kind },
                            &mut rejects,
                        )?,
                        None => {
                            ids.insert(doc.id.clone());
                            docs.push(Document {
                                id: doc.id,
                                date: doc.date,
                                collection: doc.collection,
                                region: doc.region,
                                tokens: doc.tokens,
                            });
                        }
                    }
                }
            },
            Line::Token(text) => match open.as_mut() {
                None => fail(
                    ParseError { line: line_no, doc_id: None, kind: ParseErrorKind::OutsideDocument },
                    &mut rejects,
                )?,
                Some(doc) if doc.failed => {}
                Some(doc) => match parse_token(text) {
                    Ok(tok) => doc.tokens.push(tok),
                    Err(kind) => {
                        doc.failed = true;
                        fail(ParseError { line: line_no, doc_id: Some(doc.id.clone()), kind }, &mut rejects)?;
                    }
                },
            },
            Line::Stray => match open.as_mut() {
                None => fail(
                    ParseError { line: line_no, doc_id: None, kind: ParseErrorKind::OutsideDocument },
                    &mut rejects,
                )?,
                Some(doc) if doc.failed => {}
                Some(doc) => {
                    doc.failed = true;
                    fail(
                        ParseError {
                            line: line_no,
                            doc_id: Some(doc.id.clone()),
                            kind: ParseErrorKind::MalformedToken("expected surface<TAB>lemma".into()),
                        },
                        &mut rejects,
                    )?;
                }
            },
        }
    }

    if let Some(doc) = open {
        if !doc.failed {
            fail(
                ParseError {
                    line: last_line,
                    doc_id: Some(doc.id),
                    kind: ParseErrorKind::Unterminated("end of input"),
                },
                &mut rejects,
            )?;
        }
    }

    let corpus = Corpus::new(docs).map_err(|e| {
        // Unreachable in practice: ids and emptiness are checked at each close tag.
        let (doc_id, kind) = match e {
            CorpusError::DuplicateId(id) => (id, ParseErrorKind::DuplicateId),
            CorpusError::EmptyDocument(id) => (id, ParseErrorKind::EmptyDocument),
        };
        ParseError { line: last_line, doc_id: Some(doc_id), kind }
    })?;
    Ok(ParseOutcome { corpus, rejects })
}

fn parse_token(line: &str) -> Result<Token, ParseErrorKind> {
    let mut fields = line.split('\t');
    let surface = fields.next().unwrap_or("");
    let lemma = fields.next().ok_or_else(|| ParseErrorKind::MalformedToken("missing lemma".into()))?;
    let pos = fields.next();
    if fields.next().is_some() {
        return Err(ParseErrorKind::MalformedToken("more than three columns".into()));
    }
    Ok(Token::new(surface, lemma, pos)?)
}

struct Header {
    id: String,
    date: DateSpec,
    collection: String,
    region: Option<String>,
}

/// Parses `<doc k="v" ...>`. On failure returns whatever id could be recovered.
fn parse_header(tag: &str, era: EraBounds) -> Result<Header, (Option<String>, ParseErrorKind)> {
    let attrs = parse_attributes(tag).map_err(|m| (None, ParseErrorKind::MalformedHeader(m)))?;
    let get = |name: &str| attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.clone());
    let id = get("id");
    let bad = |m: &str| (id.clone(), ParseErrorKind::MalformedHeader(m.to_string()));

    let Some(doc_id) = id.clone().filter(|s| !s.is_empty()) else {
        return Err(bad("missing or empty id"));
    };
    let year = |name: &str| -> Result<Option<i32>, (Option<String>, ParseErrorKind)> {
        match get(name) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse::<i32>()
                .map(Some)
                .map_err(|_| bad(&format!("{name}={v:?} is not a year"))),
        }
    };
    let date = match (year("date")?, year("date_min")?, year("date_max")?) {
        (None, None, None) => DateSpec::Undated,
        (Some(y), None, None) => DateSpec::exact(y, era).map_err(|e| (id.clone(), e.into()))?,
        (None, Some(lo), Some(hi)) if lo == hi => {
            DateSpec::exact(lo, era).map_err(|e| (id.clone(), e.into()))?
        }
        (None, Some(lo), Some(hi)) => DateSpec::interval(lo, hi, era).map_err(|e| (id.clone(), e.into()))?,
        (Some(_), _, _) => return Err(bad("date cannot be combined with date_min/date_max")),
        _ => return Err(bad("date_min and date_max must be given together")),
    };
    Ok(Header { id: doc_id, date, collection: get("collection").unwrap_or_default(), region: get("region") })
}

fn parse_attributes(tag: &str) -> Result<Vec<(String, String)>, String> {
    let body = tag.strip_prefix("<doc").ok_or("header must start with <doc")?;
    let mut rest = body;
    let mut attrs: Vec<(String, String)> = Vec::new();
    loop {
        rest = rest.trim_start();
        if let Some(after) = rest.strip_prefix('>') {
            if !after.trim().is_empty() {
                return Err("text after closing '>'".into());
            }
            return Ok(attrs);
        }
        if rest.is_empty() {
            return Err("missing closing '>'".into());
        }
        let name_len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(rest.len());
        if name_len == 0 {
            return Err(format!("unexpected character {:?}", rest.chars().next().unwrap_or(' ')));
        }
        let name = &rest[..name_len];
        rest = rest[name_len..].trim_start();
        rest = rest.strip_prefix('=').ok_or_else(|| format!("attribute {name} has no value"))?;
        rest = rest.trim_start();
        rest = rest.strip_prefix('"').ok_or_else(|| format!("value of {name} must be double-quoted"))?;
        let end = rest.find('"').ok_or_else(|| format!("unterminated value for {name}"))?;
        let value = unescape(&rest[..end])?;
        rest = &rest[end + 1..];
        if !(rest.is_empty() || rest.starts_with(|c: char| c.is_whitespace() || c == '>')) {
            return Err(format!("missing space after attribute {name}"));
        }
        if attrs.iter().any(|(k, _)| k == name) {
            return Err(format!("attribute {name} given twice"));
        }
        attrs.push((name.to_string(), value));
    }
}

fn unescape(raw: &str) -> Result<String, String> {
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let semi = tail.find(';').ok_or("bare '&' in attribute value")?;
        let entity = &tail[1..semi];
        let ch = match entity {
            "quot" => '"',
            "amp" => '&',
            "lt" => '<',
            "gt" => '>',
            "apos" => '\'',
            _ => {
                let code = if let Some(hex) = entity.strip_prefix("#x").or_else(|| entity.strip_prefix("#X")) {
                    u32::from_str_radix(hex, 16).ok()
                } else if let Some(dec) = entity.strip_prefix('#') {
                    dec.parse::<u32>().ok()
                } else {
                    None
                };
                code.and_then(char::from_u32).ok_or_else(|| format!("unknown entity &{entity};"))?
            }
        };
        out.push(ch);
        rest = &tail[semi + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn escape_into(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
}

fn write_attr(out: &mut String, name: &str, value: &str) {
    out.push(' ');
    out.push_str(name);
    out.push_str("=\"");
    escape_into(out, value);
    out.push('"');
}

pub fn serialize_vertical(corpus: &Corpus) -> String {
    serialize_documents(corpus.documents())
}

pub(crate) fn serialize_documents(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str("<doc");
        write_attr(&mut out, "id", &doc.id);
        match doc.date {
            DateSpec::Exact { year } => write_attr(&mut out, "date", &year.to_string()),
            DateSpec::Interval { min, max } => {
                write_attr(&mut out, "date_min", &min.to_string());
                write_attr(&mut out, "date_max", &max.to_string());
            }
            DateSpec::Undated => {}
        }
        if !doc.collection.is_empty() {
            write_attr(&mut out, "collection", &doc.collection);
        }
        if let Some(region) = &doc.region {
            write_attr(&mut out, "region", region);
        }
        out.push_str(">\n");
        for t in &doc.tokens {
            let _ = match &t.pos {
                Some(pos) => writeln!(out, "{}\t{}\t{}", t.surface, t.lemma, pos),
                None => writeln!(out, "{}\t{}", t.surface, t.lemma),
            };
        }
        out.push_str("</doc>\n");
    }
    out
}
