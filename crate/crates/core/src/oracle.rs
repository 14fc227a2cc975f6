//! Language-model oracle: prompt templates, response parsing and the
//! query-until-consistent loop.
//!
//! Backends sit behind [`LanguageModel`]. This crate ships the two offline
//! ones ([`StaticBackend`], [`ReplayBackend`]); the HTTP client lives in the
//! `grop` crate.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relations::{ConsistencyVerdict, Relation, RelationError, RelationKind, RelationSet};

/// Format constraint appended to the symbolic prompt by default.
pub const DEFAULT_NOTES: &str =
    "The answer cannot include other objects. Each action should be on a separate line starting with 'Place'";

/// (subject, kind, anchor) of a distance-bearing relation.
pub type RelationKey = (String, RelationKind, String);

pub fn relation_key(r: &Relation) -> Option<RelationKey> {
    Some((r.subject.clone(), r.kind, r.anchor.clone()?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicQuery {
    pub objects: Vec<String>,
    #[serde(default)]
    pub examples: Option<String>,
    #[serde(default)]
    pub notes: Option<String>,
}

impl SymbolicQuery {
    /// Zero-shot query with the default format notes.
    pub fn new(objects: Vec<String>) -> Result<Self, OracleError> {
        if objects.is_empty() {
            return Err(OracleError::NoObjects);
        }
        Ok(Self { objects, examples: None, notes: Some(DEFAULT_NOTES.into()) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceQuery {
    pub subject: String,
    pub kind: RelationKind,
    pub anchor: String,
}

impl DistanceQuery {
    /// Only offsetting relations have a distance; stacking and centring do not.
    pub fn new(subject: &str, kind: RelationKind, anchor: &str) -> Result<Self, OracleError> {
        if kind.direction().is_none() {
            return Err(OracleError::NoDistanceFor(kind));
        }
        Ok(Self { subject: subject.into(), kind, anchor: anchor.into() })
    }
}

/// Recommended centre-to-centre distance in centimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceAnswer {
    pub low: f64,
    pub high: f64,
}

impl DistanceAnswer {
    pub fn new(low: f64, high: f64) -> Result<Self, OracleError> {
        let (low, high) = if low <= high { (low, high) } else { (high, low) };
        if !(low > 0.0) || !high.is_finite() {
            return Err(OracleError::NoParse("distance must be positive".into()));
        }
        Ok(Self { low, high })
    }

    pub fn midpoint(&self) -> f64 {
        (self.low + self.high) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Static,
    Replay,
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub backend: BackendKind,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    /// Completion budget in tokens.
    pub max_length: u32,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
    pub max_retry: u32,
    pub timeout_secs: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Static,
            model: "text-davinci-003".into(),
            temperature: 0.1,
            top_p: 1.0,
            max_length: 512,
            frequency_penalty: 0.0,
            presence_penalty: 0.0,
            max_retry: 5,
            timeout_secs: 30.0,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.max_retry < 1 {
            return Err(OracleError::InvalidConfig("max_retry must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("query needs at least one object")]
    NoObjects,
    #[error("relation kind {0:?} carries no distance")]
    NoDistanceFor(RelationKind),
    #[error("could not parse response: {0}")]
    NoParse(String),
    #[error("response mentions unknown object {0:?}")]
    UnknownObject(String),
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no consistent answer after {} attempts", .0.len())]
    ExhaustedRetries(Vec<Attempt>),
    #[error("backend: {0}")]
    Backend(String),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

fn article(name: &str) -> &'static str {
    match name.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

fn with_article(name: &str) -> String {
    format!("{} {}", article(name), name)
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn sentence(s: &str) -> &str {
    s.trim().trim_end_matches('.')
}

/// Symbolic-relation prompt. The examples sentence is dropped when absent
/// (zero-shot), as are the notes.
pub fn render_template1(q: &SymbolicQuery) -> String {
    let relations: Vec<&str> = RelationKind::ALL.iter().map(|k| k.phrase()).collect();
    let objects: Vec<String> = q.objects.iter().map(|o| with_article(o)).collect();
    let mut out = format!(
        "The goal is to set a dining table with objects. The symbolic spatial relationship between objects includes {}.",
        relations.join(", ")
    );
    if let Some(ex) = q.examples.as_deref().map(sentence).filter(|e| !e.is_empty()) {
        out.push(' ');
        out.push_str(ex);
        out.push('.');
    }
    out.push_str(&format!(" What is a typical way of positioning {} on a table?", objects.join(", ")));
    if let Some(notes) = q.notes.as_deref().map(sentence).filter(|n| !n.is_empty()) {
        out.push(' ');
        out.push_str(notes);
        out.push('.');
    }
    out
}

/// Distance prompt for one relation.
pub fn render_template2(q: &DistanceQuery) -> String {
    let phrase = q.kind.phrase();
    format!(
        "{} is placed {} {}. How many centimeters {} the {} should the {} be placed?",
        capitalize(&with_article(&q.subject)),
        phrase,
        with_article(&q.anchor),
        phrase,
        q.anchor,
        q.subject
    )
}

/// Relations parsed from a `Place`-line response.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaceLines {
    pub relations: RelationSet,
    /// Non-empty lines that did not parse, verbatim.
    pub unmatched: Vec<String>,
}

const CENTER_SUFFIXES: [&str; 4] =
    ["in the center of table", "in the center of the table", "in the centre of table", "in the centre of the table"];

fn strip_list_marker(line: &str) -> &str {
    let t = line.trim_start();
    let digits = t.bytes().take_while(u8::is_ascii_digit).count();
    let t = if digits > 0 && t[digits..].starts_with(['.', ')']) { &t[digits + 1..] } else { t };
    t.trim_start_matches(['-', '*', '•']).trim()
}

fn strip_article(s: &str) -> &str {
    let s = s.trim();
    for a in ["the ", "an ", "a "] {
        if let Some(rest) = s.strip_prefix(a) {
            return rest.trim();
        }
    }
    s
}

/// Subject, kind and anchor text of one `Place` line, names lowercased and
/// stripped of articles.
fn split_line(line: &str) -> Option<(String, RelationKind, Option<String>)> {
    let body = strip_list_marker(line).trim_end_matches(['.', ',', ';', '!', ' ']);
    let lower = body.to_lowercase();
    let rest = lower.strip_prefix("place ")?.trim();
    for suffix in CENTER_SUFFIXES {
        if let Some(subject) = rest.strip_suffix(suffix) {
            let subject = strip_article(subject);
            return (!subject.is_empty()).then(|| (subject.to_string(), RelationKind::CenterOfTable, None));
        }
    }
    let mut kinds: Vec<RelationKind> = RelationKind::ALL.iter().copied().filter(|k| k.needs_anchor()).collect();
    kinds.sort_by_key(|k| core::cmp::Reverse(k.phrase().len()));
    let padded = format!(" {rest} ");
    for kind in kinds {
        let needle = format!(" {} ", kind.phrase());
        if let Some(pos) = padded.find(&needle) {
            let subject = strip_article(&padded[..pos]);
            let anchor = strip_article(&padded[pos + needle.len()..]);
            if subject.is_empty() || anchor.is_empty() {
                return None;
            }
            return Some((subject.to_string(), kind, Some(anchor.to_string())));
        }
    }
    None
}

fn resolve<'a>(name: &str, objects: &'a [String]) -> Result<&'a str, OracleError> {
    objects
        .iter()
        .find(|o| o.to_lowercase() == name)
        .map(String::as_str)
        .ok_or_else(|| OracleError::UnknownObject(name.to_string()))
}

fn parse_line(line: &str, objects: &[String]) -> Result<Option<Relation>, OracleError> {
    let Some((subject, kind, anchor)) = split_line(line) else { return Ok(None) };
    let subject = resolve(&subject, objects)?;
    Ok(Some(match anchor {
        None => Relation::center(subject),
        Some(a) => Relation::new(subject, kind, resolve(&a, objects)?),
    }))
}

/// Object names mentioned by `Place` lines, in order of first appearance.
pub fn infer_objects(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for (subject, _, anchor) in text.lines().filter_map(split_line) {
        for name in core::iter::once(subject).chain(anchor) {
            if !out.contains(&name) {
                out.push(name);
            }
        }
    }
    out
}

/// Parses `Place <object> <relation> <anchor>` and
/// `Place <object> in the center of table` lines. Case-insensitive, list
/// numbering and trailing punctuation ignored. Names must come from
/// `objects`.
pub fn parse_place_lines(text: &str, objects: &[String]) -> Result<PlaceLines, OracleError> {
    let mut relations = Vec::new();
    let mut unmatched = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match parse_line(line, objects)? {
            Some(r) if !relations.contains(&r) => relations.push(r),
            Some(_) => {}
            None => unmatched.push(line.trim().to_string()),
        }
    }
    if relations.is_empty() {
        return Err(OracleError::NoParse("no Place lines".into()));
    }
    let relations = RelationSet::with_objects(objects.iter().cloned(), relations)?;
    Ok(PlaceLines { relations, unmatched })
}

fn number_at(s: &[u8], mut i: usize) -> Option<(f64, usize)> {
    let start = i;
    while i < s.len() && s[i].is_ascii_digit() {
        i += 1;
    }
    if i == start {
        return None;
    }
    if i + 1 < s.len() && s[i] == b'.' && s[i + 1].is_ascii_digit() {
        i += 1;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
    }
    let text = core::str::from_utf8(&s[start..i]).ok()?;
    Some((text.parse().ok()?, i))
}

fn skip_spaces(s: &[u8], mut i: usize) -> usize {
    while i < s.len() && s[i] == b' ' {
        i += 1;
    }
    i
}

fn range_separator(s: &[u8], i: usize) -> Option<usize> {
    for sep in ["-", "\u{2013}", "to ", "and "] {
        if s[i..].starts_with(sep.as_bytes()) {
            return Some(i + sep.len());
        }
    }
    None
}

fn unit_at(s: &[u8], i: usize) -> bool {
    for unit in ["centimet", "cm"] {
        if s[i..].starts_with(unit.as_bytes()) {
            let end = i + unit.len();
            return unit.len() > 2 || end == s.len() || !s[end].is_ascii_alphabetic();
        }
    }
    false
}

/// Extracts the first "a-b centimeters" range or single "a centimeters"
/// value.
pub fn parse_distance(text: &str) -> Result<DistanceAnswer, OracleError> {
    let lower = text.to_lowercase();
    let s = lower.as_bytes();
    for i in 0..s.len() {
        let fresh = i == 0 || !(s[i - 1].is_ascii_digit() || s[i - 1] == b'.');
        if !fresh {
            continue;
        }
        let Some((low, end)) = number_at(s, i) else { continue };
        let mut j = skip_spaces(s, end);
        let mut high = low;
        if let Some(k) = range_separator(s, j) {
            if let Some((h, e)) = number_at(s, skip_spaces(s, k)) {
                high = h;
                j = skip_spaces(s, e);
            }
        }
        if unit_at(s, j) {
            return DistanceAnswer::new(low, high);
        }
    }
    Err(OracleError::NoParse("no centimeter quantity".into()))
}

/// A query handed to a backend: the structured form plus its rendered text.
#[derive(Debug, Clone, Copy)]
pub enum Query<'a> {
    Symbolic(&'a SymbolicQuery),
    Distance(&'a DistanceQuery),
}

pub trait LanguageModel {
    fn complete(&mut self, query: Query<'_>, prompt: &str) -> Result<String, OracleError>;
}

impl<T: LanguageModel + ?Sized> LanguageModel for Box<T> {
    fn complete(&mut self, query: Query<'_>, prompt: &str) -> Result<String, OracleError> {
        (**self).complete(query, prompt)
    }
}

impl<T: LanguageModel + ?Sized> LanguageModel for &mut T {
    fn complete(&mut self, query: Query<'_>, prompt: &str) -> Result<String, OracleError> {
        (**self).complete(query, prompt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticArrangement {
    pub objects: Vec<String>,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticDistance {
    pub subject: String,
    pub kind: RelationKind,
    pub anchor: String,
    pub low: f64,
    pub high: f64,
}

/// Curated answers for the offline backend. Configuration, not ground truth.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StaticTable {
    pub arrangements: Vec<StaticArrangement>,
    pub distances: Vec<StaticDistance>,
}

fn name_set(names: &[String]) -> BTreeSet<String> {
    names.iter().map(|n| n.to_lowercase()).collect()
}

impl StaticTable {
    pub fn arrangement(&self, objects: &[String]) -> Option<&StaticArrangement> {
        let want = name_set(objects);
        self.arrangements.iter().find(|a| name_set(&a.objects) == want)
    }

    pub fn distance(&self, q: &DistanceQuery) -> Option<&StaticDistance> {
        self.distances.iter().find(|d| {
            d.kind == q.kind && d.subject.eq_ignore_ascii_case(&q.subject) && d.anchor.eq_ignore_ascii_case(&q.anchor)
        })
    }
}

/// Answers from a [`StaticTable`], in the same text form a live model uses.
#[derive(Debug, Clone)]
pub struct StaticBackend {
    table: StaticTable,
}

impl StaticBackend {
    pub fn new(table: StaticTable) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &StaticTable {
        &self.table
    }
}

impl LanguageModel for StaticBackend {
    fn complete(&mut self, query: Query<'_>, _prompt: &str) -> Result<String, OracleError> {
        match query {
            Query::Symbolic(q) => self
                .table
                .arrangement(&q.objects)
                .map(|a| a.lines.join("\n"))
                .ok_or_else(|| OracleError::Backend(format!("no static arrangement for {:?}", q.objects))),
            Query::Distance(q) => {
                let d = self.table.distance(q).ok_or_else(|| {
                    OracleError::Backend(format!("no static distance for {} {} {}", q.subject, q.kind, q.anchor))
                })?;
                Ok(format!(
                    "Generally, the {} should be placed about {}-{} centimeters {} the {}.",
                    q.subject,
                    d.low,
                    d.high,
                    q.kind.phrase(),
                    q.anchor
                ))
            }
        }
    }
}

/// Replays recorded responses in order, ignoring the prompt.
#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    responses: Vec<String>,
    next: usize,
}

impl ReplayBackend {
    pub fn new(responses: Vec<String>) -> Self {
        Self { responses, next: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.responses.len() - self.next
    }
}

impl LanguageModel for ReplayBackend {
    fn complete(&mut self, _query: Query<'_>, _prompt: &str) -> Result<String, OracleError> {
        let r = self
            .responses
            .get(self.next)
            .cloned()
            .ok_or_else(|| OracleError::Backend("replay fixture exhausted".into()))?;
        self.next += 1;
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttemptOutcome {
    Accepted,
    Inconsistent(String),
    Unparseable(String),
    MissingObject(String),
    BackendFailure(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub response: String,
    pub outcome: AttemptOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub relations: RelationSet,
    pub attempts: Vec<Attempt>,
}

/// Queries the symbolic template until a parseable, consistent answer that
/// positions every object comes back, at most `max_retry` times.
pub fn generate_consistent_relations<M, C>(
    objects: &[String],
    max_retry: u32,
    model: &mut M,
    checker: C,
) -> Result<Generated, OracleError>
where
    M: LanguageModel + ?Sized,
    C: Fn(&RelationSet) -> Result<ConsistencyVerdict, RelationError>,
{
    if max_retry < 1 {
        return Err(OracleError::InvalidConfig("max_retry must be at least 1"));
    }
    let query = SymbolicQuery::new(objects.to_vec())?;
    let prompt = render_template1(&query);
    let mut attempts = Vec::new();
    for _ in 0..max_retry {
        let response = match model.complete(Query::Symbolic(&query), &prompt) {
            Ok(r) => r,
            Err(e) => {
                attempts
                    .push(Attempt { response: String::new(), outcome: AttemptOutcome::BackendFailure(e.to_string()) });
                continue;
            }
        };
        let outcome = match parse_place_lines(&response, objects) {
            Err(e) => AttemptOutcome::Unparseable(e.to_string()),
            Ok(parsed) => {
                let rs = parsed.relations;
                let missing = objects.iter().find(|o| !rs.relations.iter().any(|r| &r.subject == *o));
                match (missing, checker(&rs)) {
                    (_, Err(e)) => AttemptOutcome::Unparseable(e.to_string()),
                    (_, Ok(v)) if !v.is_consistent() => {
                        AttemptOutcome::Inconsistent(v.conflict().map(|c| c.explain(&rs)).unwrap_or_default())
                    }
                    (Some(m), Ok(_)) => AttemptOutcome::MissingObject(m.clone()),
                    (None, Ok(_)) => {
                        attempts.push(Attempt { response, outcome: AttemptOutcome::Accepted });
                        return Ok(Generated { relations: rs, attempts });
                    }
                }
            }
        };
        attempts.push(Attempt { response, outcome });
    }
    Err(OracleError::ExhaustedRetries(attempts))
}

/// Asks for the distance of every offsetting relation. Unparseable answers
/// are re-asked up to `max_retry` times.
pub fn query_distances<M: LanguageModel + ?Sized>(
    rs: &RelationSet,
    max_retry: u32,
    model: &mut M,
) -> Result<BTreeMap<RelationKey, DistanceAnswer>, OracleError> {
    let mut out = BTreeMap::new();
    for r in &rs.relations {
        let Some(anchor) = r.anchor() else { continue };
        if r.kind.direction().is_none() {
            continue;
        }
        let q = DistanceQuery::new(&r.subject, r.kind, anchor)?;
        let prompt = render_template2(&q);
        let mut last = OracleError::NoParse("no attempts".into());
        let mut answer = None;
        for _ in 0..max_retry.max(1) {
            match model.complete(Query::Distance(&q), &prompt).and_then(|t| parse_distance(&t)) {
                Ok(a) => {
                    answer = Some(a);
                    break;
                }
                Err(e) => last = e,
            }
        }
        let a = answer.ok_or(last)?;
        out.insert((q.subject, q.kind, q.anchor), a);
    }
    Ok(out)
}
