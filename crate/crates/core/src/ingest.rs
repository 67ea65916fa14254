//! Dump parsing, windowing, and corpus construction.
//!
//! Ingestion runs in two passes: posts first, then comments against the post
//! index. Each pass is shardable; shard states merge associatively so the
//! final corpus is independent of shard boundaries and input order.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::record::{
    AnalysisWindow, CommentRecord, PostRecord, COMMENT_PREFIX, DELETED_AUTHOR, POST_PREFIX,
    REMOVED_BODY,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed json: {0}")]
    MalformedJson(String),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("field `{field}` has bad prefix: `{value}`")]
    BadPrefix { field: &'static str, value: String },
}

fn as_object(line: &str) -> Result<serde_json::Map<String, Value>, ParseError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| ParseError::MalformedJson(e.to_string()))?;
    match value {
        Value::Object(map) => Ok(map),
        other => Err(ParseError::MalformedJson(format!("expected object, got {other}"))),
    }
}

fn field_str<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Option<&'a str> {
    obj.get(key).and_then(Value::as_str)
}

// Dumps are inconsistent about timestamps: integer, float, or numeric string.
fn field_seconds(obj: &serde_json::Map<String, Value>, key: &str) -> Option<u64> {
    match obj.get(key)? {
        Value::Number(n) => n
            .as_u64()
            .or_else(|| n.as_f64().filter(|f| *f >= 0.0).map(|f| f as u64)),
        Value::String(s) => s
            .parse::<u64>()
            .ok()
            .or_else(|| s.parse::<f64>().ok().filter(|f| *f >= 0.0).map(|f| f as u64)),
        _ => None,
    }
}

fn field_i64(obj: &serde_json::Map<String, Value>, key: &str, default: i64) -> i64 {
    match obj.get(key) {
        Some(Value::Number(n)) => n.as_i64().unwrap_or(default),
        Some(Value::String(s)) => s.parse().unwrap_or(default),
        _ => default,
    }
}

fn field_u64(obj: &serde_json::Map<String, Value>, key: &str, default: u64) -> u64 {
    match obj.get(key) {
        Some(Value::Number(n)) => n.as_u64().unwrap_or(default),
        Some(Value::String(s)) => s.parse().unwrap_or(default),
        _ => default,
    }
}

fn author_or_deleted(obj: &serde_json::Map<String, Value>) -> String {
    match field_str(obj, "author") {
        Some(a) if !a.is_empty() => a.to_string(),
        _ => DELETED_AUTHOR.to_string(),
    }
}

/// Parse one post row. Unknown keys are ignored; a missing author becomes the
/// deleted marker.
pub fn parse_post_line(line: &str) -> Result<PostRecord, ParseError> {
    let obj = as_object(line)?;
    let name = field_str(&obj, "name").ok_or(ParseError::MissingField("name"))?;
    if !name.starts_with(POST_PREFIX) {
        return Err(ParseError::BadPrefix { field: "name", value: name.to_string() });
    }
    let created_utc = field_seconds(&obj, "created_utc")
        .filter(|&t| t > 0)
        .ok_or(ParseError::MissingField("created_utc"))?;
    Ok(PostRecord {
        name: name.to_string(),
        author: author_or_deleted(&obj),
        created_utc,
        num_comments: field_u64(&obj, "num_comments", 0),
        subreddit: field_str(&obj, "subreddit").unwrap_or("").to_string(),
        // Score defaults to 1, the platform's self-vote baseline.
        score: field_i64(&obj, "score", 1),
        title: field_str(&obj, "title").unwrap_or("").to_string(),
        selftext: field_str(&obj, "selftext").unwrap_or("").to_string(),
    })
}

/// Parse one comment row; `link_id` and `parent_id` prefixes are validated.
pub fn parse_comment_line(line: &str) -> Result<CommentRecord, ParseError> {
    let obj = as_object(line)?;
    let name = field_str(&obj, "name").ok_or(ParseError::MissingField("name"))?;
    if !name.starts_with(COMMENT_PREFIX) {
        return Err(ParseError::BadPrefix { field: "name", value: name.to_string() });
    }
    let created_utc = field_seconds(&obj, "created_utc")
        .filter(|&t| t > 0)
        .ok_or(ParseError::MissingField("created_utc"))?;
    let link_id = field_str(&obj, "link_id").ok_or(ParseError::MissingField("link_id"))?;
    if !link_id.starts_with(POST_PREFIX) {
        return Err(ParseError::BadPrefix { field: "link_id", value: link_id.to_string() });
    }
    // A missing parent_id means a top-level reply to the post itself.
    let parent_id = field_str(&obj, "parent_id").unwrap_or(link_id);
    if !parent_id.starts_with(COMMENT_PREFIX) && !parent_id.starts_with(POST_PREFIX) {
        return Err(ParseError::BadPrefix { field: "parent_id", value: parent_id.to_string() });
    }
    Ok(CommentRecord {
        name: name.to_string(),
        author: author_or_deleted(&obj),
        created_utc,
        link_id: link_id.to_string(),
        parent_id: parent_id.to_string(),
        body: field_str(&obj, "body").unwrap_or("").to_string(),
        subreddit: field_str(&obj, "subreddit").unwrap_or("").to_string(),
        score: field_i64(&obj, "score", 1),
    })
}

/// Shardable post-ingestion state: in-window records plus the ids of posts
/// seen outside the window (needed to classify their comments later).
#[derive(Debug, Clone)]
pub struct PostIndex {
    window: AnalysisWindow,
    pub in_window: HashMap<String, PostRecord>,
    pub out_of_window: HashSet<String>,
    pub duplicates: u64,
    pub malformed_lines: u64,
}

impl PostIndex {
    pub fn new(window: AnalysisWindow) -> Self {
        Self {
            window,
            in_window: HashMap::new(),
            out_of_window: HashSet::new(),
            duplicates: 0,
            malformed_lines: 0,
        }
    }

    pub fn add_record(&mut self, rec: PostRecord) {
        if self.window.contains(rec.created_utc) {
            if self.in_window.contains_key(&rec.name) || self.out_of_window.contains(&rec.name) {
                self.duplicates += 1;
            } else {
                self.in_window.insert(rec.name.clone(), rec);
            }
        } else if self.in_window.contains_key(&rec.name) || !self.out_of_window.insert(rec.name) {
            self.duplicates += 1;
        }
    }

    pub fn add_line(&mut self, line: &str) {
        if line.trim().is_empty() {
            return;
        }
        match parse_post_line(line) {
            Ok(rec) => self.add_record(rec),
            Err(_) => self.malformed_lines += 1,
        }
    }

    pub fn merge(&mut self, other: PostIndex) {
        debug_assert_eq!(self.window, other.window);
        for (id, rec) in other.in_window {
            if self.in_window.contains_key(&id) || self.out_of_window.contains(&id) {
                self.duplicates += 1;
            } else {
                self.in_window.insert(id, rec);
            }
        }
        for id in other.out_of_window {
            if self.in_window.contains_key(&id) || !self.out_of_window.insert(id) {
                self.duplicates += 1;
            }
        }
        self.duplicates += other.duplicates;
        self.malformed_lines += other.malformed_lines;
    }
}

// Disposition of one in-window comment relative to the post index.
#[derive(Debug, Clone)]
enum CommentSlot {
    Retained(CommentRecord),
    OnOutOfWindowPost,
    OnUnknownPost(String),
}

/// Shardable comment-ingestion state.
#[derive(Debug, Clone)]
pub struct CommentState {
    window: AnalysisWindow,
    slots: HashMap<String, CommentSlot>,
    pub out_of_window_comments: u64,
    pub duplicates: u64,
    pub malformed_lines: u64,
}

impl CommentState {
    pub fn new(window: AnalysisWindow) -> Self {
        Self {
            window,
            slots: HashMap::new(),
            out_of_window_comments: 0,
            duplicates: 0,
            malformed_lines: 0,
        }
    }

    pub fn add_record(&mut self, rec: CommentRecord, posts: &PostIndex) {
        if !self.window.contains(rec.created_utc) {
            self.out_of_window_comments += 1;
            return;
        }
        if self.slots.contains_key(&rec.name) {
            self.duplicates += 1;
            return;
        }
        let key = rec.name.clone();
        let slot = if posts.in_window.contains_key(&rec.link_id) {
            CommentSlot::Retained(rec)
        } else if posts.out_of_window.contains(&rec.link_id) {
            CommentSlot::OnOutOfWindowPost
        } else {
            CommentSlot::OnUnknownPost(rec.link_id)
        };
        self.slots.insert(key, slot);
    }

    pub fn add_line(&mut self, line: &str, posts: &PostIndex) {
        if line.trim().is_empty() {
            return;
        }
        match parse_comment_line(line) {
            Ok(rec) => self.add_record(rec, posts),
            Err(_) => self.malformed_lines += 1,
        }
    }

    pub fn merge(&mut self, other: CommentState) {
        debug_assert_eq!(self.window, other.window);
        for (id, slot) in other.slots {
            match self.slots.entry(id) {
                std::collections::hash_map::Entry::Occupied(_) => self.duplicates += 1,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(slot);
                }
            }
        }
        self.out_of_window_comments += other.out_of_window_comments;
        self.duplicates += other.duplicates;
        self.malformed_lines += other.malformed_lines;
    }
}

/// Ingestion bookkeeping that is not part of the corpus proper.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestDiagnostics {
    pub n_comments_in_window: u64,
    pub comments_on_out_of_window_posts: u64,
    pub comments_on_unknown_posts: u64,
    pub out_of_window_posts: u64,
    pub out_of_window_comments: u64,
    pub duplicate_posts: u64,
    pub duplicate_comments: u64,
    pub malformed_post_lines: u64,
    pub malformed_comment_lines: u64,
}

/// The windowed, linked collection of posts and their in-window comments.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub window: AnalysisWindow,
    pub posts: HashMap<String, PostRecord>,
    /// Comments retained: in-window and linked to a retained post.
    pub comments: HashMap<String, CommentRecord>,
    /// Retained comments whose parent_id resolves to no known record.
    pub orphan_comments: BTreeSet<String>,
    /// Distinct post ids referenced by comments but absent from the dump.
    pub disconnected_post_count: u64,
    /// Retained comments whose body carries the moderator-removal marker.
    pub removed_comment_count: u64,
    pub diag: IngestDiagnostics,
}

impl Corpus {
    /// Retained comments grouped per post, each group sorted by
    /// `(created_utc, name)`. The grouping every analysis runs from.
    pub fn comments_by_post(&self) -> HashMap<&str, Vec<&CommentRecord>> {
        let mut by_post: HashMap<&str, Vec<&CommentRecord>> = HashMap::new();
        for c in self.comments.values() {
            by_post.entry(c.link_id.as_str()).or_default().push(c);
        }
        for group in by_post.values_mut() {
            group.sort_by(|a, b| {
                (a.created_utc, a.name.as_str()).cmp(&(b.created_utc, b.name.as_str()))
            });
        }
        by_post
    }

    /// Post ids in lexicographic order, the canonical report order.
    pub fn sorted_post_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.posts.keys().map(String::as_str).collect();
        ids.sort_unstable();
        ids
    }
}

fn finalize(posts: PostIndex, comments: CommentState) -> Corpus {
    let window = posts.window;
    let mut retained: HashMap<String, CommentRecord> = HashMap::new();
    let mut unknown_posts: HashSet<String> = HashSet::new();
    let mut on_out_of_window = 0u64;
    let n_comments_in_window = comments.slots.len() as u64;
    for (id, slot) in comments.slots {
        match slot {
            CommentSlot::Retained(rec) => {
                retained.insert(id, rec);
            }
            CommentSlot::OnOutOfWindowPost => on_out_of_window += 1,
            CommentSlot::OnUnknownPost(link_id) => {
                unknown_posts.insert(link_id);
            }
        }
    }

    let mut orphans = BTreeSet::new();
    let mut removed = 0u64;
    for (id, rec) in &retained {
        let parent_known = posts.in_window.contains_key(&rec.parent_id)
            || retained.contains_key(&rec.parent_id);
        if !parent_known {
            orphans.insert(id.clone());
        }
        if rec.body == REMOVED_BODY {
            removed += 1;
        }
    }

    let comments_on_unknown_posts =
        n_comments_in_window - retained.len() as u64 - on_out_of_window;
    Corpus {
        window,
        diag: IngestDiagnostics {
            n_comments_in_window,
            comments_on_out_of_window_posts: on_out_of_window,
            comments_on_unknown_posts,
            out_of_window_posts: posts.out_of_window.len() as u64,
            out_of_window_comments: comments.out_of_window_comments,
            duplicate_posts: posts.duplicates,
            duplicate_comments: comments.duplicates,
            malformed_post_lines: posts.malformed_lines,
            malformed_comment_lines: comments.malformed_lines,
        },
        posts: posts.in_window,
        comments: retained,
        orphan_comments: orphans,
        disconnected_post_count: unknown_posts.len() as u64,
        removed_comment_count: removed,
    }
}

/// Build a corpus from already-parsed records.
pub fn build_corpus<P, C>(posts: P, comments: C, window: AnalysisWindow) -> Corpus
where
    P: IntoIterator<Item = PostRecord>,
    C: IntoIterator<Item = CommentRecord>,
{
    let mut index = PostIndex::new(window);
    for p in posts {
        index.add_record(p);
    }
    let mut state = CommentState::new(window);
    for c in comments {
        state.add_record(c, &index);
    }
    finalize(index, state)
}

/// Build a corpus from raw dump lines; malformed rows are skipped and counted.
pub fn build_corpus_from_lines<'a, P, C>(
    post_lines: P,
    comment_lines: C,
    window: AnalysisWindow,
) -> Corpus
where
    P: IntoIterator<Item = &'a str>,
    C: IntoIterator<Item = &'a str>,
{
    let mut index = PostIndex::new(window);
    for line in post_lines {
        index.add_line(line);
    }
    let mut state = CommentState::new(window);
    for line in comment_lines {
        state.add_line(line, &index);
    }
    finalize(index, state)
}

// Byte ranges that split a plain file at newline boundaries.
fn shard_ranges(path: &Path, shards: usize) -> io::Result<Vec<(u64, u64)>> {
    let len = std::fs::metadata(path)?.len();
    if shards <= 1 || len == 0 {
        return Ok(vec![(0, len)]);
    }
    let mut file = File::open(path)?;
    let step = len / shards as u64;
    let mut cuts = vec![0u64];
    let mut buf = [0u8; 4096];
    for i in 1..shards as u64 {
        let mut pos = i * step;
        if pos <= *cuts.last().unwrap() {
            continue;
        }
        file.seek(SeekFrom::Start(pos))?;
        'scan: loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                pos = len;
                break;
            }
            for (off, &b) in buf[..n].iter().enumerate() {
                if b == b'\n' {
                    pos += off as u64 + 1;
                    break 'scan;
                }
            }
            pos += n as u64;
        }
        if pos > *cuts.last().unwrap() && pos < len {
            cuts.push(pos);
        }
    }
    cuts.push(len);
    Ok(cuts.windows(2).map(|w| (w[0], w[1])).collect())
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

fn for_each_line_in_range<F: FnMut(&str)>(
    path: &Path,
    range: (u64, u64),
    mut f: F,
) -> io::Result<()> {
    let mut file = File::open(path)?;
    file.seek(SeekFrom::Start(range.0))?;
    let reader = BufReader::with_capacity(1 << 20, file.take(range.1 - range.0));
    for line in reader.lines() {
        f(&line?);
    }
    Ok(())
}

fn for_each_line_gz<F: FnMut(&str)>(path: &Path, mut f: F) -> io::Result<()> {
    let file = File::open(path)?;
    let reader = BufReader::with_capacity(1 << 20, flate2::read::GzDecoder::new(file));
    for line in reader.lines() {
        f(&line?);
    }
    Ok(())
}

/// Ingest a post dump file (`.jsonl`, or `.gz`-compressed) with `shards`
/// parallel workers. The merged result is independent of the shard count.
pub fn load_posts(path: &Path, window: AnalysisWindow, shards: usize) -> io::Result<PostIndex> {
    if is_gzip(path) {
        let mut index = PostIndex::new(window);
        for_each_line_gz(path, |line| index.add_line(line))?;
        return Ok(index);
    }
    let ranges = shard_ranges(path, shards.max(1))?;
    let partials: Vec<io::Result<PostIndex>> = ranges
        .into_par_iter()
        .map(|range| {
            let mut index = PostIndex::new(window);
            for_each_line_in_range(path, range, |line| index.add_line(line))?;
            Ok(index)
        })
        .collect();
    let mut merged = PostIndex::new(window);
    for partial in partials {
        merged.merge(partial?);
    }
    Ok(merged)
}

/// Ingest a comment dump file against an already-built post index.
pub fn load_comments(
    path: &Path,
    posts: &PostIndex,
    window: AnalysisWindow,
    shards: usize,
) -> io::Result<CommentState> {
    if is_gzip(path) {
        let mut state = CommentState::new(window);
        for_each_line_gz(path, |line| state.add_line(line, posts))?;
        return Ok(state);
    }
    let ranges = shard_ranges(path, shards.max(1))?;
    let partials: Vec<io::Result<CommentState>> = ranges
        .into_par_iter()
        .map(|range| {
            let mut state = CommentState::new(window);
            for_each_line_in_range(path, range, |line| state.add_line(line, posts))?;
            Ok(state)
        })
        .collect();
    let mut merged = CommentState::new(window);
    for partial in partials {
        merged.merge(partial?);
    }
    Ok(merged)
}

/// Full two-pass ingestion of a post file and a comment file.
pub fn load_corpus(
    posts_path: &Path,
    comments_path: &Path,
    window: AnalysisWindow,
    shards: usize,
) -> io::Result<Corpus> {
    let index = load_posts(posts_path, window, shards)?;
    let state = load_comments(comments_path, &index, window, shards)?;
    Ok(finalize(index, state))
}

/// Corpus-level counts (the basic statistics table).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicStats {
    pub n_posts: u64,
    pub n_deleted_author_posts: u64,
    pub n_zero_comment_posts: u64,
    pub n_one_comment_posts: u64,
    pub n_comments: u64,
    pub n_comments_on_period_posts: u64,
    pub n_disconnected_posts: u64,
    pub n_removed_comments: u64,
}

impl BasicStats {
    /// Field-wise sum; corpus stats over disjoint id sets are additive.
    pub fn merge(&self, other: &BasicStats) -> BasicStats {
        BasicStats {
            n_posts: self.n_posts + other.n_posts,
            n_deleted_author_posts: self.n_deleted_author_posts + other.n_deleted_author_posts,
            n_zero_comment_posts: self.n_zero_comment_posts + other.n_zero_comment_posts,
            n_one_comment_posts: self.n_one_comment_posts + other.n_one_comment_posts,
            n_comments: self.n_comments + other.n_comments,
            n_comments_on_period_posts: self.n_comments_on_period_posts
                + other.n_comments_on_period_posts,
            n_disconnected_posts: self.n_disconnected_posts + other.n_disconnected_posts,
            n_removed_comments: self.n_removed_comments + other.n_removed_comments,
        }
    }
}

/// Compute the basic statistics of a corpus. Zero/one-comment counts use the
/// retained in-window comments, not the dump's `num_comments` field.
pub fn corpus_stats(corpus: &Corpus) -> BasicStats {
    let mut per_post: HashMap<&str, u64> = HashMap::new();
    for c in corpus.comments.values() {
        *per_post.entry(c.link_id.as_str()).or_insert(0) += 1;
    }
    let mut zero = 0u64;
    let mut one = 0u64;
    let mut deleted = 0u64;
    for post in corpus.posts.values() {
        match per_post.get(post.name.as_str()).copied().unwrap_or(0) {
            0 => zero += 1,
            1 => one += 1,
            _ => {}
        }
        if post.has_deleted_author() {
            deleted += 1;
        }
    }
    BasicStats {
        n_posts: corpus.posts.len() as u64,
        n_deleted_author_posts: deleted,
        n_zero_comment_posts: zero,
        n_one_comment_posts: one,
        n_comments: corpus.diag.n_comments_in_window,
        n_comments_on_period_posts: corpus.comments.len() as u64,
        n_disconnected_posts: corpus.disconnected_post_count,
        n_removed_comments: corpus.removed_comment_count,
    }
}
