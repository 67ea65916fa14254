//! Detection of posts whose first comment could not have been typed by a
//! human: a long, link-free comment by the post's own author within seconds
//! of posting.

use serde::{Deserialize, Serialize};

use crate::ingest::Corpus;
use crate::record::{CommentRecord, PostRecord};

/// Detection thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyborgThresholds {
    /// First comment must arrive within this many seconds.
    pub latency_max_secs: i64,
    /// First comment must be strictly longer than this many characters.
    pub min_chars: usize,
}

impl Default for CyborgThresholds {
    fn default() -> Self {
        Self { latency_max_secs: 6, min_chars: 100 }
    }
}

/// Per-post verdict; a pure function of the post, its comments, and the
/// thresholds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyborgVerdict {
    pub post_id: String,
    /// Seconds from post creation to the first comment; `None` with no comments.
    pub first_comment_latency: Option<i64>,
    pub same_author: bool,
    pub first_comment_chars: usize,
    pub long_first_comment: bool,
    pub contains_link: bool,
    pub is_cyborg_like: bool,
    pub is_successful: bool,
}

/// Earliest comment, ties broken by comment id.
fn first_comment<'a>(comments: &[&'a CommentRecord]) -> Option<&'a CommentRecord> {
    comments
        .iter()
        .copied()
        .min_by(|a, b| (a.created_utc, a.name.as_str()).cmp(&(b.created_utc, b.name.as_str())))
}

/// Latency of the first comment in seconds; `None` when there are none.
pub fn first_comment_latency(post: &PostRecord, comments: &[&CommentRecord]) -> Option<i64> {
    first_comment(comments).map(|c| c.created_utc as i64 - post.created_utc as i64)
}

fn body_contains_link(body: &str) -> bool {
    body.contains("http://") || body.contains("https://") || body.contains("www.")
}

/// A post succeeded if it drew any reaction from someone other than its
/// author: a foreign comment, or a score off the self-vote baseline of 1.
pub fn is_successful(post: &PostRecord, comments: &[&CommentRecord]) -> bool {
    comments.iter().any(|c| c.author != post.author) || post.score != 1
}

/// Full verdict for one post.
pub fn is_cyborg_like(
    post: &PostRecord,
    comments: &[&CommentRecord],
    thresholds: &CyborgThresholds,
) -> CyborgVerdict {
    let first = first_comment(comments);
    let latency = first.map(|c| c.created_utc as i64 - post.created_utc as i64);
    // The deleted marker aggregates many identities and cannot attribute a
    // comment to the post's author.
    let same_author = first
        .is_some_and(|c| c.author == post.author && !post.has_deleted_author());
    let chars = first.map_or(0, |c| c.body.chars().count());
    let long_first_comment = chars > thresholds.min_chars;
    let contains_link = first.is_some_and(|c| body_contains_link(&c.body));
    let is_cyborg_like = latency.is_some_and(|l| l <= thresholds.latency_max_secs)
        && same_author
        && long_first_comment
        && !contains_link;
    CyborgVerdict {
        post_id: post.name.clone(),
        first_comment_latency: latency,
        same_author,
        first_comment_chars: chars,
        long_first_comment,
        contains_link,
        is_cyborg_like,
        is_successful: is_successful(post, comments),
    }
}

/// Corpus-level counts over fast-first-comment posts.
///
/// "Non cyborg-like" rows cover same-author fast posts that fail the
/// length-or-link test, so the four success cells partition
/// `posts_same_author_first_comment`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyborgReport {
    pub posts_first_comment_within_6s: u64,
    pub posts_same_author_first_comment: u64,
    pub cyborg_like_posts: u64,
    pub successful_cyborg: u64,
    pub unsuccessful_cyborg: u64,
    pub successful_non_cyborg: u64,
    pub unsuccessful_non_cyborg: u64,
}

impl CyborgReport {
    pub fn add(&mut self, verdict: &CyborgVerdict, thresholds: &CyborgThresholds) {
        let fast = verdict
            .first_comment_latency
            .is_some_and(|l| l <= thresholds.latency_max_secs);
        if !fast {
            return;
        }
        self.posts_first_comment_within_6s += 1;
        if !verdict.same_author {
            return;
        }
        self.posts_same_author_first_comment += 1;
        match (verdict.is_cyborg_like, verdict.is_successful) {
            (true, true) => {
                self.cyborg_like_posts += 1;
                self.successful_cyborg += 1;
            }
            (true, false) => {
                self.cyborg_like_posts += 1;
                self.unsuccessful_cyborg += 1;
            }
            (false, true) => self.successful_non_cyborg += 1,
            (false, false) => self.unsuccessful_non_cyborg += 1,
        }
    }

    pub fn merge(&self, other: &CyborgReport) -> CyborgReport {
        CyborgReport {
            posts_first_comment_within_6s: self.posts_first_comment_within_6s
                + other.posts_first_comment_within_6s,
            posts_same_author_first_comment: self.posts_same_author_first_comment
                + other.posts_same_author_first_comment,
            cyborg_like_posts: self.cyborg_like_posts + other.cyborg_like_posts,
            successful_cyborg: self.successful_cyborg + other.successful_cyborg,
            unsuccessful_cyborg: self.unsuccessful_cyborg + other.unsuccessful_cyborg,
            successful_non_cyborg: self.successful_non_cyborg + other.successful_non_cyborg,
            unsuccessful_non_cyborg: self.unsuccessful_non_cyborg + other.unsuccessful_non_cyborg,
        }
    }
}

/// Verdicts for every post plus the aggregate report, in post-id order.
pub fn cyborg_report(
    corpus: &Corpus,
    thresholds: &CyborgThresholds,
) -> (Vec<CyborgVerdict>, CyborgReport) {
    let by_post = corpus.comments_by_post();
    let empty: Vec<&CommentRecord> = Vec::new();
    let mut report = CyborgReport::default();
    let mut verdicts = Vec::with_capacity(corpus.posts.len());
    for id in corpus.sorted_post_ids() {
        let post = &corpus.posts[id];
        let comments = by_post.get(id).unwrap_or(&empty);
        let verdict = is_cyborg_like(post, comments, thresholds);
        report.add(&verdict, thresholds);
        verdicts.push(verdict);
    }
    (verdicts, report)
}
