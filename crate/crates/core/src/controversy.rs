//! Deletion-based controversiality scores at the post, subreddit, and author
//! levels, plus subreddit popularity categories.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Corpus;
use crate::record::{is_deleted_author, CommentRecord, DELETED_BODY, REMOVED_BODY};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ControversyError {
    #[error("post has no comments; score undefined")]
    NoComments,
    #[error("{actual} posts, need {required}")]
    BelowThreshold { actual: u64, required: u64 },
    #[error("subreddit has zero posts")]
    ZeroPosts,
}

/// Which comment bodies count as deleted content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionMarkers {
    pub bodies: Vec<String>,
}

impl Default for DeletionMarkers {
    fn default() -> Self {
        Self { bodies: vec![DELETED_BODY.to_string(), REMOVED_BODY.to_string()] }
    }
}

impl DeletionMarkers {
    pub fn is_deleted(&self, comment: &CommentRecord) -> bool {
        self.bodies.contains(&comment.body)
            || (is_deleted_author(&comment.author) && comment.body.is_empty())
    }
}

/// Fraction of a post's comments that are deleted.
pub fn post_controversiality(
    comments: &[&CommentRecord],
    markers: &DeletionMarkers,
) -> Result<f64, ControversyError> {
    if comments.is_empty() {
        return Err(ControversyError::NoComments);
    }
    let deleted = comments.iter().filter(|c| markers.is_deleted(c)).count();
    Ok(deleted as f64 / comments.len() as f64)
}

/// A post is controversial when its score strictly exceeds `theta`.
pub fn is_controversial(score: f64, theta: f64) -> bool {
    score > theta
}

/// Popularity bucket of a subreddit by post count:
/// 1: 1-10, 2: 11-100, 3: 101-1000, 4: 1001-2000, 5: above 2000.
pub fn subreddit_popularity_category(n_posts: u64) -> Result<u8, ControversyError> {
    match n_posts {
        0 => Err(ControversyError::ZeroPosts),
        1..=10 => Ok(1),
        11..=100 => Ok(2),
        101..=1000 => Ok(3),
        1001..=2000 => Ok(4),
        _ => Ok(5),
    }
}

// Post-id -> controversiality for every scored post, with subreddit and
// author attached. The shared substrate for the rollups below.
struct ScoredPosts<'a> {
    // (post_id, subreddit, author, score, n_comments, n_unique_authors)
    rows: Vec<(&'a str, &'a str, &'a str, f64, u64, u64)>,
    posts_per_subreddit: BTreeMap<&'a str, u64>,
    posts_per_author: BTreeMap<&'a str, u64>,
}

fn score_posts<'a>(corpus: &'a Corpus, markers: &DeletionMarkers) -> ScoredPosts<'a> {
    let by_post = corpus.comments_by_post();
    let mut rows = Vec::new();
    let mut posts_per_subreddit: BTreeMap<&str, u64> = BTreeMap::new();
    let mut posts_per_author: BTreeMap<&str, u64> = BTreeMap::new();
    for id in corpus.sorted_post_ids() {
        let post = &corpus.posts[id];
        *posts_per_subreddit.entry(post.subreddit.as_str()).or_insert(0) += 1;
        if !post.has_deleted_author() {
            *posts_per_author.entry(post.author.as_str()).or_insert(0) += 1;
        }
        if let Some(comments) = by_post.get(id) {
            if let Ok(score) = post_controversiality(comments, markers) {
                let mut authors: Vec<&str> = comments
                    .iter()
                    .filter(|c| !c.has_deleted_author())
                    .map(|c| c.author.as_str())
                    .collect();
                authors.sort_unstable();
                authors.dedup();
                rows.push((
                    post.name.as_str(),
                    post.subreddit.as_str(),
                    post.author.as_str(),
                    score,
                    comments.len() as u64,
                    authors.len() as u64,
                ));
            }
        }
    }
    ScoredPosts { rows, posts_per_subreddit, posts_per_author }
}

/// Fraction of a subreddit's scored posts that are controversial. Requires at
/// least `min_posts` scored posts in the subreddit.
pub fn subreddit_controversiality(
    corpus: &Corpus,
    subreddit: &str,
    theta: f64,
    min_posts: u64,
) -> Result<f64, ControversyError> {
    let scored = score_posts(corpus, &DeletionMarkers::default());
    let (scored_posts, controversial) = scored
        .rows
        .iter()
        .filter(|r| r.1 == subreddit)
        .fold((0u64, 0u64), |(n, c), r| (n + 1, c + u64::from(is_controversial(r.3, theta))));
    if scored_posts < min_posts {
        return Err(ControversyError::BelowThreshold { actual: scored_posts, required: min_posts });
    }
    Ok(controversial as f64 / scored_posts as f64)
}

/// Fraction of an author's scored posts that are controversial. Requires the
/// author to have strictly more than `min_posts` posts overall.
pub fn author_controversiality(
    corpus: &Corpus,
    author: &str,
    theta: f64,
    min_posts: u64,
) -> Result<f64, ControversyError> {
    let scored = score_posts(corpus, &DeletionMarkers::default());
    let total = scored.posts_per_author.get(author).copied().unwrap_or(0);
    if total <= min_posts {
        return Err(ControversyError::BelowThreshold { actual: total, required: min_posts + 1 });
    }
    let (scored_posts, controversial) = scored
        .rows
        .iter()
        .filter(|r| r.2 == author)
        .fold((0u64, 0u64), |(n, c), r| (n + 1, c + u64::from(is_controversial(r.3, theta))));
    if scored_posts == 0 {
        return Ok(0.0);
    }
    Ok(controversial as f64 / scored_posts as f64)
}

/// One scatter row per qualifying post.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub post_id: String,
    pub n_unique_authors: u64,
    pub post_score: f64,
    pub n_comments: u64,
    pub popularity_category: u8,
}

/// Controversiality against unique-author count for posts with at least
/// `min_comments` comments, in post-id order.
pub fn controversy_scatter(
    corpus: &Corpus,
    min_comments: u64,
    markers: &DeletionMarkers,
) -> Vec<ScatterRow> {
    let scored = score_posts(corpus, markers);
    scored
        .rows
        .iter()
        .filter(|r| r.4 >= min_comments)
        .map(|r| ScatterRow {
            post_id: r.0.to_string(),
            n_unique_authors: r.5,
            post_score: r.3,
            n_comments: r.4,
            popularity_category: subreddit_popularity_category(scored.posts_per_subreddit[r.1])
                .expect("subreddit of a scored post has posts"),
        })
        .collect()
}

/// Per-subreddit rollup row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubredditControversy {
    pub subreddit: String,
    pub n_posts: u64,
    pub n_scored_posts: u64,
    pub n_controversial: u64,
    pub fraction: f64,
    pub popularity_category: u8,
}

/// Controversiality of every subreddit with at least `min_posts` scored
/// posts, in subreddit order.
pub fn subreddit_controversy_table(
    corpus: &Corpus,
    theta: f64,
    min_posts: u64,
    markers: &DeletionMarkers,
) -> Vec<SubredditControversy> {
    let scored = score_posts(corpus, markers);
    let mut per_sub: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for r in &scored.rows {
        let entry = per_sub.entry(r.1).or_insert((0, 0));
        entry.0 += 1;
        entry.1 += u64::from(is_controversial(r.3, theta));
    }
    per_sub
        .into_iter()
        .filter(|(_, (n_scored, _))| *n_scored >= min_posts)
        .map(|(sub, (n_scored, n_controversial))| SubredditControversy {
            subreddit: sub.to_string(),
            n_posts: scored.posts_per_subreddit[sub],
            n_scored_posts: n_scored,
            n_controversial,
            fraction: n_controversial as f64 / n_scored as f64,
            popularity_category: subreddit_popularity_category(scored.posts_per_subreddit[sub])
                .expect("subreddit with scored posts has posts"),
        })
        .collect()
}

/// Per-author rollup row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthorControversy {
    pub author: String,
    pub n_posts: u64,
    pub n_scored_posts: u64,
    pub n_controversial: u64,
    pub fraction: f64,
}

/// Controversiality of every author with strictly more than `min_posts`
/// posts, in author order.
pub fn author_controversy_table(
    corpus: &Corpus,
    theta: f64,
    min_posts: u64,
    markers: &DeletionMarkers,
) -> Vec<AuthorControversy> {
    let scored = score_posts(corpus, markers);
    let mut per_author: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for r in &scored.rows {
        if is_deleted_author(r.2) {
            continue;
        }
        let entry = per_author.entry(r.2).or_insert((0, 0));
        entry.0 += 1;
        entry.1 += u64::from(is_controversial(r.3, theta));
    }
    scored
        .posts_per_author
        .iter()
        .filter(|(_, &total)| total > min_posts)
        .map(|(&author, &total)| {
            let (n_scored, n_controversial) =
                per_author.get(author).copied().unwrap_or((0, 0));
            AuthorControversy {
                author: author.to_string(),
                n_posts: total,
                n_scored_posts: n_scored,
                n_controversial,
                fraction: if n_scored == 0 {
                    0.0
                } else {
                    n_controversial as f64 / n_scored as f64
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_corpus;
    use crate::record::{AnalysisWindow, PostRecord, DELETED_AUTHOR};

    fn post(name: &str, author: &str, sub: &str) -> PostRecord {
        PostRecord {
            name: name.to_string(),
            author: author.to_string(),
            created_utc: 100,
            num_comments: 0,
            subreddit: sub.to_string(),
            score: 1,
            title: String::new(),
            selftext: String::new(),
        }
    }

    fn comment(name: &str, author: &str, link: &str, body: &str) -> CommentRecord {
        CommentRecord {
            name: name.to_string(),
            author: author.to_string(),
            created_utc: 200,
            link_id: link.to_string(),
            parent_id: link.to_string(),
            body: body.to_string(),
            subreddit: "s".into(),
            score: 1,
        }
    }

    fn mk(n: usize, deleted: usize, link: &str) -> Vec<CommentRecord> {
        (0..n)
            .map(|i| {
                let body = if i < deleted { "[deleted]" } else { "fine" };
                comment(&format!("t1_{link}_{i}"), &format!("u{i}"), link, body)
            })
            .collect()
    }

    #[test]
    fn post_score_fractions() {
        let markers = DeletionMarkers::default();
        let c = mk(10, 3, "t3_a");
        let refs: Vec<&CommentRecord> = c.iter().collect();
        assert_eq!(post_controversiality(&refs, &markers).unwrap(), 0.3);
        let c = mk(10, 0, "t3_a");
        let refs: Vec<&CommentRecord> = c.iter().collect();
        assert_eq!(post_controversiality(&refs, &markers).unwrap(), 0.0);
        assert_eq!(post_controversiality(&[], &markers), Err(ControversyError::NoComments));
    }

    #[test]
    fn deletion_detection_variants() {
        let markers = DeletionMarkers::default();
        assert!(markers.is_deleted(&comment("t1_a", "u", "t3_x", "[deleted]")));
        assert!(markers.is_deleted(&comment("t1_b", "u", "t3_x", "[removed]")));
        assert!(markers.is_deleted(&comment("t1_c", DELETED_AUTHOR, "t3_x", "")));
        assert!(!markers.is_deleted(&comment("t1_d", DELETED_AUTHOR, "t3_x", "text survives")));
        assert!(!markers.is_deleted(&comment("t1_e", "u", "t3_x", "ordinary")));
    }

    #[test]
    fn strict_threshold_boundary() {
        assert!(is_controversial(0.25, 0.2));
        assert!(!is_controversial(0.2, 0.2));
        assert!(!is_controversial(0.0, 0.2));
        // 10 comments, 2 deleted: exactly 0.2, not controversial.
        let markers = DeletionMarkers::default();
        let c = mk(10, 2, "t3_a");
        let refs: Vec<&CommentRecord> = c.iter().collect();
        let score = post_controversiality(&refs, &markers).unwrap();
        assert_eq!(score, 0.2);
        assert!(!is_controversial(score, 0.2));
    }

    #[test]
    fn popularity_buckets() {
        assert_eq!(subreddit_popularity_category(0), Err(ControversyError::ZeroPosts));
        assert_eq!(subreddit_popularity_category(5).unwrap(), 1);
        assert_eq!(subreddit_popularity_category(10).unwrap(), 1);
        assert_eq!(subreddit_popularity_category(11).unwrap(), 2);
        assert_eq!(subreddit_popularity_category(100).unwrap(), 2);
        assert_eq!(subreddit_popularity_category(101).unwrap(), 3);
        assert_eq!(subreddit_popularity_category(500).unwrap(), 3);
        assert_eq!(subreddit_popularity_category(1000).unwrap(), 3);
        assert_eq!(subreddit_popularity_category(1001).unwrap(), 4);
        assert_eq!(subreddit_popularity_category(2000).unwrap(), 4);
        assert_eq!(subreddit_popularity_category(2001).unwrap(), 5);
    }

    fn planted_corpus(n_posts: usize, n_controversial: usize, sub: &str) -> Corpus {
        let mut posts = Vec::new();
        let mut comments = Vec::new();
        for i in 0..n_posts {
            let id = format!("t3_{sub}{i}");
            posts.push(post(&id, "author1", sub));
            let deleted = if i < n_controversial { 3 } else { 1 };
            comments.extend(mk(10, deleted, &id)); // 0.3 vs 0.1
        }
        build_corpus(posts, comments, AnalysisWindow::new(1, 1000).unwrap())
    }

    #[test]
    fn subreddit_fraction_planted() {
        let corpus = planted_corpus(150, 37, "splanted");
        assert_eq!(
            subreddit_controversiality(&corpus, "splanted", 0.2, 100).unwrap(),
            37.0 / 150.0
        );
        let small = planted_corpus(99, 10, "tiny");
        assert_eq!(
            subreddit_controversiality(&small, "tiny", 0.2, 100),
            Err(ControversyError::BelowThreshold { actual: 99, required: 100 })
        );
    }

    #[test]
    fn author_threshold_is_strict() {
        let corpus = planted_corpus(51, 17, "s");
        assert_eq!(author_controversiality(&corpus, "author1", 0.2, 50).unwrap(), 1.0 / 3.0);
        let at50 = planted_corpus(50, 17, "s");
        assert_eq!(
            author_controversiality(&at50, "author1", 0.2, 50),
            Err(ControversyError::BelowThreshold { actual: 50, required: 51 })
        );
        let calm = planted_corpus(60, 0, "s");
        assert_eq!(author_controversiality(&calm, "author1", 0.2, 50).unwrap(), 0.0);
    }

    #[test]
    fn scatter_rows() {
        let mut posts = vec![post("t3_big", "op", "s")];
        let mut comments = Vec::new();
        // 500 comments from 120 unique authors, 150 deleted.
        for i in 0..500 {
            let body = if i < 150 { "[deleted]" } else { "ok" };
            let mut c = comment(&format!("t1_{i}"), &format!("u{}", i % 120), "t3_big", body);
            // Deleted bodies from distinct authors so unique-author counting
            // still sees 120 identities.
            c.created_utc = 200 + i as u64;
            comments.push(c);
        }
        posts.push(post("t3_small", "op", "s"));
        comments.push(comment("t1_small", "u0", "t3_small", "hello"));
        let corpus =
            build_corpus(posts, comments, AnalysisWindow::new(1, 10_000).unwrap());
        let rows = controversy_scatter(&corpus, 500, &DeletionMarkers::default());
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.post_id, "t3_big");
        assert_eq!(row.n_unique_authors, 120);
        assert_eq!(row.post_score, 0.3);
        assert_eq!(row.n_comments, 500);
        assert_eq!(row.popularity_category, 1);
    }

    #[test]
    fn scatter_single_author_post() {
        let posts = vec![post("t3_solo", "op", "s")];
        let comments: Vec<CommentRecord> =
            (0..5).map(|i| comment(&format!("t1_{i}"), "lonely", "t3_solo", "x")).collect();
        let corpus =
            build_corpus(posts, comments, AnalysisWindow::new(1, 10_000).unwrap());
        let rows = controversy_scatter(&corpus, 5, &DeletionMarkers::default());
        assert_eq!(rows[0].n_unique_authors, 1);
    }

    #[test]
    fn tables_are_sorted_and_thresholded() {
        let corpus = planted_corpus(120, 30, "zeta");
        let table = subreddit_controversy_table(&corpus, 0.2, 100, &DeletionMarkers::default());
        assert_eq!(table.len(), 1);
        assert_eq!(table[0].subreddit, "zeta");
        assert_eq!(table[0].n_controversial, 30);
        assert_eq!(table[0].popularity_category, 3);

        let authors = author_controversy_table(&corpus, 0.2, 50, &DeletionMarkers::default());
        assert_eq!(authors.len(), 1);
        assert_eq!(authors[0].fraction, 0.25);
    }
}
