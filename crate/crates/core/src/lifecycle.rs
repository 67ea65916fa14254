//! Post ages, the age distribution, and popular-post evolution classes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hist::{BinSpec, HistAccumulator, HistError, Histogram};
use crate::ingest::Corpus;
use crate::record::{CommentRecord, PostRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LifecycleError {
    #[error("post has {actual} comments, below the {required} required")]
    BelowThreshold { actual: u64, required: u64 },
}

/// Age of a post: seconds from creation to its last comment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PostAge {
    pub seconds: u64,
    /// True when the last comment predates the post (clock skew, clamped to 0).
    pub skew_clamped: bool,
}

/// Age of a post, `None` when it has no comments.
pub fn post_age(post: &PostRecord, comments: &[&CommentRecord]) -> Option<PostAge> {
    let last = comments.iter().map(|c| c.created_utc).max()?;
    if last >= post.created_utc {
        Some(PostAge { seconds: last - post.created_utc, skew_clamped: false })
    } else {
        Some(PostAge { seconds: 0, skew_clamped: true })
    }
}

/// One-day inactivity statistics over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MayflyStats {
    pub threshold_secs: u64,
    pub n_posts: u64,
    /// Posts with at least one comment, the denominator for `fraction_of_aged`.
    pub n_aged_posts: u64,
    pub n_mayfly_posts: u64,
    pub n_skew_clamped: u64,
    /// Fraction of aged posts with age <= threshold; `None` with no aged posts.
    pub fraction_of_aged: Option<f64>,
    /// Same count over all posts, zero-comment posts included.
    pub fraction_of_all: Option<f64>,
}

/// Fraction of aged posts whose age is at most `threshold_secs`.
pub fn mayfly_fraction(corpus: &Corpus, threshold_secs: u64) -> MayflyStats {
    let by_post = corpus.comments_by_post();
    let mut aged = 0u64;
    let mut mayfly = 0u64;
    let mut skew = 0u64;
    for post in corpus.posts.values() {
        let comments = match by_post.get(post.name.as_str()) {
            Some(c) => c,
            None => continue,
        };
        if let Some(age) = post_age(post, comments) {
            aged += 1;
            if age.skew_clamped {
                skew += 1;
            }
            if age.seconds <= threshold_secs {
                mayfly += 1;
            }
        }
    }
    let n_posts = corpus.posts.len() as u64;
    MayflyStats {
        threshold_secs,
        n_posts,
        n_aged_posts: aged,
        n_mayfly_posts: mayfly,
        n_skew_clamped: skew,
        fraction_of_aged: (aged > 0).then(|| mayfly as f64 / aged as f64),
        fraction_of_all: (n_posts > 0).then(|| mayfly as f64 / n_posts as f64),
    }
}

/// Histogram of post ages over the corpus (aged posts only).
pub fn age_histogram(corpus: &Corpus, spec: &BinSpec) -> Result<Histogram, HistError> {
    // Validate the spec up front via an empty histogram.
    crate::hist::histogram(std::iter::empty(), spec)?;
    let by_post = corpus.comments_by_post();
    let mut acc = HistAccumulator::default();
    for post in corpus.posts.values() {
        if let Some(comments) = by_post.get(post.name.as_str()) {
            if let Some(age) = post_age(post, comments) {
                acc.add(spec, age.seconds);
            }
        }
    }
    Ok(acc.finish(spec))
}

/// Evolution classes of popular posts, by time to reach the comment-fraction
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvolutionClass {
    EarlyBloomer,
    Steady,
    LateBloomer,
}

impl EvolutionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvolutionClass::EarlyBloomer => "early_bloomer",
            EvolutionClass::Steady => "steady",
            EvolutionClass::LateBloomer => "late_bloomer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    /// Fraction of total comments that defines the crossing time.
    pub fraction: f64,
    /// Crossing at or before this elapsed time: early bloomer.
    pub early_secs: u64,
    /// Crossing after this elapsed time: late bloomer.
    pub late_secs: u64,
    /// Only posts with at least this many comments qualify.
    pub min_comments: u64,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self {
            fraction: 0.75,
            early_secs: 86_400,
            late_secs: 2_592_000,
            min_comments: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evolution {
    pub class: EvolutionClass,
    /// Elapsed seconds at which the cumulative comment count first reaches
    /// `ceil(fraction * total)`.
    pub t75_seconds: u64,
    pub total_comments: u64,
}

/// Evolution rows for every qualifying post, in post-id order.
pub fn corpus_evolutions(corpus: &Corpus, params: &EvolutionParams) -> Vec<(String, Evolution)> {
    let by_post = corpus.comments_by_post();
    let mut rows = Vec::new();
    for id in corpus.sorted_post_ids() {
        if let Some(comments) = by_post.get(id) {
            if let Ok(evolution) = classify_evolution(&corpus.posts[id], comments, params) {
                rows.push((id.to_string(), evolution));
            }
        }
    }
    rows
}

/// Classify a qualifying post by how fast it accumulated its comments.
pub fn classify_evolution(
    post: &PostRecord,
    comments: &[&CommentRecord],
    params: &EvolutionParams,
) -> Result<Evolution, LifecycleError> {
    let total = comments.len() as u64;
    if total < params.min_comments {
        return Err(LifecycleError::BelowThreshold { actual: total, required: params.min_comments });
    }
    let mut times: Vec<u64> = comments.iter().map(|c| c.created_utc).collect();
    times.sort_unstable();
    let needed = ((params.fraction * total as f64).ceil() as u64).clamp(1, total);
    let crossing = times[needed as usize - 1];
    let t75_seconds = crossing.saturating_sub(post.created_utc);
    let class = if t75_seconds <= params.early_secs {
        EvolutionClass::EarlyBloomer
    } else if t75_seconds > params.late_secs {
        EvolutionClass::LateBloomer
    } else {
        EvolutionClass::Steady
    };
    Ok(Evolution { class, t75_seconds, total_comments: total })
}
