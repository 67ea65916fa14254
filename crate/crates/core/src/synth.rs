//! Deterministic synthetic-corpus generator.
//!
//! Plants known behaviors (cyborg posts, lifecycle archetypes, limelight
//! trees, bursty entities, controversial posts) and emits them in the exact
//! dump schema together with explicit ground-truth labels, so every detector
//! can be scored against a known answer.
//!
//! Randomness comes from ChaCha8 streams seeded with
//! `config.seed ^ fnv1a(stream_name)`; the algorithm is fixed so identical
//! `(seed, config)` pairs always produce byte-identical output. Labels are
//! written out explicitly, so consumers never need to reproduce the draws.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Pareto};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::BasicStats;
use crate::lifecycle::EvolutionClass;
use crate::record::{AnalysisWindow, CommentRecord, PostRecord, DELETED_AUTHOR};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

fn invalid(msg: impl Into<String>) -> SynthError {
    SynthError::InvalidConfig(msg.into())
}

// Interval caps keep a single heavy-tailed draw from escaping the window.
const MAX_INTERVAL_SECS: f64 = 2_000_000.0;

/// Inter-event interval distribution for planted bursty entities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum IntervalLaw {
    Regular { spacing_secs: u64 },
    Exponential { mean_secs: f64 },
    Pareto { scale_secs: f64, alpha: f64 },
}

impl IntervalLaw {
    fn validate(&self) -> Result<(), SynthError> {
        match *self {
            IntervalLaw::Regular { spacing_secs: 0 } => {
                Err(invalid("regular spacing must be positive"))
            }
            IntervalLaw::Exponential { mean_secs } if mean_secs <= 0.0 || mean_secs.is_nan() => {
                Err(invalid("exponential mean must be positive"))
            }
            IntervalLaw::Pareto { scale_secs, alpha }
                if scale_secs <= 0.0 || alpha <= 0.0 || scale_secs.is_nan() || alpha.is_nan() =>
            {
                Err(invalid("pareto scale and alpha must be positive"))
            }
            _ => Ok(()),
        }
    }

    fn sample_intervals(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
        match *self {
            IntervalLaw::Regular { spacing_secs } => vec![spacing_secs; n],
            IntervalLaw::Exponential { mean_secs } => {
                let dist = Exp::new(1.0 / mean_secs).expect("validated");
                (0..n)
                    .map(|_| dist.sample(rng).round().clamp(0.0, MAX_INTERVAL_SECS) as u64)
                    .collect()
            }
            IntervalLaw::Pareto { scale_secs, alpha } => {
                let dist = Pareto::new(scale_secs, alpha).expect("validated");
                (0..n)
                    .map(|_| dist.sample(rng).round().clamp(1.0, MAX_INTERVAL_SECS) as u64)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubredditSpec {
    pub name: String,
    pub size: u64,
}

impl Default for SubredditSpec {
    fn default() -> Self {
        Self { name: "synth".to_string(), size: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CyborgPlant {
    pub count: u64,
    /// How many of the planted posts later draw a foreign reaction.
    pub successful: u64,
    pub latency_secs: u64,
    pub comment_chars: usize,
}

impl Default for CyborgPlant {
    fn default() -> Self {
        Self { count: 100, successful: 40, latency_secs: 5, comment_chars: 150 }
    }
}

/// Same-author fast first comment that fails the length test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FastSelfShortPlant {
    pub count: u64,
    pub successful: u64,
    pub latency_secs: u64,
}

impl Default for FastSelfShortPlant {
    fn default() -> Self {
        Self { count: 50, successful: 20, latency_secs: 4 }
    }
}

/// Fast first comment by a different author.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FastOtherPlant {
    pub count: u64,
    pub latency_secs: u64,
}

impl Default for FastOtherPlant {
    fn default() -> Self {
        Self { count: 50, latency_secs: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifecyclePlant {
    pub early: u64,
    pub steady: u64,
    pub late: u64,
    pub comments_per_post: u64,
    /// Thresholds the labels are computed against.
    pub fraction: f64,
    pub early_secs: u64,
    pub late_secs: u64,
    pub min_comments: u64,
}

impl Default for LifecyclePlant {
    fn default() -> Self {
        Self {
            early: 20,
            steady: 20,
            late: 20,
            comments_per_post: 600,
            fraction: 0.75,
            early_secs: 86_400,
            late_secs: 2_592_000,
            min_comments: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimelightPlant {
    pub count: u64,
    pub total_comments: u64,
    pub first_level: u64,
    /// Target share of the dominant first-level subtree.
    pub dominant_fraction: f64,
    /// How many planted posts have the post author hog the limelight.
    pub hog_same_author: u64,
}

impl Default for LimelightPlant {
    fn default() -> Self {
        Self {
            count: 100,
            total_comments: 100,
            first_level: 5,
            dominant_fraction: 0.6,
            hog_same_author: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstGroup {
    #[serde(flatten)]
    pub law: IntervalLaw,
    pub count: u64,
    pub events: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct BurstyAuthorsPlant {
    pub posting: Vec<BurstGroup>,
    pub commenting: Vec<BurstGroup>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControversyPlant {
    /// Posts planted strictly above the deletion threshold.
    pub count: u64,
    pub deleted_per_post: u64,
    /// Posts planted at or below the threshold.
    pub mild_count: u64,
    pub mild_deleted_per_post: u64,
    pub comments_per_post: u64,
    pub theta: f64,
}

impl Default for ControversyPlant {
    fn default() -> Self {
        Self {
            count: 40,
            deleted_per_post: 7,
            mild_count: 40,
            mild_deleted_per_post: 5,
            comments_per_post: 25,
            theta: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundPlant {
    /// Per-post comment count is uniform in `0..=max_comments`.
    pub max_comments: u64,
    /// Every k-th background post gets the deleted author marker; 0 disables.
    pub deleted_author_every: u64,
    pub post_author_pool: u64,
    pub commenter_pool: u64,
}

impl Default for BackgroundPlant {
    fn default() -> Self {
        Self {
            max_comments: 36,
            deleted_author_every: 10,
            post_author_pool: 400,
            commenter_pool: 200,
        }
    }
}

/// Seeded specification of all planted behaviors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_posts: u64,
    pub window: AnalysisWindow,
    /// Post counts per subreddit; sizes must sum to `n_posts`. Empty means a
    /// single subreddit holding everything.
    pub subreddits: Vec<SubredditSpec>,
    pub cyborg: CyborgPlant,
    pub fast_self_short: FastSelfShortPlant,
    pub fast_other: FastOtherPlant,
    pub lifecycle: LifecyclePlant,
    pub limelight: LimelightPlant,
    pub bursty_posts: Vec<BurstGroup>,
    pub bursty_authors: BurstyAuthorsPlant,
    pub controversial: ControversyPlant,
    /// Comments planted with an unknown parent id.
    pub orphan_comments: u64,
    /// Comments planted against post ids that never appear in the dump.
    pub disconnected_comments: u64,
    pub background: BackgroundPlant,
}

impl Default for SynthConfig {
    fn default() -> Self {
        // One year, desk scale, every detector exercised.
        Self {
            seed: 42,
            n_posts: 10_000,
            window: AnalysisWindow { start_utc: 1_199_145_600, end_utc: 1_230_768_000 },
            subreddits: vec![
                SubredditSpec { name: "apex".into(), size: 2_500 },
                SubredditSpec { name: "bravo".into(), size: 1_500 },
                SubredditSpec { name: "canyon".into(), size: 900 },
                SubredditSpec { name: "delta".into(), size: 3_000 },
                SubredditSpec { name: "echo".into(), size: 2_000 },
                SubredditSpec { name: "foxtrot".into(), size: 95 },
                SubredditSpec { name: "golf".into(), size: 5 },
            ],
            cyborg: CyborgPlant::default(),
            fast_self_short: FastSelfShortPlant::default(),
            fast_other: FastOtherPlant::default(),
            lifecycle: LifecyclePlant::default(),
            limelight: LimelightPlant::default(),
            bursty_posts: vec![
                BurstGroup { law: IntervalLaw::Regular { spacing_secs: 600 }, count: 5, events: 600 },
                BurstGroup {
                    law: IntervalLaw::Exponential { mean_secs: 800.0 },
                    count: 5,
                    events: 1_000,
                },
                BurstGroup {
                    law: IntervalLaw::Pareto { scale_secs: 50.0, alpha: 1.5 },
                    count: 5,
                    events: 1_000,
                },
            ],
            bursty_authors: BurstyAuthorsPlant {
                posting: vec![
                    BurstGroup {
                        law: IntervalLaw::Regular { spacing_secs: 3_600 },
                        count: 5,
                        events: 120,
                    },
                    BurstGroup {
                        law: IntervalLaw::Exponential { mean_secs: 3_000.0 },
                        count: 5,
                        events: 120,
                    },
                    BurstGroup {
                        law: IntervalLaw::Pareto { scale_secs: 300.0, alpha: 1.5 },
                        count: 5,
                        events: 120,
                    },
                ],
                commenting: vec![
                    BurstGroup {
                        law: IntervalLaw::Regular { spacing_secs: 1_000 },
                        count: 4,
                        events: 600,
                    },
                    BurstGroup {
                        law: IntervalLaw::Exponential { mean_secs: 900.0 },
                        count: 4,
                        events: 600,
                    },
                    BurstGroup {
                        law: IntervalLaw::Pareto { scale_secs: 100.0, alpha: 1.5 },
                        count: 4,
                        events: 600,
                    },
                ],
            },
            controversial: ControversyPlant::default(),
            orphan_comments: 5,
            disconnected_comments: 3,
            background: BackgroundPlant::default(),
        }
    }
}

impl SynthConfig {
    fn planted_posts(&self) -> u64 {
        let posting_posts: u64 =
            self.bursty_authors.posting.iter().map(|g| g.count * g.events).sum();
        let bursty_posts: u64 = self.bursty_posts.iter().map(|g| g.count).sum();
        self.cyborg.count
            + self.fast_self_short.count
            + self.fast_other.count
            + self.lifecycle.early
            + self.lifecycle.steady
            + self.lifecycle.late
            + self.limelight.count
            + bursty_posts
            + self.controversial.count
            + self.controversial.mild_count
            + posting_posts
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.window.start_utc == 0 || self.window.start_utc >= self.window.end_utc {
            return Err(invalid("window must satisfy 0 < start_utc < end_utc"));
        }
        if self.planted_posts() > self.n_posts {
            return Err(invalid(format!(
                "planted posts ({}) exceed n_posts ({})",
                self.planted_posts(),
                self.n_posts
            )));
        }
        if !self.subreddits.is_empty() {
            let total: u64 = self.subreddits.iter().map(|s| s.size).sum();
            if total != self.n_posts {
                return Err(invalid(format!(
                    "subreddit sizes sum to {total}, expected n_posts = {}",
                    self.n_posts
                )));
            }
        }
        if self.cyborg.successful > self.cyborg.count {
            return Err(invalid("cyborg.successful exceeds cyborg.count"));
        }
        if self.fast_self_short.successful > self.fast_self_short.count {
            return Err(invalid("fast_self_short.successful exceeds count"));
        }
        if self.cyborg.comment_chars <= 100 {
            return Err(invalid("cyborg.comment_chars must exceed 100"));
        }
        if self.cyborg.latency_secs > 6 || self.fast_self_short.latency_secs > 6 {
            return Err(invalid("planted fast latencies must be at most 6 seconds"));
        }
        if !(0.0..=1.0).contains(&self.lifecycle.fraction) {
            return Err(invalid("lifecycle.fraction must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.limelight.dominant_fraction) {
            return Err(invalid("limelight.dominant_fraction must be in [0, 1]"));
        }
        if self.limelight.count > 0 {
            let t = self.limelight.total_comments;
            let n = self.limelight.first_level;
            if n == 0 || t < n {
                return Err(invalid("limelight needs first_level >= 1 and total >= first_level"));
            }
            let dominant = (self.limelight.dominant_fraction * t as f64).round() as u64;
            if dominant < 1 || dominant > t - (n - 1) {
                return Err(invalid("limelight dominant branch does not fit"));
            }
            if n > 1 {
                let rest = t - dominant;
                let largest_other = rest.div_ceil(n - 1);
                if dominant <= largest_other {
                    return Err(invalid(
                        "limelight dominant branch must strictly exceed every other branch",
                    ));
                }
            }
            if self.limelight.hog_same_author > self.limelight.count {
                return Err(invalid("limelight.hog_same_author exceeds count"));
            }
        }
        if self.controversial.comments_per_post == 0
            && (self.controversial.count > 0 || self.controversial.mild_count > 0)
        {
            return Err(invalid("controversial plants need comments_per_post >= 1"));
        }
        if self.lifecycle.early + self.lifecycle.steady + self.lifecycle.late > 0
            && self.lifecycle.comments_per_post < self.lifecycle.min_comments.max(1)
        {
            return Err(invalid("lifecycle plants need comments_per_post >= min_comments"));
        }
        let c = &self.controversial;
        if c.deleted_per_post > c.comments_per_post || c.mild_deleted_per_post > c.comments_per_post
        {
            return Err(invalid("deleted_per_post exceeds comments_per_post"));
        }
        if c.count > 0 && c.deleted_per_post as f64 / c.comments_per_post as f64 <= c.theta {
            return Err(invalid("controversial plant does not exceed theta"));
        }
        if c.mild_count > 0 && c.mild_deleted_per_post as f64 / c.comments_per_post as f64 > c.theta
        {
            return Err(invalid("mild plant exceeds theta"));
        }
        for group in self
            .bursty_posts
            .iter()
            .chain(&self.bursty_authors.posting)
            .chain(&self.bursty_authors.commenting)
        {
            group.law.validate()?;
            if group.events < 2 {
                return Err(invalid("burst groups need at least 2 events"));
            }
        }
        if self.background.post_author_pool == 0 || self.background.commenter_pool == 0 {
            return Err(invalid("background pools must be non-empty"));
        }
        let background = self.n_posts - self.planted_posts();
        let needs_pool: u64 = self.bursty_authors.commenting.iter().map(|g| g.count).sum();
        if (needs_pool > 0 || self.orphan_comments > 0) && background == 0 {
            return Err(invalid(
                "bursty commenting authors and orphan plants need background posts",
            ));
        }
        Ok(())
    }
}

/// Thresholds the ground-truth labels were computed against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthParams {
    pub cyborg_latency_max_secs: i64,
    pub cyborg_min_chars: usize,
    pub lifecycle_fraction: f64,
    pub lifecycle_early_secs: u64,
    pub lifecycle_late_secs: u64,
    pub lifecycle_min_comments: u64,
    pub theta: f64,
}

/// Planted labels for one post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostTruth {
    pub cyborg: bool,
    pub successful: bool,
    pub n_comments: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifecycle: Option<EvolutionClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t75_seconds: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limelight_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hog_is_post_author: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controversial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controversiality: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burst_law: Option<IntervalLaw>,
}

/// Planted labels for one author.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct AuthorTruth {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posting_law: Option<IntervalLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commenting_law: Option<IntervalLaw>,
}

/// Everything a verifier needs to score measurements against the plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub params: TruthParams,
    /// Expected basic statistics of the ingested corpus.
    pub expected_stats: BasicStats,
    pub expected_orphan_comments: u64,
    pub posts: BTreeMap<String, PostTruth>,
    pub authors: BTreeMap<String, AuthorTruth>,
}

/// Generated streams plus their ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub posts: Vec<PostRecord>,
    pub comments: Vec<CommentRecord>,
    pub ground_truth: GroundTruth,
}

fn fnv1a(name: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(name))
}

// Per-post bookkeeping gathered while emitting records.
struct PostDraft {
    author: String,
    created_utc: u64,
    score: i64,
    cyborg: bool,
    limelight_target: Option<f64>,
    hog_is_post_author: Option<bool>,
    burst_law: Option<IntervalLaw>,
    comment_times: Vec<u64>,
    deleted_comments: u64,
    any_foreign_comment: bool,
}

struct Emitter {
    window: AnalysisWindow,
    posts: Vec<PostRecord>,
    comments: Vec<CommentRecord>,
    drafts: Vec<PostDraft>,
    comment_seq: u64,
    subreddit_cuts: Vec<(u64, String)>,
    removed_bodies: u64,
}

impl Emitter {
    fn new(config: &SynthConfig) -> Self {
        let mut cuts = Vec::new();
        let mut acc = 0u64;
        if config.subreddits.is_empty() {
            cuts.push((config.n_posts, "synth".to_string()));
        } else {
            for spec in &config.subreddits {
                acc += spec.size;
                cuts.push((acc, spec.name.clone()));
            }
        }
        Self {
            window: config.window,
            posts: Vec::with_capacity(config.n_posts as usize),
            comments: Vec::new(),
            drafts: Vec::new(),
            comment_seq: 0,
            subreddit_cuts: cuts,
            removed_bodies: 0,
        }
    }

    fn subreddit_of(&self, post_index: u64) -> &str {
        for (cut, name) in &self.subreddit_cuts {
            if post_index < *cut {
                return name;
            }
        }
        &self.subreddit_cuts.last().expect("at least one subreddit").1
    }

    fn cap(&self, t: u64) -> u64 {
        t.min(self.window.end_utc - 1)
    }

    fn add_post(&mut self, author: &str, created_utc: u64, score: i64, cyborg: bool) -> usize {
        let index = self.posts.len() as u64;
        let name = format!("t3_s{index:07}");
        let t = self.cap(created_utc.max(self.window.start_utc));
        self.posts.push(PostRecord {
            name,
            author: author.to_string(),
            created_utc: t,
            num_comments: 0, // fixed up in finish()
            subreddit: self.subreddit_of(index).to_string(),
            score,
            title: format!("synthetic post {index}"),
            selftext: String::new(),
        });
        self.drafts.push(PostDraft {
            author: author.to_string(),
            created_utc: t,
            score,
            cyborg,
            limelight_target: None,
            hog_is_post_author: None,
            burst_law: None,
            comment_times: Vec::new(),
            deleted_comments: 0,
            any_foreign_comment: false,
        });
        self.posts.len() - 1
    }

    fn add_comment(
        &mut self,
        post: usize,
        author: &str,
        created_utc: u64,
        parent_id: Option<String>,
        body: String,
    ) -> String {
        let name = format!("t1_c{:08}", self.comment_seq);
        self.comment_seq += 1;
        let t = self.cap(created_utc);
        let link_id = self.posts[post].name.clone();
        let subreddit = self.posts[post].subreddit.clone();
        let draft = &mut self.drafts[post];
        draft.comment_times.push(t);
        if body == crate::record::DELETED_BODY || body == crate::record::REMOVED_BODY {
            draft.deleted_comments += 1;
            if body == crate::record::REMOVED_BODY {
                self.removed_bodies += 1;
            }
        }
        if author != draft.author {
            draft.any_foreign_comment = true;
        }
        self.comments.push(CommentRecord {
            name: name.clone(),
            author: author.to_string(),
            created_utc: t,
            link_id: link_id.clone(),
            parent_id: parent_id.unwrap_or(link_id),
            body,
            subreddit,
            score: 1,
        });
        name
    }

    /// Comment addressed to a post id that never exists in the dump.
    fn add_disconnected_comment(&mut self, author: &str, created_utc: u64, ghost: &str) {
        let name = format!("t1_c{:08}", self.comment_seq);
        self.comment_seq += 1;
        self.comments.push(CommentRecord {
            name,
            author: author.to_string(),
            created_utc: self.cap(created_utc),
            link_id: ghost.to_string(),
            parent_id: ghost.to_string(),
            body: "points nowhere".to_string(),
            subreddit: "synth".to_string(),
            score: 1,
        });
    }
}

fn filler_text(chars: usize) -> String {
    // Plain letters with spaces; never matches the link patterns.
    let words = ["lorem", "ipsum", "dolor", "sit", "amet", "consectetur"];
    let mut s = String::with_capacity(chars + 8);
    let mut i = 0;
    while s.chars().count() < chars {
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(words[i % words.len()]);
        i += 1;
    }
    s.truncate(chars.max(1));
    s
}

/// Generate the synthetic corpus described by `config`.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput, SynthError> {
    config.validate()?;
    let window = config.window;
    let span = window.span_secs();
    // Non-burst posts spread over the first fifth of the window.
    let creation_step = (span / 5 / config.n_posts.max(1)).max(1);
    let created_at = |i: u64| window.start_utc + 1 + i * creation_step;

    let mut em = Emitter::new(config);
    let mut authors: BTreeMap<String, AuthorTruth> = BTreeMap::new();
    let mut bg_rng = stream(config.seed, "background");
    let mut pool_rng = stream(config.seed, "pool");

    let commenter_pool = config.background.commenter_pool;
    let mut next_commenter = {
        let mut k = 0u64;
        move || {
            k += 1;
            format!("u_bgc{:04}", k % commenter_pool)
        }
    };

    // --- cyborg posts -----------------------------------------------------
    for i in 0..config.cyborg.count {
        let author = format!("u_cy{i:04}");
        let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, true);
        let t0 = em.drafts[idx].created_utc;
        em.add_comment(
            idx,
            &author,
            t0 + config.cyborg.latency_secs,
            None,
            filler_text(config.cyborg.comment_chars),
        );
        if i < config.cyborg.successful {
            if i % 2 == 0 {
                let fan = next_commenter();
                em.add_comment(idx, &fan, t0 + 3_600, None, "a reply from elsewhere".into());
            } else {
                // Success through votes instead of comments.
                em.posts[idx].score = 5;
                em.drafts[idx].score = 5;
            }
        }
    }

    // --- same-author fast short posts --------------------------------------
    for i in 0..config.fast_self_short.count {
        let author = format!("u_fss{i:04}");
        let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, false);
        let t0 = em.drafts[idx].created_utc;
        em.add_comment(
            idx,
            &author,
            t0 + config.fast_self_short.latency_secs,
            None,
            "bump".to_string(),
        );
        if i < config.fast_self_short.successful {
            if i % 2 == 0 {
                let fan = next_commenter();
                em.add_comment(idx, &fan, t0 + 7_200, None, "noticed this".into());
            } else {
                em.posts[idx].score = 3;
                em.drafts[idx].score = 3;
            }
        }
    }

    // --- fast foreign first comments ----------------------------------------
    for i in 0..config.fast_other.count {
        let author = format!("u_fo{i:04}");
        let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, false);
        let t0 = em.drafts[idx].created_utc;
        let fan = format!("u_foc{i:04}");
        em.add_comment(idx, &fan, t0 + config.fast_other.latency_secs, None, "first!".into());
    }

    // --- lifecycle archetypes ----------------------------------------------
    let lc = config.lifecycle;
    let lifecycle_specs: Vec<EvolutionClass> = [
        (EvolutionClass::EarlyBloomer, lc.early),
        (EvolutionClass::Steady, lc.steady),
        (EvolutionClass::LateBloomer, lc.late),
    ]
    .into_iter()
    .flat_map(|(class, count)| std::iter::repeat_n(class, count as usize))
    .collect();
    for (i, class) in lifecycle_specs.iter().enumerate() {
        let author = format!("u_lcp{i:04}");
        let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, false);
        let t0 = em.drafts[idx].created_utc;
        let n = lc.comments_per_post;
        let needed = ((lc.fraction * n as f64).ceil() as u64).clamp(1, n);
        match class {
            EvolutionClass::EarlyBloomer => {
                // The crossing comment lands well inside the early period;
                // stragglers trickle in over the following days.
                let early_span = lc.early_secs.saturating_sub(400).max(1);
                for j in 0..needed {
                    let t = t0 + 60 + j * early_span / needed.max(1);
                    let who = next_commenter();
                    em.add_comment(idx, &who, t, None, "quick reaction".into());
                }
                for j in needed..n {
                    let t = t0 + 2 * lc.early_secs + (j - needed) * 3_600;
                    let who = next_commenter();
                    em.add_comment(idx, &who, t, None, "late reaction".into());
                }
            }
            EvolutionClass::Steady | EvolutionClass::LateBloomer => {
                // Uniform arrivals whose crossing quantile hits the middle of
                // the steady band, or 1.5x the late threshold.
                let target = if *class == EvolutionClass::Steady {
                    (lc.early_secs + lc.late_secs) / 2
                } else {
                    lc.late_secs + lc.late_secs / 2
                };
                let total_span = (target as f64 / lc.fraction.max(0.01)) as u64;
                for j in 1..=n {
                    let t = t0 + j * total_span / n;
                    let who = next_commenter();
                    em.add_comment(idx, &who, t, None, "measured reaction".into());
                }
            }
        }
    }

    // --- limelight trees -----------------------------------------------------
    let ll = config.limelight;
    let dominant = (ll.dominant_fraction * ll.total_comments as f64).round() as u64;
    for i in 0..ll.count {
        let author = format!("u_llp{i:04}");
        let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, false);
        let t0 = em.drafts[idx].created_utc;
        let hog_is_author = i < ll.hog_same_author;
        let rest = ll.total_comments - dominant;
        let others = ll.first_level.saturating_sub(1);
        let mut t = t0 + 30;
        for branch in 0..ll.first_level {
            let size = if branch == 0 {
                dominant
            } else {
                // Spread the remainder as evenly as possible.
                rest / others + u64::from(branch - 1 < rest % others)
            };
            if size == 0 {
                continue;
            }
            let branch_author = if branch == 0 {
                if hog_is_author {
                    author.clone()
                } else {
                    format!("u_llh{i:04}")
                }
            } else {
                next_commenter()
            };
            t += 10;
            let mut parent =
                em.add_comment(idx, &branch_author, t, None, "branch opener".into());
            for _ in 1..size {
                t += 10;
                let who = next_commenter();
                parent =
                    em.add_comment(idx, &who, t, Some(parent), "branch reply".into());
            }
        }
        let draft = &mut em.drafts[idx];
        draft.limelight_target = Some(ll.dominant_fraction);
        draft.hog_is_post_author = Some(hog_is_author);
    }

    // --- bursty posts --------------------------------------------------------
    for (g, group) in config.bursty_posts.iter().enumerate() {
        for k in 0..group.count {
            let author = format!("u_bpp{g:02}_{k:02}");
            let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, false);
            let t0 = em.drafts[idx].created_utc;
            let mut rng = stream(config.seed, &format!("bursty_post/{g}/{k}"));
            let intervals = group.law.sample_intervals(&mut rng, group.events as usize - 1);
            let mut t = t0 + 30;
            let who = next_commenter();
            em.add_comment(idx, &who, t, None, "arrival".into());
            for tau in intervals {
                t += tau;
                let who = next_commenter();
                em.add_comment(idx, &who, t, None, "arrival".into());
            }
            em.drafts[idx].burst_law = Some(group.law);
        }
    }

    // --- controversial posts ---------------------------------------------------
    let cv = config.controversial;
    for i in 0..cv.count + cv.mild_count {
        let author = format!("u_cvp{i:04}");
        let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, false);
        let t0 = em.drafts[idx].created_utc;
        let deleted = if i < cv.count { cv.deleted_per_post } else { cv.mild_deleted_per_post };
        for j in 0..cv.comments_per_post {
            let t = t0 + 30 + j * 120;
            let body = if j < deleted {
                if j % 2 == 0 { crate::record::DELETED_BODY } else { crate::record::REMOVED_BODY }
                    .to_string()
            } else {
                "heated but intact".to_string()
            };
            let who = next_commenter();
            em.add_comment(idx, &who, t, None, body);
        }
    }

    // --- bursty posting authors -------------------------------------------------
    for (g, group) in config.bursty_authors.posting.iter().enumerate() {
        for k in 0..group.count {
            let author = format!("u_bap{g:02}_{k:02}");
            let mut rng = stream(config.seed, &format!("bursty_posting/{g}/{k}"));
            let intervals = group.law.sample_intervals(&mut rng, group.events as usize - 1);
            let mut t = window.start_utc + 1 + (g as u64 * 97 + k * 9_973) % (span / 10);
            em.add_post(&author, t, 1, false);
            for tau in intervals {
                t += tau;
                em.add_post(&author, t, 1, false);
            }
            authors.entry(author).or_default().posting_law = Some(group.law);
        }
    }

    // --- background posts ---------------------------------------------------------
    let n_background = config.n_posts - em.posts.len() as u64;
    let bg = config.background;
    let mut background_indices = Vec::with_capacity(n_background as usize);
    for i in 0..n_background {
        let author = if bg.deleted_author_every > 0 && i % bg.deleted_author_every == 0 {
            DELETED_AUTHOR.to_string()
        } else {
            format!("u_bgp{:04}", pool_rng.random_range(0..bg.post_author_pool))
        };
        let idx = em.add_post(&author, created_at(em.posts.len() as u64), 1, false);
        background_indices.push(idx);
        let t0 = em.drafts[idx].created_utc;
        let n_comments = bg_rng.random_range(0..=bg.max_comments);
        for j in 0..n_comments {
            let t = t0 + 30 + j * bg_rng.random_range(40..400);
            // Occasionally the post author follows up, well past the
            // fast-comment horizon.
            let who = if bg_rng.random_bool(0.1) && author != DELETED_AUTHOR {
                author.clone()
            } else {
                next_commenter()
            };
            em.add_comment(idx, &who, t, None, "ambient chatter".into());
        }
    }

    // --- bursty commenting authors (ride on background posts) ----------------------
    for (g, group) in config.bursty_authors.commenting.iter().enumerate() {
        for k in 0..group.count {
            let author = format!("u_bac{g:02}_{k:02}");
            let mut rng = stream(config.seed, &format!("bursty_commenting/{g}/{k}"));
            let intervals = group.law.sample_intervals(&mut rng, group.events as usize - 1);
            // Streams start after every background post already exists.
            let mut t = window.start_utc + span / 4 + (g as u64 * 131 + k * 17_389) % (span / 20);
            let mut event = 0u64;
            let post_of = |event: u64, k: u64| {
                background_indices
                    [((k * 7_919 + event * 31) % background_indices.len() as u64) as usize]
            };
            em.add_comment(post_of(event, k), &author, t, None, "drive-by".into());
            for tau in intervals {
                t += tau;
                event += 1;
                em.add_comment(post_of(event, k), &author, t, None, "drive-by".into());
            }
            authors.entry(author).or_default().commenting_law = Some(group.law);
        }
    }

    // --- orphan and disconnected plants ----------------------------------------------
    for i in 0..config.orphan_comments {
        let idx = background_indices[(i as usize * 13) % background_indices.len().max(1)];
        let t0 = em.drafts[idx].created_utc;
        let who = next_commenter();
        em.add_comment(
            idx,
            &who,
            t0 + 500 + i,
            Some(format!("t1_void{i:04}")),
            "reply to nothing".into(),
        );
    }
    for i in 0..config.disconnected_comments {
        let who = next_commenter();
        em.add_disconnected_comment(&who, window.start_utc + span / 3 + i, &format!("t3_void{i:04}"));
    }

    // --- finalize ------------------------------------------------------------------
    let mut truth_posts = BTreeMap::new();
    let mut zero = 0u64;
    let mut one = 0u64;
    let mut deleted_posts = 0u64;
    for (idx, draft) in em.drafts.iter().enumerate() {
        let record = &mut em.posts[idx];
        let n = draft.comment_times.len() as u64;
        record.num_comments = n;
        match n {
            0 => zero += 1,
            1 => one += 1,
            _ => {}
        }
        if record.has_deleted_author() {
            deleted_posts += 1;
        }
        let successful = draft.any_foreign_comment || draft.score != 1;
        let (lifecycle, t75_seconds) = if n >= lc.min_comments {
            let mut times = draft.comment_times.clone();
            times.sort_unstable();
            let k = ((lc.fraction * n as f64).ceil() as u64).clamp(1, n);
            let t75 = times[k as usize - 1].saturating_sub(draft.created_utc);
            let class = if t75 <= lc.early_secs {
                EvolutionClass::EarlyBloomer
            } else if t75 > lc.late_secs {
                EvolutionClass::LateBloomer
            } else {
                EvolutionClass::Steady
            };
            (Some(class), Some(t75))
        } else {
            (None, None)
        };
        let (controversial, controversiality) = if n > 0 {
            let score = draft.deleted_comments as f64 / n as f64;
            (Some(score > cv.theta), Some(score))
        } else {
            (None, None)
        };
        truth_posts.insert(
            record.name.clone(),
            PostTruth {
                cyborg: draft.cyborg,
                successful,
                n_comments: n,
                lifecycle,
                t75_seconds,
                limelight_target: draft.limelight_target,
                hog_is_post_author: draft.hog_is_post_author,
                controversial,
                controversiality,
                burst_law: draft.burst_law,
            },
        );
    }

    // Every planted lifecycle class must have come out as intended.
    let mut class_counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    for truth in truth_posts.values() {
        if let Some(class) = truth.lifecycle {
            *class_counts.entry(class.as_str()).or_insert(0) += 1;
        }
    }
    let bursty_lifecycle: u64 = config
        .bursty_posts
        .iter()
        .filter(|gr| gr.events >= lc.min_comments)
        .map(|gr| gr.count)
        .sum();
    let expected_lifecycle = lc.early + lc.steady + lc.late + bursty_lifecycle;
    let labeled: u64 = class_counts.values().sum();
    if labeled < expected_lifecycle {
        return Err(invalid(format!(
            "lifecycle plant produced {labeled} labeled posts, expected at least {expected_lifecycle}"
        )));
    }

    let n_in_window_comments = em.comments.len() as u64;
    let retained = n_in_window_comments - config.disconnected_comments;
    let expected_stats = BasicStats {
        n_posts: config.n_posts,
        n_deleted_author_posts: deleted_posts,
        n_zero_comment_posts: zero,
        n_one_comment_posts: one,
        n_comments: n_in_window_comments,
        n_comments_on_period_posts: retained,
        n_disconnected_posts: config.disconnected_comments, // distinct ghost ids
        n_removed_comments: em.removed_bodies,
    };

    let ground_truth = GroundTruth {
        seed: config.seed,
        params: TruthParams {
            cyborg_latency_max_secs: 6,
            cyborg_min_chars: 100,
            lifecycle_fraction: lc.fraction,
            lifecycle_early_secs: lc.early_secs,
            lifecycle_late_secs: lc.late_secs,
            lifecycle_min_comments: lc.min_comments,
            theta: cv.theta,
        },
        expected_stats,
        expected_orphan_comments: config.orphan_comments,
        posts: truth_posts,
        authors,
    };

    Ok(SynthOutput { posts: em.posts, comments: em.comments, ground_truth })
}

/// Serialize records as newline-delimited JSON.
pub fn write_records<T: Serialize, W: Write + ?Sized>(records: &[T], w: &mut W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyborg::{is_cyborg_like, CyborgThresholds};
    use crate::ingest::{build_corpus, corpus_stats, parse_comment_line, parse_post_line};
    use crate::tree::DiscussionTree;

    fn small_config() -> SynthConfig {
        SynthConfig {
            n_posts: 400,
            cyborg: CyborgPlant { count: 10, successful: 4, ..Default::default() },
            fast_self_short: FastSelfShortPlant { count: 5, successful: 2, ..Default::default() },
            fast_other: FastOtherPlant { count: 5, ..Default::default() },
            lifecycle: LifecyclePlant {
                early: 2,
                steady: 2,
                late: 2,
                comments_per_post: 60,
                min_comments: 50,
                ..Default::default()
            },
            limelight: LimelightPlant { count: 10, hog_same_author: 1, ..Default::default() },
            bursty_posts: vec![BurstGroup {
                law: IntervalLaw::Regular { spacing_secs: 600 },
                count: 2,
                events: 60,
            }],
            bursty_authors: BurstyAuthorsPlant {
                posting: vec![BurstGroup {
                    law: IntervalLaw::Regular { spacing_secs: 3_600 },
                    count: 2,
                    events: 30,
                }],
                commenting: vec![BurstGroup {
                    law: IntervalLaw::Exponential { mean_secs: 500.0 },
                    count: 2,
                    events: 40,
                }],
            },
            controversial: ControversyPlant { count: 4, mild_count: 4, ..Default::default() },
            subreddits: vec![],
            orphan_comments: 2,
            disconnected_comments: 2,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_for_same_seed() {
        let config = small_config();
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a, b);
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_records(&a.posts, &mut buf_a).unwrap();
        write_records(&b.posts, &mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn different_seed_differs() {
        let config = small_config();
        let mut other = small_config();
        other.seed = 43;
        assert_ne!(generate(&config).unwrap().comments, generate(&other).unwrap().comments);
    }

    #[test]
    fn output_parses_with_zero_skipped_lines() {
        let out = generate(&small_config()).unwrap();
        for p in &out.posts {
            let line = serde_json::to_string(p).unwrap();
            assert_eq!(&parse_post_line(&line).unwrap(), p);
        }
        for c in &out.comments {
            let line = serde_json::to_string(c).unwrap();
            assert_eq!(&parse_comment_line(&line).unwrap(), c);
        }
    }

    #[test]
    fn planted_cyborg_flags_recovered_exactly() {
        let out = generate(&small_config()).unwrap();
        let corpus =
            build_corpus(out.posts.clone(), out.comments.clone(), small_config().window);
        let by_post = corpus.comments_by_post();
        let empty = Vec::new();
        let thresholds = CyborgThresholds::default();
        let mut planted = 0;
        for (id, truth) in &out.ground_truth.posts {
            let post = &corpus.posts[id];
            let comments = by_post.get(id.as_str()).unwrap_or(&empty);
            let verdict = is_cyborg_like(post, comments, &thresholds);
            assert_eq!(verdict.is_cyborg_like, truth.cyborg, "post {id}");
            assert_eq!(verdict.is_successful, truth.successful, "post {id}");
            planted += u64::from(truth.cyborg);
        }
        assert_eq!(planted, 10);
    }

    #[test]
    fn planted_limelight_hits_target() {
        let out = generate(&small_config()).unwrap();
        let corpus =
            build_corpus(out.posts.clone(), out.comments.clone(), small_config().window);
        let by_post = corpus.comments_by_post();
        let mut seen = 0;
        for (id, truth) in &out.ground_truth.posts {
            let Some(target) = truth.limelight_target else { continue };
            seen += 1;
            let tree = DiscussionTree::build(&corpus.posts[id], &by_post[id.as_str()]);
            let measured = tree.limelight_score().unwrap();
            assert!((measured - target).abs() <= 0.01, "post {id}: {measured} vs {target}");
            let hog = tree.hog_author().unwrap();
            assert_eq!(Some(hog.same_as_post_author), truth.hog_is_post_author);
        }
        assert_eq!(seen, 10);
    }

    #[test]
    fn expected_stats_match_ingest() {
        let out = generate(&small_config()).unwrap();
        let corpus = build_corpus(out.posts, out.comments, small_config().window);
        assert_eq!(corpus_stats(&corpus), out.ground_truth.expected_stats);
        assert_eq!(
            corpus.orphan_comments.len() as u64,
            out.ground_truth.expected_orphan_comments
        );
    }

    #[test]
    fn config_validation_rejects_bad_plants() {
        let mut config = small_config();
        config.n_posts = 10;
        assert!(matches!(generate(&config), Err(SynthError::InvalidConfig(_))));

        let mut config = small_config();
        config.cyborg.comment_chars = 50;
        assert!(matches!(generate(&config), Err(SynthError::InvalidConfig(_))));

        let mut config = small_config();
        config.controversial.deleted_per_post = 5; // 5/25 = theta, not above
        assert!(matches!(generate(&config), Err(SynthError::InvalidConfig(_))));

        let mut config = small_config();
        config.subreddits = vec![SubredditSpec { name: "only".into(), size: 3 }];
        assert!(matches!(generate(&config), Err(SynthError::InvalidConfig(_))));
    }

    #[test]
    fn config_roundtrips_through_json() {
        let config = small_config();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: SynthConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
    }
}
