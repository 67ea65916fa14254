//! Author activity profiles, the comment interaction graph, and interaction
//! scores.
//!
//! The deleted marker aggregates many former identities, so it gets no
//! profile and no graph node; edges and the A/B counts behind the interaction
//! score only connect identifiable authors.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Corpus;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("interaction score undefined: author neither received nor made effective comments")]
    Undefined,
    #[error("author has no posts")]
    NoPosts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuthorCategory {
    ProducerOnly,
    ConsumerOnly,
    Both,
}

impl AuthorCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            AuthorCategory::ProducerOnly => "producer_only",
            AuthorCategory::ConsumerOnly => "consumer_only",
            AuthorCategory::Both => "both",
        }
    }
}

/// Activity profile of one author.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuthorProfile {
    pub author: String,
    pub n_posts: u64,
    pub n_comments_made: u64,
    /// A: comments received on own posts from other identifiable authors.
    pub n_effective_comments_received: u64,
    /// B: comments made on other identifiable authors' posts.
    pub n_comments_on_others: u64,
    pub category: AuthorCategory,
}

/// `A / (A + B)`: 0 for pure outward commenters, 1 for authors who only
/// receive, 0.5 at parity.
pub fn interaction_score(profile: &AuthorProfile) -> Result<f64, ScoreError> {
    let a = profile.n_effective_comments_received;
    let b = profile.n_comments_on_others;
    if a + b == 0 {
        return Err(ScoreError::Undefined);
    }
    Ok(a as f64 / (a + b) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EffectiveRate {
    LessThanOnePerPost,
    ExactlyOnePerPost,
    MoreThanOnePerPost,
}

impl EffectiveRate {
    pub fn as_str(&self) -> &'static str {
        match self {
            EffectiveRate::LessThanOnePerPost => "less_than_one",
            EffectiveRate::ExactlyOnePerPost => "exactly_one",
            EffectiveRate::MoreThanOnePerPost => "more_than_one",
        }
    }
}

/// Average effective comments received per post, with its comparison class.
pub fn effective_comments_per_post(
    profile: &AuthorProfile,
) -> Result<(f64, EffectiveRate), ScoreError> {
    if profile.n_posts == 0 {
        return Err(ScoreError::NoPosts);
    }
    let a = profile.n_effective_comments_received;
    let avg = a as f64 / profile.n_posts as f64;
    let rate = match a.cmp(&profile.n_posts) {
        std::cmp::Ordering::Less => EffectiveRate::LessThanOnePerPost,
        std::cmp::Ordering::Equal => EffectiveRate::ExactlyOnePerPost,
        std::cmp::Ordering::Greater => EffectiveRate::MoreThanOnePerPost,
    };
    Ok((avg, rate))
}

/// Partition counts of all active non-deleted authors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CategoryCounts {
    pub producers_only: u64,
    pub consumers_only: u64,
    pub both: u64,
    pub total_active: u64,
}

/// Directed commenter -> post-author graph with edge multiplicities.
#[derive(Debug, Clone, Default)]
pub struct InteractionGraph {
    pub nodes: BTreeSet<String>,
    /// (commenter, post author) -> number of comments.
    pub edges: BTreeMap<(String, String), u64>,
    pub in_degree: BTreeMap<String, u64>,
    pub out_degree: BTreeMap<String, u64>,
}

impl InteractionGraph {
    pub fn edge_multiplicity_total(&self) -> u64 {
        self.edges.values().sum()
    }
}

/// Profiles of every active non-deleted author, in author order.
pub fn author_profiles(corpus: &Corpus) -> BTreeMap<String, AuthorProfile> {
    let mut posts_by: BTreeMap<&str, u64> = BTreeMap::new();
    let mut comments_by: BTreeMap<&str, u64> = BTreeMap::new();
    let mut received: BTreeMap<&str, u64> = BTreeMap::new();
    let mut on_others: BTreeMap<&str, u64> = BTreeMap::new();

    for post in corpus.posts.values() {
        if !post.has_deleted_author() {
            *posts_by.entry(post.author.as_str()).or_insert(0) += 1;
        }
    }
    for c in corpus.comments.values() {
        if c.has_deleted_author() {
            continue;
        }
        *comments_by.entry(c.author.as_str()).or_insert(0) += 1;
        let post = &corpus.posts[&c.link_id];
        if !post.has_deleted_author() && post.author != c.author {
            *received.entry(post.author.as_str()).or_insert(0) += 1;
            *on_others.entry(c.author.as_str()).or_insert(0) += 1;
        }
    }

    let mut profiles = BTreeMap::new();
    let authors: BTreeSet<&str> =
        posts_by.keys().chain(comments_by.keys()).copied().collect();
    for author in authors {
        let n_posts = posts_by.get(author).copied().unwrap_or(0);
        let n_comments_made = comments_by.get(author).copied().unwrap_or(0);
        let category = match (n_posts > 0, n_comments_made > 0) {
            (true, false) => AuthorCategory::ProducerOnly,
            (false, true) => AuthorCategory::ConsumerOnly,
            _ => AuthorCategory::Both,
        };
        profiles.insert(
            author.to_string(),
            AuthorProfile {
                author: author.to_string(),
                n_posts,
                n_comments_made,
                n_effective_comments_received: received.get(author).copied().unwrap_or(0),
                n_comments_on_others: on_others.get(author).copied().unwrap_or(0),
                category,
            },
        );
    }
    profiles
}

/// Partition counts over the author profiles.
pub fn author_categories(corpus: &Corpus) -> CategoryCounts {
    let mut counts = CategoryCounts::default();
    for profile in author_profiles(corpus).values() {
        match profile.category {
            AuthorCategory::ProducerOnly => counts.producers_only += 1,
            AuthorCategory::ConsumerOnly => counts.consumers_only += 1,
            AuthorCategory::Both => counts.both += 1,
        }
        counts.total_active += 1;
    }
    counts
}

/// Build the interaction graph: an edge commenter -> post author per comment,
/// self-loops and the deleted marker excluded.
pub fn build_interaction_graph(corpus: &Corpus) -> InteractionGraph {
    let mut graph = InteractionGraph::default();
    for post in corpus.posts.values() {
        if !post.has_deleted_author() {
            graph.nodes.insert(post.author.clone());
        }
    }
    for c in corpus.comments.values() {
        if c.has_deleted_author() {
            continue;
        }
        graph.nodes.insert(c.author.clone());
        let post = &corpus.posts[&c.link_id];
        if post.has_deleted_author() || post.author == c.author {
            continue;
        }
        *graph.edges.entry((c.author.clone(), post.author.clone())).or_insert(0) += 1;
        *graph.out_degree.entry(c.author.clone()).or_insert(0) += 1;
        *graph.in_degree.entry(post.author.clone()).or_insert(0) += 1;
    }
    graph
}
