//! Per-post discussion trees and their structural metrics.
//!
//! The post is the root at level 0; comments attach through `parent_id`.
//! Comments whose parent chain never reaches the root (missing parents or
//! cycles among comments) hang off a synthetic orphan root and are excluded
//! from depth, breadth, and limelight, with counts reported on the tree.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::Corpus;
use crate::record::{CommentRecord, PostRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("post has no first-level comments")]
    NoFirstLevelComments,
}

#[derive(Debug, Clone)]
struct Node {
    id: String,
    author: String,
    created_utc: u64,
    // Level below the root; None for orphans.
    level: Option<u32>,
}

/// Reconstructed comment tree of one post.
#[derive(Debug, Clone)]
pub struct DiscussionTree {
    pub post_id: String,
    pub post_author: String,
    pub post_created_utc: u64,
    nodes: Vec<Node>,
    children: Vec<Vec<usize>>,
    first_level: Vec<usize>,
    orphan_count: usize,
    cycles_detected: usize,
}

impl DiscussionTree {
    /// Build the tree for `post` from its comments. Input order does not
    /// matter; duplicate comment ids keep the first occurrence.
    pub fn build(post: &PostRecord, comments: &[&CommentRecord]) -> DiscussionTree {
        let mut sorted: Vec<&CommentRecord> = comments.to_vec();
        sorted.sort_by(|a, b| {
            (a.created_utc, a.name.as_str()).cmp(&(b.created_utc, b.name.as_str()))
        });

        let mut nodes: Vec<Node> = Vec::with_capacity(sorted.len());
        let mut by_id: HashMap<&str, usize> = HashMap::with_capacity(sorted.len());
        let mut parent_ids: Vec<&str> = Vec::with_capacity(sorted.len());
        for c in &sorted {
            if by_id.contains_key(c.name.as_str()) {
                continue;
            }
            by_id.insert(c.name.as_str(), nodes.len());
            parent_ids.push(c.parent_id.as_str());
            nodes.push(Node {
                id: c.name.clone(),
                author: c.author.clone(),
                created_utc: c.created_utc,
                level: None,
            });
        }

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        let mut first_level: Vec<usize> = Vec::new();
        for (idx, parent) in parent_ids.iter().enumerate() {
            if *parent == post.name {
                first_level.push(idx);
            } else if let Some(&p) = by_id.get(parent) {
                if p != idx {
                    children[p].push(idx);
                }
            }
            // else: parent unknown, resolved as orphan below
        }

        // BFS from the root assigns levels to every reachable node.
        let mut queue: Vec<usize> = first_level.clone();
        for &i in &queue {
            nodes[i].level = Some(1);
        }
        let mut head = 0;
        while head < queue.len() {
            let i = queue[head];
            head += 1;
            let level = nodes[i].level.unwrap() + 1;
            for &ch in &children[i] {
                if nodes[ch].level.is_none() {
                    nodes[ch].level = Some(level);
                    queue.push(ch);
                }
            }
        }

        // Unreached nodes are orphans; walk their parent chains to report
        // cycles distinctly from plain missing parents.
        let orphan_count = nodes.iter().filter(|n| n.level.is_none()).count();
        let mut cycles_detected = 0;
        if orphan_count > 0 {
            // 0 = unseen, 1 = in current walk, 2 = resolved
            let mut color = vec![0u8; nodes.len()];
            for start in 0..nodes.len() {
                if nodes[start].level.is_some() || color[start] != 0 {
                    continue;
                }
                let mut walk = Vec::new();
                let mut cur = start;
                loop {
                    color[cur] = 1;
                    walk.push(cur);
                    match by_id.get(parent_ids[cur]) {
                        Some(&p) if nodes[p].level.is_none() => match color[p] {
                            0 => cur = p,
                            1 => {
                                cycles_detected += 1;
                                break;
                            }
                            _ => break,
                        },
                        // Parent reached the root, is missing, or is the
                        // post id of another thread: chain ends here.
                        _ => break,
                    }
                }
                for i in walk {
                    color[i] = 2;
                }
            }
        }

        DiscussionTree {
            post_id: post.name.clone(),
            post_author: post.author.clone(),
            post_created_utc: post.created_utc,
            nodes,
            children,
            first_level,
            orphan_count,
            cycles_detected,
        }
    }

    /// Number of comments attached below the root (orphans excluded).
    pub fn comment_count(&self) -> u64 {
        (self.nodes.len() - self.orphan_count) as u64
    }

    pub fn orphan_count(&self) -> usize {
        self.orphan_count
    }

    pub fn cycles_detected(&self) -> usize {
        self.cycles_detected
    }

    /// Maximum nesting length of replies; 0 when the post has no comments.
    pub fn depth(&self) -> u32 {
        self.nodes.iter().filter_map(|n| n.level).max().unwrap_or(0)
    }

    /// Maximum number of comments at any single level; 0 with no comments.
    pub fn breadth(&self) -> u32 {
        let mut width: HashMap<u32, u32> = HashMap::new();
        for n in &self.nodes {
            if let Some(level) = n.level {
                *width.entry(level).or_insert(0) += 1;
            }
        }
        width.values().copied().max().unwrap_or(0)
    }

    // Size of each first-level comment's subtree, the comment itself included.
    fn first_level_subtree_sizes(&self) -> Vec<u64> {
        self.first_level
            .iter()
            .map(|&root| {
                let mut size = 0u64;
                let mut stack = vec![root];
                while let Some(i) = stack.pop() {
                    if self.nodes[i].level.is_none() {
                        continue;
                    }
                    size += 1;
                    stack.extend(&self.children[i]);
                }
                size
            })
            .collect()
    }

    /// Share of the post's comments held by the largest first-level subtree.
    pub fn limelight_score(&self) -> Result<f64, TreeError> {
        let sizes = self.first_level_subtree_sizes();
        let total: u64 = sizes.iter().sum();
        match sizes.iter().max() {
            Some(&max) if total > 0 => Ok(max as f64 / total as f64),
            _ => Err(TreeError::NoFirstLevelComments),
        }
    }

    /// Author of the first-level comment owning the largest subtree. Ties
    /// break by earliest `created_utc`, then lexicographic comment id.
    pub fn hog_author(&self) -> Result<HogAuthor, TreeError> {
        let sizes = self.first_level_subtree_sizes();
        let best = self
            .first_level
            .iter()
            .zip(&sizes)
            .max_by(|(a, sa), (b, sb)| {
                let na = &self.nodes[**a];
                let nb = &self.nodes[**b];
                sa.cmp(sb)
                    .then_with(|| nb.created_utc.cmp(&na.created_utc))
                    .then_with(|| nb.id.cmp(&na.id))
            })
            .ok_or(TreeError::NoFirstLevelComments)?;
        let node = &self.nodes[*best.0];
        Ok(HogAuthor {
            author: node.author.clone(),
            same_as_post_author: node.author == self.post_author,
        })
    }

    /// All structural metrics in one pass, for report rows.
    pub fn metrics(&self) -> TreeMetrics {
        let (limelight_score, hog) = match self.hog_author() {
            Ok(hog) => (Some(self.limelight_score().expect("hog implies first level")), Some(hog)),
            Err(_) => (None, None),
        };
        TreeMetrics {
            post_id: self.post_id.clone(),
            n_comments: self.comment_count(),
            depth: self.depth(),
            breadth: self.breadth(),
            limelight_score,
            hog,
            orphan_count: self.orphan_count as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HogAuthor {
    pub author: String,
    pub same_as_post_author: bool,
}

/// Per-post structural metrics row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeMetrics {
    pub post_id: String,
    pub n_comments: u64,
    pub depth: u32,
    pub breadth: u32,
    pub limelight_score: Option<f64>,
    pub hog: Option<HogAuthor>,
    pub orphan_count: u64,
}

/// Tree metrics for every post in the corpus, in post-id order. Per-post
/// trees are independent, so they build in parallel.
pub fn corpus_tree_metrics(corpus: &Corpus) -> Vec<TreeMetrics> {
    let by_post = corpus.comments_by_post();
    let empty: Vec<&CommentRecord> = Vec::new();
    corpus
        .sorted_post_ids()
        .par_iter()
        .map(|id| {
            let comments = by_post.get(*id).unwrap_or(&empty);
            DiscussionTree::build(&corpus.posts[*id], comments).metrics()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn post(name: &str, author: &str, t: u64) -> PostRecord {
        PostRecord {
            name: name.to_string(),
            author: author.to_string(),
            created_utc: t,
            num_comments: 0,
            subreddit: "s".into(),
            score: 1,
            title: String::new(),
            selftext: String::new(),
        }
    }

    fn comment(name: &str, author: &str, t: u64, parent: &str) -> CommentRecord {
        CommentRecord {
            name: name.to_string(),
            author: author.to_string(),
            created_utc: t,
            link_id: "t3_p".to_string(),
            parent_id: parent.to_string(),
            body: String::new(),
            subreddit: "s".into(),
            score: 1,
        }
    }

    fn build(post_rec: &PostRecord, comments: &[CommentRecord]) -> DiscussionTree {
        let refs: Vec<&CommentRecord> = comments.iter().collect();
        DiscussionTree::build(post_rec, &refs)
    }

    // Independent oracle: per-comment parent-chain walking, full
    // materialization of levels and first-level ancestors.
    pub(super) struct Oracle {
        pub levels: Vec<Option<(u32, usize)>>, // (level, first-level ancestor index)
    }

    pub(super) fn oracle(post_id: &str, comments: &[CommentRecord]) -> Oracle {
        let mut by_id = HashMap::new();
        for (i, c) in comments.iter().enumerate() {
            by_id.entry(c.name.as_str()).or_insert(i);
        }
        let levels = comments
            .iter()
            .enumerate()
            .map(|(i, _)| {
                if by_id[comments[i].name.as_str()] != i {
                    return None; // duplicate id, dropped
                }
                let mut hops = 0u32;
                let mut cur = i;
                loop {
                    hops += 1;
                    if hops as usize > comments.len() + 1 {
                        return None; // cycle
                    }
                    let parent = comments[cur].parent_id.as_str();
                    if parent == post_id {
                        return Some((hops, cur));
                    }
                    match by_id.get(parent) {
                        Some(&p) if p != cur => cur = p,
                        _ => return None, // missing parent or self-loop
                    }
                }
            })
            .collect();
        Oracle { levels }
    }

    pub(super) fn oracle_metrics(
        post_id: &str,
        comments: &[CommentRecord],
    ) -> (u32, u32, Option<f64>) {
        let o = oracle(post_id, comments);
        let mut width: HashMap<u32, u32> = HashMap::new();
        let mut subtree: HashMap<usize, u64> = HashMap::new();
        let mut total = 0u64;
        for lv in o.levels.iter().flatten() {
            *width.entry(lv.0).or_insert(0) += 1;
            *subtree.entry(lv.1).or_insert(0) += 1;
            total += 1;
        }
        let depth = width.keys().copied().max().unwrap_or(0);
        let breadth = width.values().copied().max().unwrap_or(0);
        let limelight = subtree
            .values()
            .copied()
            .max()
            .filter(|_| total > 0)
            .map(|m| m as f64 / total as f64);
        (depth, breadth, limelight)
    }

    #[test]
    fn chain_and_star() {
        let p = post("t3_p", "op", 10);
        let chain: Vec<CommentRecord> = (0..5)
            .map(|i| {
                let parent = if i == 0 { "t3_p".to_string() } else { format!("t1_{}", i - 1) };
                comment(&format!("t1_{i}"), "u", 20 + i, &parent)
            })
            .collect();
        let t = build(&p, &chain);
        assert_eq!(t.depth(), 5);
        assert_eq!(t.breadth(), 1);

        let star: Vec<CommentRecord> =
            (0..7).map(|i| comment(&format!("t1_{i}"), "u", 20 + i, "t3_p")).collect();
        let t = build(&p, &star);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.breadth(), 7);
        assert_eq!(t.limelight_score().unwrap(), 1.0 / 7.0);
    }

    #[test]
    fn nested_levels() {
        let p = post("t3_p", "op", 10);
        let comments =
            vec![comment("t1_c1", "u1", 20, "t3_p"), comment("t1_c2", "u2", 30, "t1_c1")];
        let t = build(&p, &comments);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.comment_count(), 2);
    }

    #[test]
    fn cycle_detected_and_orphaned() {
        let p = post("t3_p", "op", 10);
        let comments =
            vec![comment("t1_c1", "u1", 20, "t1_c2"), comment("t1_c2", "u2", 30, "t1_c1")];
        let t = build(&p, &comments);
        assert_eq!(t.orphan_count(), 2);
        assert_eq!(t.cycles_detected(), 1);
        assert_eq!(t.comment_count(), 0);
        assert_eq!(t.depth(), 0);
        assert_eq!(t.limelight_score(), Err(TreeError::NoFirstLevelComments));
    }

    #[test]
    fn missing_parent_is_orphan_without_cycle() {
        let p = post("t3_p", "op", 10);
        let comments =
            vec![comment("t1_c1", "u1", 20, "t3_p"), comment("t1_c2", "u2", 30, "t1_gone")];
        let t = build(&p, &comments);
        assert_eq!(t.orphan_count(), 1);
        assert_eq!(t.cycles_detected(), 0);
        assert_eq!(t.comment_count(), 1);
    }

    #[test]
    fn limelight_examples() {
        let p = post("t3_p", "op", 10);
        // Subtree sizes [5, 3, 2]: branches are chains below three
        // first-level comments.
        let mut comments = Vec::new();
        for (branch, size) in [(0u32, 5u32), (1, 3), (2, 2)] {
            for i in 0..size {
                let name = format!("t1_b{branch}_{i}");
                let parent = if i == 0 {
                    "t3_p".to_string()
                } else {
                    format!("t1_b{branch}_{}", i - 1)
                };
                comments.push(comment(&name, "u", 20 + u64::from(branch * 10 + i), &parent));
            }
        }
        let t = build(&p, &comments);
        assert_eq!(t.limelight_score().unwrap(), 0.5);

        let single = vec![comment("t1_only", "u", 20, "t3_p")];
        assert_eq!(build(&p, &single).limelight_score().unwrap(), 1.0);

        let four: Vec<CommentRecord> =
            (0..4).map(|i| comment(&format!("t1_{i}"), "u", 20 + i, "t3_p")).collect();
        assert_eq!(build(&p, &four).limelight_score().unwrap(), 0.25);
    }

    #[test]
    fn hog_author_tie_breaks_by_time() {
        let p = post("t3_p", "op", 0);
        // Two equal subtrees of size 4; u2's root is earlier.
        let mut comments = Vec::new();
        for (branch, author, t0) in [("a", "u1", 10u64), ("b", "u2", 5)] {
            for i in 0..4 {
                let name = format!("t1_{branch}{i}");
                let parent =
                    if i == 0 { "t3_p".to_string() } else { format!("t1_{branch}{}", i - 1) };
                comments.push(comment(&name, author, t0 + i as u64, &parent));
            }
        }
        let hog = build(&p, &comments).hog_author().unwrap();
        assert_eq!(hog.author, "u2");
        assert!(!hog.same_as_post_author);
    }

    #[test]
    fn hog_author_same_as_post_author_flag() {
        let p = post("t3_p", "op", 0);
        let comments = vec![comment("t1_x", "op", 5, "t3_p")];
        let hog = build(&p, &comments).hog_author().unwrap();
        assert!(hog.same_as_post_author);
    }

    #[test]
    fn metrics_match_oracle_on_random_trees() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for round in 0..200 {
            let p = post("t3_p", "op", 1);
            let n = rng.random_range(1..400usize);
            let mut comments: Vec<CommentRecord> = Vec::with_capacity(n);
            for i in 0..n {
                let parent = if i == 0 || rng.random_bool(0.3) {
                    "t3_p".to_string()
                } else if rng.random_bool(0.02) {
                    format!("t1_missing{i}")
                } else {
                    format!("t1_{}", rng.random_range(0..i))
                };
                comments.push(comment(&format!("t1_{i}"), "u", 10 + i as u64, &parent));
            }
            let t = build(&p, &comments);
            let (depth, breadth, limelight) = oracle_metrics("t3_p", &comments);
            assert_eq!(t.depth(), depth, "round {round}");
            assert_eq!(t.breadth(), breadth, "round {round}");
            assert_eq!(t.limelight_score().ok(), limelight, "round {round}");
            let sizes: u64 = t.first_level_subtree_sizes().iter().sum();
            assert_eq!(sizes, t.comment_count());
        }
    }

    proptest! {
        #[test]
        fn depth_breadth_bound_and_permutation_invariance(
            n in 1usize..120,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = post("t3_p", "op", 1);
            let mut comments: Vec<CommentRecord> = Vec::with_capacity(n);
            for i in 0..n {
                let parent = if i == 0 || rng.random_bool(0.4) {
                    "t3_p".to_string()
                } else {
                    format!("t1_{}", rng.random_range(0..i))
                };
                comments.push(comment(&format!("t1_{i}"), "u", 10 + i as u64, &parent));
            }
            let t = build(&p, &comments);
            prop_assert!(u64::from(t.depth()) * u64::from(t.breadth()) >= t.comment_count());

            let score = t.limelight_score().unwrap();
            let n_first = t.first_level.len() as f64;
            prop_assert!(score >= 1.0 / n_first - 1e-12);
            prop_assert!(score <= 1.0);
            prop_assert_eq!(score == 1.0, t.first_level.len() == 1);

            comments.reverse();
            let r = build(&p, &comments);
            prop_assert_eq!(t.metrics(), r.metrics());
        }
    }
}
