//! Inter-event times and the burstiness measure
//! `B = (sigma - mu) / (sigma + mu)` over them: -1 for a perfectly regular
//! sequence, 0 for Poisson-like arrivals, approaching 1 for the most bursty.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::hist::{HistError, RangeHistogram};
use crate::ingest::Corpus;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("need at least two events to form intervals")]
    TooFewEvents,
    #[error("all events are simultaneous; burstiness undefined")]
    DegenerateSeries,
}

/// What the event series describes; tags report rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    AuthorPosting,
    AuthorCommenting,
    PostComments,
}

impl SeriesKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesKind::AuthorPosting => "posting",
            SeriesKind::AuthorCommenting => "commenting",
            SeriesKind::PostComments => "post-comments",
        }
    }
}

/// Consecutive differences of a sorted timestamp sequence.
pub fn interevent_times(timestamps: &[u64]) -> Result<Vec<u64>, SeriesError> {
    if timestamps.len() < 2 {
        return Err(SeriesError::TooFewEvents);
    }
    debug_assert!(timestamps.windows(2).all(|w| w[0] <= w[1]));
    Ok(timestamps.windows(2).map(|w| w[1] - w[0]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BurstinessResult {
    pub n_events: u64,
    pub n_intervals: u64,
    /// Mean interval in seconds.
    pub mean: f64,
    /// Population standard deviation in seconds.
    pub stddev: f64,
    /// Dimensionless burstiness in [-1, 1).
    pub b: f64,
}

/// Burstiness of an interval sequence. Population moments, two-pass, so a
/// constant sequence yields `sigma == 0` and `b == -1` exactly.
pub fn burstiness(intervals: &[f64]) -> Result<BurstinessResult, SeriesError> {
    if intervals.is_empty() {
        return Err(SeriesError::TooFewEvents);
    }
    let n = intervals.len() as f64;
    let mean = intervals.iter().sum::<f64>() / n;
    let var = intervals.iter().map(|&t| (t - mean) * (t - mean)).sum::<f64>() / n;
    let stddev = var.sqrt();
    if stddev + mean == 0.0 {
        return Err(SeriesError::DegenerateSeries);
    }
    Ok(BurstinessResult {
        n_events: intervals.len() as u64 + 1,
        n_intervals: intervals.len() as u64,
        mean,
        stddev,
        b: (stddev - mean) / (stddev + mean),
    })
}

/// Burstiness straight from a sorted timestamp sequence.
pub fn burstiness_from_timestamps(timestamps: &[u64]) -> Result<BurstinessResult, SeriesError> {
    let taus = interevent_times(timestamps)?;
    let taus: Vec<f64> = taus.into_iter().map(|t| t as f64).collect();
    burstiness(&taus)
}

/// Burstiness results for every qualifying entity of one kind.
#[derive(Debug, Clone)]
pub struct BurstinessRollup {
    pub kind: SeriesKind,
    /// Per-entity results in owner-id order.
    pub results: BTreeMap<String, BurstinessResult>,
    /// Histogram of `b` over entities.
    pub histogram: RangeHistogram,
    /// Mean of `b` over entities; `None` when nothing qualified.
    pub mean_b: Option<f64>,
    pub skipped_below_threshold: u64,
    pub skipped_degenerate: u64,
}

fn rollup(
    kind: SeriesKind,
    mut series: HashMap<String, Vec<u64>>,
    min_events: u64,
    hist_bins: usize,
) -> Result<BurstinessRollup, HistError> {
    let mut histogram = RangeHistogram::new(-1.0, 1.0, hist_bins)?;
    let mut skipped_below_threshold = 0u64;
    let mut qualifying: Vec<(String, Vec<u64>)> = Vec::new();
    for (owner, timestamps) in series.drain() {
        if (timestamps.len() as u64) < min_events {
            skipped_below_threshold += 1;
        } else {
            qualifying.push((owner, timestamps));
        }
    }
    qualifying.sort_by(|a, b| a.0.cmp(&b.0));

    let computed: Vec<(String, Result<BurstinessResult, SeriesError>)> = qualifying
        .into_par_iter()
        .map(|(owner, mut timestamps)| {
            timestamps.sort_unstable();
            (owner, burstiness_from_timestamps(&timestamps))
        })
        .collect();

    let mut results = BTreeMap::new();
    let mut skipped_degenerate = 0u64;
    let mut sum_b = 0.0;
    for (owner, res) in computed {
        match res {
            Ok(r) => {
                histogram.add(r.b);
                sum_b += r.b;
                results.insert(owner, r);
            }
            Err(_) => skipped_degenerate += 1,
        }
    }
    let mean_b = (!results.is_empty()).then(|| sum_b / results.len() as f64);
    Ok(BurstinessRollup {
        kind,
        results,
        histogram,
        mean_b,
        skipped_below_threshold,
        skipped_degenerate,
    })
}

/// Burstiness of each author's posting times (authors with at least
/// `min_posts` posts; the deleted marker is not an author).
pub fn author_posting_burstiness(
    corpus: &Corpus,
    min_posts: u64,
    hist_bins: usize,
) -> Result<BurstinessRollup, HistError> {
    let mut series: HashMap<String, Vec<u64>> = HashMap::new();
    for post in corpus.posts.values() {
        if !post.has_deleted_author() {
            series.entry(post.author.clone()).or_default().push(post.created_utc);
        }
    }
    rollup(SeriesKind::AuthorPosting, series, min_posts, hist_bins)
}

/// Burstiness of each author's commenting times (at least `min_comments`).
pub fn author_commenting_burstiness(
    corpus: &Corpus,
    min_comments: u64,
    hist_bins: usize,
) -> Result<BurstinessRollup, HistError> {
    let mut series: HashMap<String, Vec<u64>> = HashMap::new();
    for c in corpus.comments.values() {
        if !c.has_deleted_author() {
            series.entry(c.author.clone()).or_default().push(c.created_utc);
        }
    }
    rollup(SeriesKind::AuthorCommenting, series, min_comments, hist_bins)
}

/// Burstiness of comment arrivals on each post with at least `min_comments`
/// comments, regardless of commenter.
pub fn post_comment_burstiness(
    corpus: &Corpus,
    min_comments: u64,
    hist_bins: usize,
) -> Result<BurstinessRollup, HistError> {
    let mut series: HashMap<String, Vec<u64>> = HashMap::new();
    for c in corpus.comments.values() {
        series.entry(c.link_id.clone()).or_default().push(c.created_utc);
    }
    rollup(SeriesKind::PostComments, series, min_comments, hist_bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_corpus;
    use crate::record::{AnalysisWindow, CommentRecord, PostRecord};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Exp, Pareto};

    #[test]
    fn interevent_basics() {
        assert_eq!(interevent_times(&[0, 10, 20, 30]).unwrap(), vec![10, 10, 10]);
        assert_eq!(interevent_times(&[0, 1, 10]).unwrap(), vec![1, 9]);
        assert_eq!(interevent_times(&[5]), Err(SeriesError::TooFewEvents));
    }

    #[test]
    fn regular_sequence_is_minus_one_exactly() {
        let r = burstiness(&[10.0, 10.0, 10.0]).unwrap();
        assert_eq!(r.b, -1.0);
        assert_eq!(r.stddev, 0.0);
    }

    #[test]
    fn hand_computed_example() {
        let r = burstiness(&[1.0, 9.0]).unwrap();
        assert_eq!(r.mean, 5.0);
        assert_eq!(r.stddev, 4.0);
        assert!((r.b - (-1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_series_rejected() {
        assert_eq!(burstiness(&[0.0, 0.0, 0.0]), Err(SeriesError::DegenerateSeries));
        assert_eq!(
            burstiness_from_timestamps(&[7, 7, 7]),
            Err(SeriesError::DegenerateSeries)
        );
    }

    #[test]
    fn some_zero_intervals_allowed() {
        let r = burstiness_from_timestamps(&[0, 0, 10]).unwrap();
        assert!(r.b > -1.0 && r.b < 1.0);
    }

    #[test]
    fn exponential_intervals_near_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let exp = Exp::new(1.0 / 600.0).unwrap();
        let taus: Vec<f64> = (0..100_000).map(|_| exp.sample(&mut rng)).collect();
        let r = burstiness(&taus).unwrap();
        assert!(r.b.abs() < 0.02, "b = {}", r.b);
    }

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

    fn comment(name: &str, author: &str, t: u64, link: &str) -> CommentRecord {
        CommentRecord {
            name: name.to_string(),
            author: author.to_string(),
            created_utc: t,
            link_id: link.to_string(),
            parent_id: link.to_string(),
            body: "x".into(),
            subreddit: "s".into(),
            score: 1,
        }
    }

    #[test]
    fn posting_rollup_threshold_and_regular_author() {
        let mut posts = Vec::new();
        // Regular author: 100 posts an hour apart.
        for i in 0..100u64 {
            posts.push(post(&format!("t3_r{i}"), "metronome", 1000 + i * 3600));
        }
        // Below threshold: 99 posts.
        for i in 0..99u64 {
            posts.push(post(&format!("t3_b{i}"), "casual", 1000 + i * 3600));
        }
        let corpus =
            build_corpus(posts, vec![], AnalysisWindow::new(1, 10_000_000).unwrap());
        let rollup = author_posting_burstiness(&corpus, 100, 40).unwrap();
        assert_eq!(rollup.results.len(), 1);
        assert_eq!(rollup.results["metronome"].b, -1.0);
        assert_eq!(rollup.skipped_below_threshold, 1);
        assert_eq!(rollup.mean_b, Some(-1.0));
        assert_eq!(rollup.histogram.total(), 1);
    }

    #[test]
    fn commenting_rollup_and_post_rollup() {
        let mut posts = vec![post("t3_hub", "op", 500)];
        let mut comments = Vec::new();
        for i in 0..500u64 {
            comments.push(comment(&format!("t1_{i}"), "chatter", 1000 + i * 60, "t3_hub"));
        }
        posts.push(post("t3_quiet", "op2", 600));
        comments.push(comment("t1_solo", "chatter2", 700, "t3_quiet"));
        let corpus =
            build_corpus(posts, comments, AnalysisWindow::new(1, 10_000_000).unwrap());

        let authors = author_commenting_burstiness(&corpus, 500, 40).unwrap();
        assert_eq!(authors.results.len(), 1);
        assert_eq!(authors.results["chatter"].b, -1.0);

        let posts_rollup = post_comment_burstiness(&corpus, 500, 40).unwrap();
        assert_eq!(posts_rollup.results.len(), 1);
        assert_eq!(posts_rollup.results["t3_hub"].b, -1.0);
        assert_eq!(posts_rollup.results["t3_hub"].n_events, 500);
    }

    #[test]
    fn pareto_arrivals_measure_bursty() {
        // Monte Carlo check with a frozen draw: heavy-tailed intervals
        // (alpha = 1.5) push B well above the Poisson baseline.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let pareto: Pareto<f64> = Pareto::new(50.0, 1.5).unwrap();
        let mut t = 1_000u64;
        let mut comments = Vec::with_capacity(1_000);
        comments.push(comment("t1_arr0", "u0", t, "t3_hot"));
        for i in 1..1_000 {
            t += pareto.sample(&mut rng).round().max(1.0) as u64;
            comments.push(comment(&format!("t1_arr{i}"), &format!("u{i}"), t, "t3_hot"));
        }
        let corpus = build_corpus(
            vec![post("t3_hot", "op", 900)],
            comments,
            AnalysisWindow::new(1, 100_000_000).unwrap(),
        );
        let rollup = post_comment_burstiness(&corpus, 500, 40).unwrap();
        let b = rollup.results["t3_hot"].b;
        assert!(b > 0.3, "heavy-tailed arrivals gave B = {b}");
    }

    #[test]
    fn deleted_marker_not_an_author() {
        let posts: Vec<PostRecord> =
            (0..150u64).map(|i| post(&format!("t3_d{i}"), "[deleted]", 1000 + i)).collect();
        let corpus =
            build_corpus(posts, vec![], AnalysisWindow::new(1, 10_000_000).unwrap());
        let rollup = author_posting_burstiness(&corpus, 100, 40).unwrap();
        assert!(rollup.results.is_empty());
    }

    proptest! {
        #[test]
        fn scale_and_translation_invariance(
            seed in 0u64..500,
            n in 2usize..200,
            scale in prop::sample::select(vec![2.0f64, 10.0, 1000.0]),
            shift in 0u64..100_000,
        ) {
            use rand::Rng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut timestamps: Vec<u64> = vec![1_000];
            for _ in 0..n {
                let last = *timestamps.last().unwrap();
                timestamps.push(last + rng.random_range(0..5_000));
            }
            prop_assume!(timestamps.windows(2).any(|w| w[1] > w[0]));

            let base = burstiness_from_timestamps(&timestamps).unwrap();
            prop_assert!((-1.0..1.0).contains(&base.b));

            let taus: Vec<f64> =
                interevent_times(&timestamps).unwrap().into_iter().map(|t| t as f64).collect();
            let scaled: Vec<f64> = taus.iter().map(|t| t * scale).collect();
            let scaled_b = burstiness(&scaled).unwrap().b;
            prop_assert!((scaled_b - base.b).abs() < 1e-12);

            let shifted: Vec<u64> = timestamps.iter().map(|t| t + shift).collect();
            let shifted_b = burstiness_from_timestamps(&shifted).unwrap().b;
            prop_assert_eq!(shifted_b, base.b);
        }
    }
}
