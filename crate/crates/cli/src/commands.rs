//! Per-analysis report generation.

use std::collections::BTreeMap;

use anyhow::Result;
use serde_json::json;

use threadstats::authors;
use threadstats::controversy::{self, DeletionMarkers};
use threadstats::cyborg::{self, CyborgThresholds};
use threadstats::hist::BinSpec;
use threadstats::ingest::{corpus_stats, Corpus};
use threadstats::lifecycle::{self, EvolutionParams};
use threadstats::synth;
use threadstats::temporal::{self, BurstinessRollup};
use threadstats::tree;

use crate::output::{fmt_opt, fmt_opt_f64, OutputSession};
use crate::{BurstinessFlags, ControversyFlags, CyborgFlags, LifecycleFlags};

pub fn run_stats(corpus: &Corpus, session: &mut OutputSession) -> Result<()> {
    session.write_json("basic_stats.json", &corpus_stats(corpus))?;
    session.write_json(
        "ingest_diagnostics.json",
        &json!({
            "diag": corpus.diag,
            "orphan_comments": corpus.orphan_comments.len(),
        }),
    )?;
    Ok(())
}

pub fn run_tree(corpus: &Corpus, session: &mut OutputSession) -> Result<()> {
    let rows = tree::corpus_tree_metrics(corpus);
    session.write_csv(
        "tree_metrics.csv",
        &[
            "post_id",
            "n_comments",
            "depth",
            "breadth",
            "limelight_score",
            "hog_author",
            "hog_is_post_author",
        ],
        rows.iter().map(|m| {
            vec![
                m.post_id.clone(),
                m.n_comments.to_string(),
                m.depth.to_string(),
                m.breadth.to_string(),
                fmt_opt_f64(m.limelight_score),
                m.hog.as_ref().map(|h| h.author.clone()).unwrap_or_default(),
                fmt_opt(m.hog.as_ref().map(|h| h.same_as_post_author)),
            ]
        }),
    )
}

pub fn run_lifecycle(
    corpus: &Corpus,
    session: &mut OutputSession,
    flags: &LifecycleFlags,
) -> Result<()> {
    let spec = BinSpec::Log { bins_per_decade: flags.age_bins_per_decade };
    let hist = lifecycle::age_histogram(corpus, &spec)?;
    session.write_csv(
        "age_histogram.csv",
        &["bin_lo", "bin_hi", "count", "density"],
        hist.bins.iter().map(|b| {
            vec![b.lo.to_string(), b.hi.to_string(), b.count.to_string(), b.density.to_string()]
        }),
    )?;

    let params = EvolutionParams {
        fraction: flags.bloom_fraction,
        early_secs: flags.bloom_early_secs,
        late_secs: flags.bloom_late_secs,
        min_comments: flags.bloom_min_comments,
    };
    let rows = lifecycle::corpus_evolutions(corpus, &params);
    session.write_csv(
        "lifecycle.csv",
        &["post_id", "total_comments", "t75_seconds", "class"],
        rows.iter().map(|(id, ev)| {
            vec![
                id.clone(),
                ev.total_comments.to_string(),
                ev.t75_seconds.to_string(),
                ev.class.as_str().to_string(),
            ]
        }),
    )?;

    session.write_json("mayfly.json", &lifecycle::mayfly_fraction(corpus, flags.mayfly_threshold))
}

pub fn run_cyborg(corpus: &Corpus, session: &mut OutputSession, flags: &CyborgFlags) -> Result<()> {
    let thresholds = CyborgThresholds {
        latency_max_secs: flags.cyborg_latency_max,
        min_chars: flags.cyborg_min_chars,
    };
    let (verdicts, report) = cyborg::cyborg_report(corpus, &thresholds);
    session.write_csv(
        "cyborg_posts.csv",
        &["post_id", "latency", "same_author", "chars", "has_link", "cyborg_like", "successful"],
        verdicts.iter().map(|v| {
            vec![
                v.post_id.clone(),
                fmt_opt(v.first_comment_latency),
                v.same_author.to_string(),
                v.first_comment_chars.to_string(),
                v.contains_link.to_string(),
                v.is_cyborg_like.to_string(),
                v.is_successful.to_string(),
            ]
        }),
    )?;
    session.write_json("cyborg_report.json", &report)
}

fn write_rollup(
    session: &mut OutputSession,
    rollup: &BurstinessRollup,
    rows_name: &str,
    hist_name: &str,
) -> Result<()> {
    session.write_csv(
        rows_name,
        &["owner_id", "kind", "n_events", "mu", "sigma", "B"],
        rollup.results.iter().map(|(owner, r)| {
            vec![
                owner.clone(),
                rollup.kind.as_str().to_string(),
                r.n_events.to_string(),
                r.mean.to_string(),
                r.stddev.to_string(),
                r.b.to_string(),
            ]
        }),
    )?;
    session.write_csv(
        hist_name,
        &["bin_lo", "bin_hi", "count"],
        rollup.histogram.bins().iter().map(|(lo, hi, count)| {
            vec![lo.to_string(), hi.to_string(), count.to_string()]
        }),
    )
}

fn rollup_summary(rollup: &BurstinessRollup) -> serde_json::Value {
    json!({
        "kind": rollup.kind.as_str(),
        "n_entities": rollup.results.len(),
        "mean_b": rollup.mean_b,
        "skipped_below_threshold": rollup.skipped_below_threshold,
        "skipped_degenerate": rollup.skipped_degenerate,
    })
}

pub fn run_burstiness(
    corpus: &Corpus,
    session: &mut OutputSession,
    flags: &BurstinessFlags,
) -> Result<()> {
    let posting =
        temporal::author_posting_burstiness(corpus, flags.posting_min_posts, flags.b_hist_bins)?;
    let commenting = temporal::author_commenting_burstiness(
        corpus,
        flags.commenting_min_comments,
        flags.b_hist_bins,
    )?;
    let posts =
        temporal::post_comment_burstiness(corpus, flags.post_min_comments, flags.b_hist_bins)?;
    write_rollup(session, &posting, "burstiness_posting.csv", "burstiness_hist_posting.csv")?;
    write_rollup(
        session,
        &commenting,
        "burstiness_commenting.csv",
        "burstiness_hist_commenting.csv",
    )?;
    write_rollup(session, &posts, "burstiness_posts.csv", "burstiness_hist_posts.csv")?;
    session.write_json(
        "burstiness_summary.json",
        &json!({
            "posting": rollup_summary(&posting),
            "commenting": rollup_summary(&commenting),
            "post_comments": rollup_summary(&posts),
        }),
    )
}

pub fn run_authors(corpus: &Corpus, session: &mut OutputSession) -> Result<()> {
    let profiles = authors::author_profiles(corpus);
    session.write_csv(
        "authors.csv",
        &[
            "author",
            "n_posts",
            "n_comments_made",
            "A",
            "B",
            "score",
            "category",
            "avg_effective_per_post",
        ],
        profiles.values().map(|p| {
            let score = authors::interaction_score(p).ok();
            let avg = authors::effective_comments_per_post(p).ok();
            vec![
                p.author.clone(),
                p.n_posts.to_string(),
                p.n_comments_made.to_string(),
                p.n_effective_comments_received.to_string(),
                p.n_comments_on_others.to_string(),
                fmt_opt_f64(score),
                p.category.as_str().to_string(),
                fmt_opt_f64(avg.map(|(v, _)| v)),
            ]
        }),
    )?;

    let graph = authors::build_interaction_graph(corpus);
    session.write_csv(
        "interaction_edges.csv",
        &["src", "dst", "weight"],
        graph.edges.iter().map(|((src, dst), w)| {
            vec![src.clone(), dst.clone(), w.to_string()]
        }),
    )?;

    let counts = authors::author_categories(corpus);
    let rates: BTreeMap<&str, u64> =
        profiles.values().filter(|p| p.n_posts > 0).fold(BTreeMap::new(), |mut acc, p| {
            let (_, rate) = authors::effective_comments_per_post(p).expect("has posts");
            *acc.entry(rate.as_str()).or_insert(0) += 1;
            acc
        });
    session.write_json(
        "author_categories.json",
        &json!({
            "categories": counts,
            "effective_comment_rates": rates,
            "interaction_edges": graph.edge_multiplicity_total(),
        }),
    )
}

pub fn run_controversy(
    corpus: &Corpus,
    session: &mut OutputSession,
    flags: &ControversyFlags,
) -> Result<()> {
    let markers = DeletionMarkers::default();
    let scatter = controversy::controversy_scatter(corpus, flags.min_comments, &markers);
    session.write_csv(
        "controversy_scatter.csv",
        &["post_id", "n_unique_authors", "post_score", "n_comments", "popularity_category"],
        scatter.iter().map(|r| {
            vec![
                r.post_id.clone(),
                r.n_unique_authors.to_string(),
                r.post_score.to_string(),
                r.n_comments.to_string(),
                r.popularity_category.to_string(),
            ]
        }),
    )?;

    let subs = controversy::subreddit_controversy_table(
        corpus,
        flags.theta,
        flags.min_subreddit_posts,
        &markers,
    );
    session.write_csv(
        "subreddit_controversy.csv",
        &["subreddit", "n_posts", "n_scored_posts", "n_controversial", "fraction", "popularity_category"],
        subs.iter().map(|r| {
            vec![
                r.subreddit.clone(),
                r.n_posts.to_string(),
                r.n_scored_posts.to_string(),
                r.n_controversial.to_string(),
                r.fraction.to_string(),
                r.popularity_category.to_string(),
            ]
        }),
    )?;

    let authors_table = controversy::author_controversy_table(
        corpus,
        flags.theta,
        flags.min_author_posts,
        &markers,
    );
    session.write_csv(
        "author_controversy.csv",
        &["author", "n_posts", "n_scored_posts", "n_controversial", "fraction"],
        authors_table.iter().map(|r| {
            vec![
                r.author.clone(),
                r.n_posts.to_string(),
                r.n_scored_posts.to_string(),
                r.n_controversial.to_string(),
                r.fraction.to_string(),
            ]
        }),
    )
}

/// Returns (n_posts, n_comments) written.
pub fn run_synth(
    config: &synth::SynthConfig,
    session: &mut OutputSession,
) -> Result<(u64, u64)> {
    let output = synth::generate(config)?;
    session.write_lines("posts.jsonl", |w| synth::write_records(&output.posts, w))?;
    session.write_lines("comments.jsonl", |w| synth::write_records(&output.comments, w))?;
    session.write_json("ground_truth.json", &output.ground_truth)?;
    Ok((output.posts.len() as u64, output.comments.len() as u64))
}
