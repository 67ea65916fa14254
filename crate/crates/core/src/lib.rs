//! Streaming analytics over Reddit-style post/comment dumps.
//!
//! The crate ingests newline-delimited JSON dumps, reconstructs per-post
//! discussion trees, and computes behavioral metrics: basic corpus
//! statistics, post ages and lifecycle classes, cyborg-like first-comment
//! detection, depth/breadth/limelight tree metrics, inter-event burstiness,
//! author interaction scores, and deletion-based controversiality. A seeded
//! synthetic-corpus generator plants known behaviors so every metric can be
//! verified against ground truth.
//!
//! All aggregations are mergeable: ingestion shards combine associatively and
//! reports are independent of shard boundaries and input order.

pub mod authors;
pub mod controversy;
pub mod cyborg;
pub mod hist;
pub mod ingest;
pub mod lifecycle;
pub mod record;
pub mod synth;
pub mod temporal;
pub mod tree;

pub use record::{AnalysisWindow, CommentRecord, PostRecord, DELETED_AUTHOR};
