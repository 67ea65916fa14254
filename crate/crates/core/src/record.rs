//! Dump record types and the analysis window.
//!
//! Field names follow the dump schema verbatim so records serialize back to
//! valid dump rows (`parse(serialize(r))` round-trips every field).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Marker the platform substitutes for an absent author identity.
pub const DELETED_AUTHOR: &str = "[deleted]";
/// Body marker left behind when the comment author deletes the text.
pub const DELETED_BODY: &str = "[deleted]";
/// Body marker left behind when a moderator removes the text.
pub const REMOVED_BODY: &str = "[removed]";

/// Id prefix for posts ("t3_...").
pub const POST_PREFIX: &str = "t3_";
/// Id prefix for comments ("t1_...").
pub const COMMENT_PREFIX: &str = "t1_";

/// One post row of a dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRecord {
    pub name: String,
    pub author: String,
    pub created_utc: u64,
    pub num_comments: u64,
    pub subreddit: String,
    pub score: i64,
    pub title: String,
    pub selftext: String,
}

/// One comment row of a dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentRecord {
    pub name: String,
    pub author: String,
    pub created_utc: u64,
    pub link_id: String,
    pub parent_id: String,
    pub body: String,
    pub subreddit: String,
    pub score: i64,
}

/// True for the deleted marker or an absent identity.
pub fn is_deleted_author(author: &str) -> bool {
    author == DELETED_AUTHOR || author.is_empty()
}

impl PostRecord {
    pub fn has_deleted_author(&self) -> bool {
        is_deleted_author(&self.author)
    }
}

impl CommentRecord {
    pub fn has_deleted_author(&self) -> bool {
        is_deleted_author(&self.author)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("analysis window must satisfy start_utc < end_utc")]
pub struct InvalidWindow;

/// Half-open time window `[start_utc, end_utc)` in UNIX seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisWindow {
    pub start_utc: u64,
    pub end_utc: u64,
}

impl AnalysisWindow {
    pub fn new(start_utc: u64, end_utc: u64) -> Result<Self, InvalidWindow> {
        if start_utc < end_utc {
            Ok(Self { start_utc, end_utc })
        } else {
            Err(InvalidWindow)
        }
    }

    pub fn contains(&self, t: u64) -> bool {
        self.start_utc <= t && t < self.end_utc
    }

    pub fn span_secs(&self) -> u64 {
        self.end_utc - self.start_utc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_rejects_empty_range() {
        assert_eq!(AnalysisWindow::new(10, 10), Err(InvalidWindow));
        assert_eq!(AnalysisWindow::new(10, 5), Err(InvalidWindow));
        assert!(AnalysisWindow::new(0, 1).is_ok());
    }

    #[test]
    fn window_is_half_open() {
        let w = AnalysisWindow::new(100, 200).unwrap();
        assert!(w.contains(100));
        assert!(w.contains(199));
        assert!(!w.contains(200));
        assert!(!w.contains(99));
    }

    #[test]
    fn deleted_author_marker() {
        assert!(is_deleted_author("[deleted]"));
        assert!(is_deleted_author(""));
        assert!(!is_deleted_author("someone"));
    }
}
