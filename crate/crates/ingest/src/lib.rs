//! Feed polling, article fetching and main-content extraction.

pub mod extract;
pub mod feeds;
pub mod fixture;
pub mod workers;

pub use extract::{extract_content, ExtractError, Extracted};
pub use feeds::{poll_feeds, FeedConfig, FeedConfigError, FeedEntry, FeedError, FetchTask, PollOutcome};
pub use fixture::FixtureServer;
pub use workers::{http_client, run_workers, IngestReport, TaskOutcome, TaskStatus, WorkerConfig, WorkerError};
