//! Event coding from constituency parses: treebank reader, dictionaries,
//! coder, enrichment, document store and the daily pipeline.

pub mod codes;
pub mod coder;
pub mod dictionaries;
pub mod enrich;
pub mod pipeline;
pub mod store;
pub mod synthetic;
pub mod treebank;

pub use codes::{ActorCode, CameoCode, CodeError};
pub use coder::{code_sentence, code_story, compose_codes, CodedEvent, CodingOutcome, SkipReason};
pub use dictionaries::{load_dictionaries, DictionaryError, DictionaryPaths, DictionarySet};
pub use enrich::{decompose_actor, quad_class, EnrichError, EnrichTables, Gazetteer, GoldsteinTable};
pub use pipeline::{run_daily, DailyOptions, EventRecord};
pub use store::{DocStatus, DocumentStore, StoryDocument};
pub use treebank::{parse_treebank, ParseTree};
