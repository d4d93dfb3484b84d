//! Daily runs, the 27-column record format and aggregate reports.

mod daily;
mod record;
mod report;

pub use daily::{
    assign_event_ids, manifest_file_name, one_a_day, records_file_name, run_daily, DailyError, DailyOptions, DailyRunManifest,
    DailyRunOutput,
};
pub use record::{
    header_line, read_records, write_records, ActorColumns, EventRecord, Inconsistency, RecordError, RecordJson,
    COLUMNS,
};
pub use report::{
    daily_counts, entity_filter, load_records_files, quad_histogram, report, top_n, ReportError, ReportKind,
    ReportOptions, DEFAULT_TOP_N,
};
