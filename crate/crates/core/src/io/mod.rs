//! File formats: datasets, model files and explanation reports.

pub mod dataset;
pub mod model_file;
pub mod report;

pub use dataset::{load_dataset, read_dataset, Dataset, LabelColumn, LoadOptions, MinMaxScaler};
pub use model_file::{load_model, save_model, ModelFile};
pub use report::{
    read_explanation_report, write_explanation_report, AggregateRow, Report, ReportRecord,
    ReportSummary, Split,
};
