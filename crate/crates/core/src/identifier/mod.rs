//! Open-loop data generation, regression records, validation and deadzone selection.

mod config;
mod dataset;
mod excite;
mod validate;

pub use config::{train_on_series, IdentConfig, TrainOutcome};
pub use dataset::{
    build_regression_set, dataset_csv, parse_dataset, read_dataset, split, write_dataset,
};
pub use excite::{excite_and_record, Excitation, ExcitationPlan};
pub use validate::{cross_validate, select_deadzone, ValidationReport, DEADZONE_FLOOR};
