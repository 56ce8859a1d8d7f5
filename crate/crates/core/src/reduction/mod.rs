//! Model-size reduction: contiguous temporal segmentation and build-year aggregation.

mod aggregate;
mod segment;

pub use aggregate::{aggregate_build_years, aggregate_result, disaggregate, exempt_assets, AggregationMap};
pub use segment::{apply_segmentation, apply_segmentation_doc, document_series, network_series, segment, Segmentation};
