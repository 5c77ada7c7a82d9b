//! Ingestion of event data and run-off triangles, the reversed-time
//! transform, and the discrete occurrence/exposure construction.

mod events;
mod grid;
mod triangle;

pub use events::{format_events, load_events, parse_events, save_events, Event, EventSample};
pub use grid::{
    build_occurrence_exposure, cell_centers, masked_marginal, masked_total,
    OccurrenceExposureGrid,
};
pub use triangle::{
    bin_events, format_triangle, load_triangle, parse_triangle, save_triangle, RunoffTriangle,
};
