//! Device model: coupling graph, layouts, native lowering and scheduling.

pub mod dd;
pub mod durations;
pub mod graph;
pub mod layout;
pub mod transpile;

pub use dd::{insert_dd, insert_dd_with, schedule_alap, DdReport, Insertion, Schedule};
pub use durations::DurationTable;
pub use graph::{heavy_hex_27, CouplingGraph, HEAVY_HEX_27_EDGES};
pub use layout::{enumerate_layouts, Layout, LAYOUT_COUNT, MAX_CLONES_WITH_ANCILLA};
pub use transpile::{is_native, transpile_to_native};
