//! File formats, rendering and the command driver of the `gammafan` tool.

pub mod format;
pub mod render;
pub mod run;
