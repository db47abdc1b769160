//! IO, file formats, and the benchmark harness around `sparsecluster-core`.

pub mod bench;
pub mod formats;
