//! File formats, language-model backends, fixtures, rendering and the
//! benchmark harness around [`grop_core`].

pub mod backend;
pub mod bench;
pub mod fixtures;
pub mod io;
pub mod svg;
