//! Subject locality within a chunk.
//!
//! The window of a subject is the number of quads one has to read past its
//! first quad to have seen all of them: `last ordinal - first ordinal`.
//! [`WindowTracker`] measures the distribution in one pass and
//! [`NodeAssembler`] groups quads into nodes with a bounded buffer.

mod assemble;
mod window;

pub use assemble::{assemble_nodes, AssembledNode, AssemblyConfig, AssemblyStats, NodeAssembler, DEFAULT_WINDOW};
pub use window::{min_window, window_distribution, WindowStats, WindowTracker};
