//! Phantoms, file formats and run configuration.

pub mod config;
pub mod field;
pub mod pgm;
pub mod phantom;
pub mod trace;

pub use config::{PhantomChoice, RunConfig, FORMAT_VERSION};
pub use field::{read_field, read_scalar_field, write_field, FieldData};
pub use pgm::{pgm_to_string, render_pgm};
pub use phantom::{make_phantom, Inclusion, PhantomKind, PhantomSpec, Shape};
pub use trace::{parse_trace_csv, read_trace_csv, trace_to_csv, write_trace_csv, TRACE_HEADER};
