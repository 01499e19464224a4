//! Operational shell around the `sigmadb` engine: script runner, catalog
//! persistence, result rendering, interactive REPL and the HTTP service.

pub mod config;
pub mod error;
pub mod http;
pub mod persist;
pub mod render;
pub mod repl;
pub mod script;

pub use config::{EngineConfig, OutputFormat};
pub use error::ServiceError;
pub use persist::{load_catalog, render_catalog, save_catalog};
pub use script::{explain, run_file, run_script, Executed, ScriptOutput};
