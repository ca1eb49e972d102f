//! File formats, scenarios and the command line for `zlorenz-core`.

pub mod cli;
pub mod csv;
pub mod scenario;
pub mod svg;
pub mod table;

pub use csv::{load_csv, read_csv, save_csv, to_csv_string, write_csv, CsvError};
pub use scenario::{parse_scenario, Scenario, ScenarioDoc, ScenarioError};
pub use svg::{render_svg, Axis, Projection, RenderOptions, PALETTE};
pub use table::par_chaos_table;
