//! Regenerates the bundled assets: the rounded-rectangle test part and the
//! matching example configuration.
//!
//! Run from the workspace root: `cargo run -p fixtcp-core --example export_assets`

use std::path::Path;

use fixtcp_core::io::{write_config_json, write_polygon_csv};
use fixtcp_core::parts::default_test_part;
use fixtcp_core::trajectory::PlannerConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets");
    std::fs::create_dir_all(&dir)?;

    let part = default_test_part(1000);
    write_polygon_csv(&dir.join("rounded_rectangle.csv"), &part)?;
    write_config_json(&dir.join("config.json"), &PlannerConfig::example())?;

    println!("wrote {}", dir.display());
    Ok(())
}
