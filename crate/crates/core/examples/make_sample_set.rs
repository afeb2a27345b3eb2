//! Regenerates the bundled sample set:
//! `cargo run -p wecsf --example make_sample_set -- crates/core/testdata/sample_set`

use std::path::PathBuf;

use wecsf::synthetic::{sample_set, write_dataset};

fn main() -> wecsf::Result<()> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/testdata/sample_set")));
    let samples = sample_set(10, 320, 240, 20_240_601)?;
    write_dataset(&out, "sample-set", &samples, true)?;
    println!("wrote {} samples to {}", samples.len(), out.display());
    Ok(())
}
