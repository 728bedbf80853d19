//! Writes the coding-theory benchmark instances as DIMACS files.
//!
//! Usage: `cargo run --example coding_instances -- [OUT_DIR]`
//! (default `data/coding`). Produces the transposition-channel conflict
//! graphs 1tc.64/128/256 and 1et.64/128, plus the deletion graph 1dc.128.

use std::env;
use std::fs;
use std::path::PathBuf;

use thetahyb_core::coding::{deletion_code_graph, transposition_code_graph};
use thetahyb_core::graph::write_dimacs;
use thetahyb_core::Graph;

fn main() -> std::io::Result<()> {
    let out_dir = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data/coding"));
    fs::create_dir_all(&out_dir)?;

    let instances: Vec<(&str, Graph)> = vec![
        ("1tc.64", transposition_code_graph(6, false)),
        ("1et.64", transposition_code_graph(6, true)),
        ("1tc.128", transposition_code_graph(7, false)),
        ("1et.128", transposition_code_graph(7, true)),
        ("1dc.128", deletion_code_graph(7)),
        ("1tc.256", transposition_code_graph(8, false)),
    ];
    for (name, g) in instances {
        let path = out_dir.join(format!("{name}.dimacs"));
        fs::write(&path, write_dimacs(&g))?;
        println!("{}: n={} m={}", path.display(), g.n(), g.m());
    }
    Ok(())
}
