//! Render one P-SMILES to `<stem>.svg` and `<stem>.png` in a directory.

use std::path::Path;

use polymm_core::depict::{depict, write_images, Style};

fn main() {
    let mut args = std::env::args().skip(1);
    let (Some(smiles), Some(dir)) = (args.next(), args.next()) else {
        eprintln!("usage: render <psmiles> <dir> [size]");
        std::process::exit(2);
    };
    let size = args.next().and_then(|s| s.parse().ok()).unwrap_or(1120);
    let d = depict(&smiles, size, &Style::default()).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(1);
    });
    let out = write_images(&d, Path::new(&dir), size, true).unwrap();
    println!("{}", out.svg.display());
}
