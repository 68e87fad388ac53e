//! Regenerates the bundled test images under `assets/`.

use std::path::Path;

fn main() -> rsrm::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    std::fs::create_dir_all(&dir)?;
    for (name, image) in rsrm::corpus::all() {
        let path = dir.join(format!("{name}.pgm"));
        rsrm::io::write_pgm(&path, &image, &[format!("rsrm test image: {name}")])?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
