//! Renders the λ = 0.5 slice to `slice.png` and `slice.csv` in the current
//! directory, or under the prefix given as the first argument.

use capture_atlas::atlas::{render_slice, AtlasConfig, SliceSpec};
use num_complex::Complex64;

fn main() -> capture_atlas::Result<()> {
    let prefix = std::env::args().nth(1).unwrap_or_else(|| "slice".into());
    let spec = SliceSpec { lambda: Complex64::new(0.5, 0.0), window: [-3.0, 3.0, -3.0, 3.0], width: 256, height: 256 };
    let render = render_slice(&spec, &AtlasConfig::for_slices(), None)?;
    render.write(std::path::Path::new(&prefix))?;
    for (label, count) in render.counts() {
        println!("{label:>26} {count}");
    }
    Ok(())
}
