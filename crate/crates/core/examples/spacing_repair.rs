//! Snapping surrogates to presets and repairing minimum-spacing conflicts.

use fires::geometry::{repair_spacing, spacing_violations, ApertureConfig, Placement};

fn main() -> fires::Result<()> {
    let lambda = 0.0857;
    let cfg = ApertureConfig::new(0.5, 0.5, (3, 3), (12, 12), lambda, lambda / 2.0)?;
    println!(
        "pitch {:.4} m, minimum spacing {:.4} m",
        cfg.pitch_h(),
        cfg.min_spacing
    );

    // Push the first two columns and rows onto their shared borders.
    let mut y = Vec::new();
    for m in 0..cfg.num_elements() {
        let (col, row) = (m % 3, m / 3);
        let toward = |i: usize| match i {
            0 => 1.0,
            _ => 0.0,
        };
        y.extend_from_slice(&[toward(col), toward(row)]);
    }
    let raw = Placement::from_surrogate(&cfg, &y)?;
    println!("violations before repair: {}", spacing_violations(&cfg, &raw));
    let (fixed, residual) = repair_spacing(&cfg, &raw);
    println!("violations after repair:  {residual}");
    for (m, (a, b)) in raw.positions().iter().zip(fixed.positions()).enumerate() {
        if a != b {
            println!("  element {m}: ({:.3}, {:.3}) -> ({:.3}, {:.3})", a[0], a[1], b[0], b[1]);
        }
    }
    Ok(())
}
