use fires::geometry::{
    preset_position, repair_spacing, snap, spacing_violations, surrogate_of, ApertureConfig,
    Placement, PresetIndex,
};
use proptest::prelude::*;

fn aperture() -> impl Strategy<Value = ApertureConfig> {
    (1usize..5, 1usize..5, 1usize..9, 1usize..9, 0.2f64..2.0, 0.0f64..0.3).prop_map(
        |(sh, sv, ph, pv, side, spacing_frac)| {
            let lambda = 0.1;
            ApertureConfig::new(side, side * 0.75, (sh, sv), (ph, pv), lambda, spacing_frac * lambda)
                .unwrap()
        },
    )
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[test]
fn reference_rayleigh_distance() {
    let cfg = ApertureConfig::square(1.0, 6, 100, 3.5e9).unwrap();
    // 2 D² / λ with a 1 m side at 3.5 GHz.
    let lambda = 299_792_458.0 / 3.5e9;
    assert!((cfg.rayleigh_distance() - 2.0 / lambda).abs() < 1e-9);
    assert!((cfg.rayleigh_distance() - 23.35).abs() < 0.01);
}

#[test]
fn centre_presets_sit_near_subarea_centres() {
    let cfg = ApertureConfig::square(1.0, 6, 100, 3.5e9).unwrap();
    let side = 1.0 / 6.0;
    for m in 0..cfg.num_elements() {
        let p = preset_position(&cfg, cfg.center_preset(m)).unwrap();
        let (col, row) = (m % 6, m / 6);
        let c = [(col as f64 + 0.5) * side, (row as f64 + 0.5) * side];
        assert!(dist(p, c) <= cfg.pitch_h().hypot(cfg.pitch_v()), "subarea {m}");
    }
}

proptest! {
    #[test]
    fn map_and_unmap_are_inverse(cfg in aperture(), pick in 0.0f64..1.0) {
        let linear = ((cfg.total_presets() as f64 * pick) as usize).min(cfg.total_presets() - 1);
        let coord = cfg.unmap_index(linear).unwrap();
        prop_assert_eq!(cfg.map_index(coord).unwrap(), linear);
        prop_assert!(cfg.map_index((cfg.grid_h(), 0)).is_err());
        prop_assert!(cfg.unmap_index(cfg.total_presets()).is_err());
    }

    #[test]
    fn snap_picks_a_nearest_preset(cfg in aperture(), sub in 0.0f64..1.0, y in prop::array::uniform2(0.0f64..=1.0)) {
        let m = ((cfg.num_elements() as f64 * sub) as usize).min(cfg.num_elements() - 1);
        let idx = snap(&cfg, m, y).unwrap();
        prop_assert_eq!(idx.subarea, m);
        // Compare in surrogate space, where presets are evenly spread.
        let target = y;
        let got = surrogate_of(&cfg, idx);
        let d_got = dist(got, target);
        for local in 0..cfg.presets_per_subarea() {
            let other = surrogate_of(&cfg, PresetIndex { subarea: m, local });
            let ax = (other[0] - target[0]).abs() + 1e-12 >= (got[0] - target[0]).abs();
            let ay = (other[1] - target[1]).abs() + 1e-12 >= (got[1] - target[1]).abs();
            prop_assert!(ax && ay, "preset {local} beats the snap on an axis");
            prop_assert!(dist(other, target) + 1e-12 >= d_got);
        }
    }

    #[test]
    fn snap_is_idempotent(cfg in aperture(), sub in 0.0f64..1.0, y in prop::array::uniform2(0.0f64..=1.0)) {
        let m = ((cfg.num_elements() as f64 * sub) as usize).min(cfg.num_elements() - 1);
        let idx = snap(&cfg, m, y).unwrap();
        prop_assert_eq!(snap(&cfg, m, surrogate_of(&cfg, idx)).unwrap(), idx);
    }

    #[test]
    fn repair_never_adds_violations(cfg in aperture(), ys in prop::collection::vec(0.0f64..=1.0, 32)) {
        let y: Vec<f64> = ys.iter().cycle().take(2 * cfg.num_elements()).copied().collect();
        let raw = Placement::from_surrogate(&cfg, &y).unwrap();
        let before = spacing_violations(&cfg, &raw);
        let (fixed, residual) = repair_spacing(&cfg, &raw);
        prop_assert!(residual <= before);
        prop_assert_eq!(residual, spacing_violations(&cfg, &fixed));
        for (m, idx) in fixed.active().iter().enumerate() {
            prop_assert_eq!(idx.subarea, m);
            prop_assert!(idx.local < cfg.presets_per_subarea());
        }
    }
}

#[test]
fn edge_presets_of_neighbours_get_repaired() {
    let lambda = 0.1;
    // Pitch 1/19 m is below the 0.08 m spacing.
    let cfg = ApertureConfig::new(1.0, 1.0, (2, 2), (10, 10), lambda, 0.8 * lambda).unwrap();
    // Subareas 0 and 1 share a vertical border; put both elements on it.
    let active = vec![
        PresetIndex { subarea: 0, local: 9 },
        PresetIndex { subarea: 1, local: 0 },
        cfg.center_preset(2),
        cfg.center_preset(3),
    ];
    let raw = Placement::new(&cfg, active).unwrap();
    assert_eq!(spacing_violations(&cfg, &raw), 1);
    let (fixed, residual) = repair_spacing(&cfg, &raw);
    assert_eq!(residual, 0);
    assert_eq!(fixed.active()[0], raw.active()[0], "the first element of a pair stays put");
    let moved = fixed.positions()[1];
    assert!(dist(moved, fixed.positions()[0]) >= cfg.min_spacing);
}
