//! Aperture layout: subareas, discrete preset grids and element placement.
//!
//! The aperture spans `[0, width] x [0, height]` metres. It is tiled by
//! `subareas_h x subareas_v` disjoint subareas, each holding a rectangular
//! grid of `presets_h x presets_v` candidate positions. Concatenating all
//! subarea grids gives the global `grid_h x grid_v` preset grid whose corner
//! presets sit on the aperture corners.
//!
//! Indexing is row-major with the horizontal index running fastest, both for
//! subareas and for presets inside a subarea and on the global grid.

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical surface and its preset partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureConfig {
    /// Horizontal extent (m).
    pub width: f64,
    /// Vertical extent (m).
    pub height: f64,
    pub subareas_h: usize,
    pub subareas_v: usize,
    /// Presets per subarea along the horizontal axis.
    pub presets_h: usize,
    /// Presets per subarea along the vertical axis.
    pub presets_v: usize,
    /// Carrier wavelength (m).
    pub wavelength: f64,
    /// Minimum spacing between active elements (m).
    pub min_spacing: f64,
}

impl ApertureConfig {
    pub fn new(
        width: f64,
        height: f64,
        subareas: (usize, usize),
        presets: (usize, usize),
        wavelength: f64,
        min_spacing: f64,
    ) -> Result<Self> {
        let cfg = Self {
            width,
            height,
            subareas_h: subareas.0,
            subareas_v: subareas.1,
            presets_h: presets.0,
            presets_v: presets.1,
            wavelength,
            min_spacing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Square aperture with `side x side` subareas of `presets x presets`
    /// presets each, half-wavelength minimum spacing.
    pub fn square(
        side_m: f64,
        subareas_per_axis: usize,
        presets_per_axis: usize,
        carrier_hz: f64,
    ) -> Result<Self> {
        let wavelength = SPEED_OF_LIGHT / carrier_hz;
        Self::new(
            side_m,
            side_m,
            (subareas_per_axis, subareas_per_axis),
            (presets_per_axis, presets_per_axis),
            wavelength,
            wavelength / 2.0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("width", self.width),
            ("height", self.height),
            ("wavelength", self.wavelength),
            ("min_spacing", self.min_spacing),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("subareas_h", self.subareas_h),
            ("subareas_v", self.subareas_v),
            ("presets_h", self.presets_h),
            ("presets_v", self.presets_v),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Domain(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Number of fluid elements `M`.
    pub fn num_elements(&self) -> usize {
        self.subareas_h * self.subareas_v
    }

    pub fn presets_per_subarea(&self) -> usize {
        self.presets_h * self.presets_v
    }

    /// Global preset count along the horizontal axis (`L_h`).
    pub fn grid_h(&self) -> usize {
        self.subareas_h * self.presets_h
    }

    /// Global preset count along the vertical axis (`L_v`).
    pub fn grid_v(&self) -> usize {
        self.subareas_v * self.presets_v
    }

    pub fn total_presets(&self) -> usize {
        self.grid_h() * self.grid_v()
    }

    /// Distance between horizontally adjacent global presets.
    pub fn pitch_h(&self) -> f64 {
        self.width / (self.grid_h().saturating_sub(1).max(1)) as f64
    }

    /// Distance between vertically adjacent global presets.
    pub fn pitch_v(&self) -> f64 {
        self.height / (self.grid_v().saturating_sub(1).max(1)) as f64
    }

    /// Rayleigh distance `2A/λ`; closed-form radii below it are flagged.
    pub fn rayleigh_distance(&self) -> f64 {
        2.0 * self.width * self.height / self.wavelength
    }

    /// Maps a global grid coordinate `(n_h, n_v)` to its linear index.
    pub fn map_index(&self, coord: (usize, usize)) -> Result<usize> {
        let (nh, nv) = coord;
        if nh >= self.grid_h() {
            return Err(Error::IndexOutOfRange {
                what: "horizontal grid index",
                index: nh,
                size: self.grid_h(),
            });
        }
        if nv >= self.grid_v() {
            return Err(Error::IndexOutOfRange {
                what: "vertical grid index",
                index: nv,
                size: self.grid_v(),
            });
        }
        Ok(nv * self.grid_h() + nh)
    }

    /// Inverse of [`map_index`](Self::map_index).
    pub fn unmap_index(&self, linear: usize) -> Result<(usize, usize)> {
        if linear >= self.total_presets() {
            return Err(Error::IndexOutOfRange {
                what: "linear preset index",
                index: linear,
                size: self.total_presets(),
            });
        }
        Ok((linear % self.grid_h(), linear / self.grid_h()))
    }

    /// Position of a global grid coordinate.
    pub fn grid_position(&self, coord: (usize, usize)) -> [f64; 2] {
        [
            coord.0 as f64 * self.pitch_h(),
            coord.1 as f64 * self.pitch_v(),
        ]
    }

    /// `(subarea column, subarea row)` of subarea `m`.
    fn subarea_cell(&self, subarea: usize) -> (usize, usize) {
        (subarea % self.subareas_h, subarea / self.subareas_h)
    }

    /// Global grid coordinate of the lowest-index preset in `subarea`.
    pub fn subarea_origin(&self, subarea: usize) -> (usize, usize) {
        let (sh, sv) = self.subarea_cell(subarea);
        (sh * self.presets_h, sv * self.presets_v)
    }

    /// Global grid coordinate of a preset.
    pub fn grid_coord(&self, idx: PresetIndex) -> Result<(usize, usize)> {
        self.check_preset(idx)?;
        let (oh, ov) = self.subarea_origin(idx.subarea);
        Ok((oh + idx.local % self.presets_h, ov + idx.local / self.presets_h))
    }

    /// Preset owning a global grid coordinate.
    pub fn preset_at(&self, coord: (usize, usize)) -> Result<PresetIndex> {
        self.map_index(coord)?;
        let (sh, lh) = (coord.0 / self.presets_h, coord.0 % self.presets_h);
        let (sv, lv) = (coord.1 / self.presets_v, coord.1 % self.presets_v);
        Ok(PresetIndex {
            subarea: sv * self.subareas_h + sh,
            local: lv * self.presets_h + lh,
        })
    }

    fn check_preset(&self, idx: PresetIndex) -> Result<()> {
        if idx.subarea >= self.num_elements() {
            return Err(Error::IndexOutOfRange {
                what: "subarea",
                index: idx.subarea,
                size: self.num_elements(),
            });
        }
        if idx.local >= self.presets_per_subarea() {
            return Err(Error::IndexOutOfRange {
                what: "local preset",
                index: idx.local,
                size: self.presets_per_subarea(),
            });
        }
        Ok(())
    }

    /// Bounding box `(min, max)` of the presets in `subarea`.
    pub fn subarea_bounds(&self, subarea: usize) -> ([f64; 2], [f64; 2]) {
        let (oh, ov) = self.subarea_origin(subarea);
        let lo = self.grid_position((oh, ov));
        let hi = self.grid_position((oh + self.presets_h - 1, ov + self.presets_v - 1));
        (lo, hi)
    }

    /// Preset closest to the geometric centre of `subarea`.
    pub fn center_preset(&self, subarea: usize) -> PresetIndex {
        let h = nearest_on_axis(0.5, self.presets_h);
        let v = nearest_on_axis(0.5, self.presets_v);
        PresetIndex {
            subarea,
            local: v * self.presets_h + h,
        }
    }
}

/// A preset addressed by its subarea and its index inside that subarea.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PresetIndex {
    pub subarea: usize,
    pub local: usize,
}

/// Position of a preset in metres.
pub fn preset_position(cfg: &ApertureConfig, idx: PresetIndex) -> Result<[f64; 2]> {
    Ok(cfg.grid_position(cfg.grid_coord(idx)?))
}

// Nearest grid index for a unit coordinate on an axis of `n` presets.
// Ties go to the lower index.
fn nearest_on_axis(u: f64, n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    let t = u.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = t.floor();
    let hi = (lo + 1.0).min((n - 1) as f64);
    let pick = if t - lo <= hi - t { lo } else { hi };
    pick as usize
}

/// Projects a surrogate `y ∈ [0,1]²` onto the nearest preset of `subarea`.
///
/// The surrogate is mapped linearly onto the bounding box of the subarea's
/// presets. Because the presets form a rectangular lattice the Euclidean
/// nearest neighbour separates per axis; ties resolve to the lower index on
/// each axis, which is the smallest linear index among the tied presets.
pub fn snap(cfg: &ApertureConfig, subarea: usize, y: [f64; 2]) -> Result<PresetIndex> {
    if subarea >= cfg.num_elements() {
        return Err(Error::IndexOutOfRange {
            what: "subarea",
            index: subarea,
            size: cfg.num_elements(),
        });
    }
    let h = nearest_on_axis(y[0], cfg.presets_h);
    let v = nearest_on_axis(y[1], cfg.presets_v);
    Ok(PresetIndex {
        subarea,
        local: v * cfg.presets_h + h,
    })
}

/// Surrogate coordinates that snap exactly onto `idx`.
pub fn surrogate_of(cfg: &ApertureConfig, idx: PresetIndex) -> [f64; 2] {
    let unit = |i: usize, n: usize| {
        if n <= 1 {
            0.5
        } else {
            i as f64 / (n - 1) as f64
        }
    };
    [
        unit(idx.local % cfg.presets_h, cfg.presets_h),
        unit(idx.local / cfg.presets_h, cfg.presets_v),
    ]
}

/// One active preset per subarea.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    active: Vec<PresetIndex>,
    coords: Vec<(usize, usize)>,
    positions: Vec<[f64; 2]>,
}

impl Placement {
    /// Builds a placement; `active[m]` must belong to subarea `m`.
    pub fn new(cfg: &ApertureConfig, active: Vec<PresetIndex>) -> Result<Self> {
        if active.len() != cfg.num_elements() {
            return Err(Error::Contract(format!(
                "placement needs {} active presets, got {}",
                cfg.num_elements(),
                active.len()
            )));
        }
        let mut coords = Vec::with_capacity(active.len());
        for (m, idx) in active.iter().enumerate() {
            if idx.subarea != m {
                return Err(Error::Contract(format!(
                    "slot {m} holds a preset of subarea {}",
                    idx.subarea
                )));
            }
            coords.push(cfg.grid_coord(*idx)?);
        }
        let positions = coords.iter().map(|&c| cfg.grid_position(c)).collect();
        Ok(Self {
            active,
            coords,
            positions,
        })
    }

    /// Every element at the preset nearest its subarea centre.
    pub fn centers(cfg: &ApertureConfig) -> Self {
        let active = (0..cfg.num_elements())
            .map(|m| cfg.center_preset(m))
            .collect();
        Self::new(cfg, active).expect("centre presets are valid")
    }

    /// Snaps a `2M` surrogate vector (pairs `(y_h, y_v)` per subarea).
    pub fn from_surrogate(cfg: &ApertureConfig, y: &[f64]) -> Result<Self> {
        let m = cfg.num_elements();
        if y.len() != 2 * m {
            return Err(Error::Contract(format!(
                "surrogate length {} does not match 2M = {}",
                y.len(),
                2 * m
            )));
        }
        let active = (0..m)
            .map(|s| snap(cfg, s, [y[2 * s], y[2 * s + 1]]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cfg, active)
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn active(&self) -> &[PresetIndex] {
        &self.active
    }

    /// Global grid coordinates of the active presets.
    pub fn grid_coords(&self) -> &[(usize, usize)] {
        &self.coords
    }

    /// Element positions `(x_m, y_m)` in metres.
    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    fn set(&mut self, cfg: &ApertureConfig, slot: usize, idx: PresetIndex) {
        let c = cfg.grid_coord(idx).expect("repair picks valid presets");
        self.active[slot] = idx;
        self.coords[slot] = c;
        self.positions[slot] = cfg.grid_position(c);
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn too_close(cfg: &ApertureConfig, a: [f64; 2], b: [f64; 2]) -> bool {
    dist2(a, b).sqrt() < cfg.min_spacing
}

/// Number of element pairs closer than the minimum spacing.
pub fn spacing_violations(cfg: &ApertureConfig, placement: &Placement) -> usize {
    let pos = placement.positions();
    let mut count = 0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            if too_close(cfg, pos[i], pos[j]) {
                count += 1;
            }
        }
    }
    count
}

/// Greedy spacing repair.
///
/// Pairs are scanned once in ascending `(m, m')` order. For every pair still
/// in conflict, element `m'` moves to the preset of its subarea nearest to its
/// pre-repair position that conflicts with no other element. Failing that, it
/// takes the nearest preset that clears the pair and lowers its own conflict
/// count; otherwise it stays. Moves therefore never add violations. Returns the
/// repaired placement and the residual violation count.
pub fn repair_spacing(cfg: &ApertureConfig, placement: &Placement) -> (Placement, usize) {
    let anchors = placement.positions().to_vec();
    let mut current = placement.clone();
    let m = current.len();
    for i in 0..m {
        for j in i + 1..m {
            if !too_close(cfg, current.positions[i], current.positions[j]) {
                continue;
            }
            if let Some(idx) = relocate(cfg, &current, j, i, anchors[j]) {
                current.set(cfg, j, idx);
            }
        }
    }
    let residual = spacing_violations(cfg, &current);
    (current, residual)
}

fn relocate(
    cfg: &ApertureConfig,
    placement: &Placement,
    slot: usize,
    partner: usize,
    anchor: [f64; 2],
) -> Option<PresetIndex> {
    let pos = placement.positions();
    let (lo, hi) = cfg.subarea_bounds(slot);
    let reach = cfg.min_spacing;
    // Only elements near this subarea can conflict with any of its presets.
    let neighbours: Vec<usize> = (0..pos.len())
        .filter(|&k| k != slot)
        .filter(|&k| {
            let p = pos[k];
            p[0] >= lo[0] - reach
                && p[0] <= hi[0] + reach
                && p[1] >= lo[1] - reach
                && p[1] <= hi[1] + reach
        })
        .collect();
    let conflicts = |p: [f64; 2]| {
        neighbours
            .iter()
            .filter(|&&k| too_close(cfg, p, pos[k]))
            .count()
    };
    let own = conflicts(pos[slot]);
    let current_local = placement.active()[slot].local;
    let (oh, ov) = cfg.subarea_origin(slot);

    let candidate = |local: usize| {
        let c = (oh + local % cfg.presets_h, ov + local / cfg.presets_h);
        let p = cfg.grid_position(c);
        (dist2(p, anchor), p)
    };

    // Nearest conflict-free preset.
    let mut best: Option<(f64, usize)> = None;
    for local in 0..cfg.presets_per_subarea() {
        if local == current_local {
            continue;
        }
        let (d, p) = candidate(local);
        if best.is_some_and(|(bd, _)| d >= bd) {
            continue;
        }
        if conflicts(p) == 0 {
            best = Some((d, local));
        }
    }
    if best.is_none() {
        // Nearest preset that clears the pair and reduces own conflicts.
        for local in 0..cfg.presets_per_subarea() {
            if local == current_local {
                continue;
            }
            let (d, p) = candidate(local);
            if best.is_some_and(|(bd, _)| d >= bd) {
                continue;
            }
            if !too_close(cfg, p, pos[partner]) && conflicts(p) < own {
                best = Some((d, local));
            }
        }
    }
    best.map(|(_, local)| PresetIndex {
        subarea: slot,
        local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ApertureConfig {
        ApertureConfig::new(1.0, 1.0, (2, 2), (4, 4), 0.1, 0.05).unwrap()
    }

    #[test]
    fn origin_maps_to_zero() {
        let cfg = small();
        assert_eq!(cfg.map_index((0, 0)).unwrap(), 0);
        assert_eq!(cfg.unmap_index(0).unwrap(), (0, 0));
    }

    #[test]
    fn horizontal_index_runs_fastest() {
        let cfg = ApertureConfig::new(1.0, 1.0, (1, 1), (100, 3), 0.1, 0.05).unwrap();
        assert_eq!(cfg.grid_h(), 100);
        assert_eq!(cfg.map_index((1, 0)).unwrap(), 1);
        assert_eq!(cfg.map_index((0, 1)).unwrap(), 100);
    }

    #[test]
    fn out_of_range_indices_fail() {
        let cfg = small();
        assert!(cfg.map_index((8, 0)).is_err());
        assert!(cfg.map_index((0, 8)).is_err());
        assert!(cfg.unmap_index(64).is_err());
        let bad = PresetIndex {
            subarea: 4,
            local: 0,
        };
        assert!(preset_position(&cfg, bad).is_err());
    }

    #[test]
    fn corners_hit_aperture_corners() {
        let cfg = ApertureConfig::new(1.5, 0.75, (3, 2), (5, 4), 0.1, 0.05).unwrap();
        let first = cfg.preset_at((0, 0)).unwrap();
        let last = cfg.preset_at((cfg.grid_h() - 1, cfg.grid_v() - 1)).unwrap();
        assert_eq!(preset_position(&cfg, first).unwrap(), [0.0, 0.0]);
        let p = preset_position(&cfg, last).unwrap();
        assert!((p[0] - 1.5).abs() < 1e-12 && (p[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn degenerate_single_preset_grid() {
        let cfg = ApertureConfig::new(1.0, 1.0, (1, 1), (1, 1), 0.1, 0.05).unwrap();
        assert_eq!(cfg.pitch_h(), 1.0);
        let idx = snap(&cfg, 0, [0.7, 0.2]).unwrap();
        assert_eq!(idx.local, 0);
        assert_eq!(preset_position(&cfg, idx).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn snap_corners_and_centre_tie() {
        let cfg = small();
        assert_eq!(snap(&cfg, 3, [0.0, 0.0]).unwrap().local, 0);
        assert_eq!(snap(&cfg, 3, [1.0, 1.0]).unwrap().local, 15);
        // 4x4 grid: the centre is equidistant from locals 5, 6, 9, 10.
        assert_eq!(snap(&cfg, 3, [0.5, 0.5]).unwrap().local, 5);
    }

    #[test]
    fn single_element_never_violates() {
        let cfg = ApertureConfig::new(1.0, 1.0, (1, 1), (3, 3), 0.1, 10.0).unwrap();
        let p = Placement::centers(&cfg);
        assert_eq!(spacing_violations(&cfg, &p), 0);
        assert_eq!(repair_spacing(&cfg, &p).1, 0);
    }

    #[test]
    fn boundary_pair_is_a_violation() {
        // Pitch is 1/7 m; a spacing of 0.2 m forbids adjacent presets.
        let cfg = ApertureConfig::new(1.0, 1.0, (2, 2), (4, 4), 0.1, 0.2).unwrap();
        // Subarea 0 at its right edge, subarea 1 at its left edge, same row.
        let mut active: Vec<_> = (0..4).map(|m| cfg.center_preset(m)).collect();
        active[0] = PresetIndex {
            subarea: 0,
            local: 3,
        };
        active[1] = PresetIndex {
            subarea: 1,
            local: 0,
        };
        let p = Placement::new(&cfg, active).unwrap();
        assert!(spacing_violations(&cfg, &p) >= 1);
    }

    #[test]
    fn wrong_slot_is_rejected() {
        let cfg = small();
        let mut active: Vec<_> = (0..4).map(|m| cfg.center_preset(m)).collect();
        active.swap(0, 1);
        assert!(Placement::new(&cfg, active).is_err());
        assert!(Placement::from_surrogate(&cfg, &[0.5; 6]).is_err());
    }

    #[test]
    fn surrogate_round_trips_through_snap() {
        let cfg = small();
        for local in 0..cfg.presets_per_subarea() {
            let idx = PresetIndex { subarea: 2, local };
            assert_eq!(snap(&cfg, 2, surrogate_of(&cfg, idx)).unwrap(), idx);
        }
    }
}
