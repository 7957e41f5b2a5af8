//! Jakes spatial correlation over the preset grid.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ApertureConfig, Placement};

/// Largest grid for which the full `L x L` model may be built.
pub const MAX_FULL_GRID: usize = 4096;

/// `sin(πt)/(πt)` with `sinc(0) = 1`.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let x = std::f64::consts::PI * t;
        x.sin() / x
    }
}

/// Correlation between two presets separated by `(dh, dv)` grid steps.
pub fn jakes_entry(cfg: &ApertureConfig, dh: usize, dv: usize) -> f64 {
    let dx = dh as f64 * cfg.pitch_h();
    let dy = dv as f64 * cfg.pitch_v();
    sinc(2.0 / cfg.wavelength * (dx * dx + dy * dy).sqrt())
}

/// Full-grid correlation matrix and a square-root factor of it.
#[derive(Debug, Clone)]
pub struct CorrelationModel {
    grid_h: usize,
    matrix: DMatrix<f64>,
    factor: DMatrix<f64>,
    min_eigenvalue: f64,
}

impl CorrelationModel {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `F` with `F Fᵀ` equal to the matrix after eigenvalue flooring.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// Smallest eigenvalue before flooring.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `‖F Fᵀ − R‖_F / ‖R‖_F`.
    pub fn reproduction_error(&self) -> f64 {
        let rebuilt = &self.factor * self.factor.transpose();
        (rebuilt - &self.matrix).norm() / self.matrix.norm()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Builds the `L x L` Jakes matrix over every preset of the aperture.
pub fn jakes_covariance(cfg: &ApertureConfig) -> Result<CorrelationModel> {
    let l = cfg.total_presets();
    if l > MAX_FULL_GRID {
        return Err(Error::Domain(format!(
            "full-grid correlation needs {l}x{l} entries; limit is {MAX_FULL_GRID} presets"
        )));
    }
    let coords: Vec<(usize, usize)> = (0..l)
        .map(|i| cfg.unmap_index(i))
        .collect::<Result<_>>()?;
    let matrix = covariance_from_coords(cfg, &coords);
    let (factor, min_eigenvalue) = factor_psd(&matrix)?;
    Ok(CorrelationModel {
        grid_h: cfg.grid_h(),
        matrix,
        factor,
        min_eigenvalue,
    })
}

fn covariance_from_coords(cfg: &ApertureConfig, coords: &[(usize, usize)]) -> DMatrix<f64> {
    let n = coords.len();
    let mut r = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = jakes_entry(
                cfg,
                coords[i].0.abs_diff(coords[j].0),
                coords[i].1.abs_diff(coords[j].1),
            );
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

/// Rows/columns of the full model at the active presets (`S R Sᵀ`).
pub fn active_covariance(model: &CorrelationModel, placement: &Placement) -> DMatrix<f64> {
    let rows = active_rows(model, placement);
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| model.matrix[(rows[i], rows[j])])
}

fn active_rows(model: &CorrelationModel, placement: &Placement) -> Vec<usize> {
    placement
        .grid_coords()
        .iter()
        .map(|&(h, v)| v * model.grid_h + h)
        .collect()
}

/// Active covariance evaluated straight from the grid offsets of the
/// active presets; identical to [`active_covariance`] without the `L x L`
/// precompute.
pub fn active_covariance_direct(cfg: &ApertureConfig, placement: &Placement) -> DMatrix<f64> {
    covariance_from_coords(cfg, placement.grid_coords())
}

/// Symmetric eigen-factor with negative eigenvalues floored at zero.
/// Returns the factor and the smallest raw eigenvalue.
pub fn factor_psd(matrix: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite entry in {}x{} covariance",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let eig = matrix.clone().symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let mut factor = eig.eigenvectors;
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        factor.column_mut(k).scale_mut(s);
    }
    Ok((factor, min_eigenvalue))
}

/// Square-root factor of an active covariance: Cholesky when the matrix is
/// positive definite, floored eigen-factor otherwise.
pub fn factor_active(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match matrix.clone().cholesky() {
        Some(ch) => Ok(ch.unpack()),
        None => factor_psd(matrix).map(|(f, _)| f),
    }
}

/// Where the correlated NLoS draw takes its square-root factor from.
#[derive(Debug, Clone)]
pub enum NlosFactor<'a> {
    /// `M x M` factor of the active covariance.
    Active(DMatrix<f64>),
    /// Rows of the full-grid factor at the active presets.
    FullGrid {
        model: &'a CorrelationModel,
        rows: Vec<usize>,
    },
}

impl<'a> NlosFactor<'a> {
    pub fn active(cfg: &ApertureConfig, placement: &Placement) -> Result<Self> {
        factor_active(&active_covariance_direct(cfg, placement)).map(NlosFactor::Active)
    }

    pub fn full_grid(model: &'a CorrelationModel, placement: &Placement) -> Self {
        NlosFactor::FullGrid {
            rows: active_rows(model, placement),
            model,
        }
    }

    /// Length of the i.i.d. innovation vector consumed per draw.
    pub fn innovations(&self) -> usize {
        match self {
            NlosFactor::Active(f) => f.ncols(),
            NlosFactor::FullGrid { model, .. } => model.dim(),
        }
    }

    /// Number of correlated outputs (`M`).
    pub fn outputs(&self) -> usize {
        match self {
            NlosFactor::Active(f) => f.nrows(),
            NlosFactor::FullGrid { rows, .. } => rows.len(),
        }
    }

    /// Correlated vector `F g`.
    pub fn apply(&self, g: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(g.len(), self.innovations(), "innovation length");
        let row_dot = |f: &DMatrix<f64>, r: usize| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, gk) in g.iter().enumerate() {
                let w = f[(r, k)];
                if w != 0.0 {
                    acc += gk * w;
                }
            }
            acc
        };
        match self {
            NlosFactor::Active(f) => (0..f.nrows()).map(|r| row_dot(f, r)).collect(),
            NlosFactor::FullGrid { model, rows } => {
                rows.iter().map(|&r| row_dot(&model.factor, r)).collect()
            }
        }
    }
}
