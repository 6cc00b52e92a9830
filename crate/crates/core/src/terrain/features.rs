//! Geometric terrain features computed by regression over a square window.

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use super::HeightMap;
use crate::error::TerrainError;
use crate::geometry::{Point2, Rect};

/// Height standard deviation (m), plane-fit slope (rad) and quadratic-fit
/// curvature (1/m).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub height_stddev: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 3] {
        [self.height_stddev, self.slope, self.curvature]
    }
}

/// Elevation samples relative to a window center: `(dx, dy, z)`.
pub(crate) fn window_samples(hm: &HeightMap, center: Point2, window: f64, out: &mut Vec<(f64, f64, f64)>) {
    out.clear();
    let half = 0.5 * window;
    let spec = hm.spec();
    let tol = 1e-9;
    let rect = Rect::from_center(center, half + spec.resolution, half + spec.resolution);
    let Some(((x0, y0), (x1, y1))) = spec.index_range(&rect) else {
        return;
    };
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            let c = spec.cell_center(ix, iy);
            let (dx, dy) = (c.x - center.x, c.y - center.y);
            if dx.abs() > half + tol || dy.abs() > half + tol {
                continue;
            }
            if let Some(z) = hm.elevation(ix, iy) {
                out.push((dx, dy, z));
            }
        }
    }
}

/// Features of the window of side `window` centered at `center`.
pub fn compute_features(hm: &HeightMap, center: Point2, window: f64) -> Result<FeatureVector, TerrainError> {
    let mut buf = Vec::with_capacity(16);
    window_samples(hm, center, window, &mut buf);
    features_from_samples(&buf, window)
}

pub(crate) fn features_from_samples(samples: &[(f64, f64, f64)], window: f64) -> Result<FeatureVector, TerrainError> {
    let n = samples.len();
    if n < 3 {
        return Err(TerrainError::InsufficientData);
    }
    let nf = n as f64;
    // Heights relative to the first sample keep flat windows exactly zero.
    let z0 = samples[0].2;
    let (mut mx, mut my, mut mz) = (0.0, 0.0, 0.0);
    for &(x, y, z) in samples {
        mx += x;
        my += y;
        mz += z - z0;
    }
    mx /= nf;
    my /= nf;
    mz /= nf;

    let (mut sxx, mut syy, mut sxy, mut sxz, mut syz, mut szz) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, z) in samples {
        let (x, y, z) = (x - mx, y - my, z - z0 - mz);
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        sxz += x * z;
        syz += y * z;
        szz += z * z;
    }
    let det = sxx * syy - sxy * sxy;
    let scale = (sxx + syy).powi(2);
    if scale <= 0.0 || det <= 1e-12 * scale {
        return Err(TerrainError::InsufficientData);
    }
    let gx = (sxz * syy - syz * sxy) / det;
    let gy = (syz * sxx - sxz * sxy) / det;

    let height_stddev = (szz / (nf - 1.0)).sqrt();
    let slope = gx.hypot(gy).atan();
    let curvature = if n >= 6 { quadratic_laplacian(samples, z0 + mz, 0.5 * window).abs() } else { 0.0 };

    Ok(FeatureVector { height_stddev, slope, curvature })
}

/// Laplacian `2(a_xx + a_yy)` of the least-squares quadratic surface; zero if the
/// design is rank deficient.
fn quadratic_laplacian(samples: &[(f64, f64, f64)], mean_z: f64, half: f64) -> f64 {
    // Coordinates are scaled to the window so the normal matrix stays well conditioned.
    let s = if half > 0.0 { half } else { 1.0 };
    let mut ata = Matrix6::<f64>::zeros();
    let mut atb = Vector6::<f64>::zeros();
    for &(x, y, z) in samples {
        let (u, v) = (x / s, y / s);
        let row = Vector6::new(1.0, u, v, u * u, u * v, v * v);
        ata += row * row.transpose();
        atb += row * (z - mean_z);
    }
    let svd = ata.svd(true, true);
    let max_sv = svd.singular_values.max();
    if max_sv <= 0.0 || svd.singular_values.min() <= 1e-10 * max_sv {
        return 0.0;
    }
    let Ok(coef) = svd.solve(&atb, 0.0) else {
        return 0.0;
    };
    2.0 * (coef[3] + coef[5]) / (s * s)
}
