//! Fringe visibility `(P_max - P_min)/(P_max + P_min)` over the central
//! single-slit lobe `|x| < lambda L / a`, averaged over adjacent extrema.

use crate::grid::GridSpec;
use crate::optics::{Density, SlitGeometry};

pub fn density_visibility(density: &Density, geom: &SlitGeometry) -> f64 {
    let grid = density.grid();
    let points = grid.centers().zip(density.values().iter().copied());
    visibility_of(points, geom.envelope_half_width())
}

/// Visibility of binned counts, read from the fringe harmonic instead of
/// from extrema, which shot noise would swamp. For counts following
/// `E(x) (1 + V cos(k x))` with `k = 2 pi d / (lambda L)`, the estimate
/// `2 sum c cos(k x) / sum c` over the central lobe returns `|V|`: the
/// single-slit envelope carries no spatial frequency as high as `k`.
pub fn count_visibility(counts: &[u64], grid: &GridSpec, geom: &SlitGeometry) -> f64 {
    let k = 2.0 * std::f64::consts::PI / geom.fringe_period();
    let half_width = geom.envelope_half_width();
    let (mut total, mut harmonic) = (0.0, 0.0);
    for (x, &c) in grid.centers().zip(counts) {
        if x.abs() < half_width {
            total += c as f64;
            harmonic += c as f64 * (k * x).cos();
        }
    }
    if total > 0.0 {
        (2.0 * harmonic / total).abs().min(1.0)
    } else {
        0.0
    }
}

fn visibility_of(points: impl Iterator<Item = (f64, f64)>, half_width: f64) -> f64 {
    let values: Vec<f64> = points.filter(|(x, _)| x.abs() < half_width).map(|(_, v)| v).collect();
    let extrema = local_extrema(&values);
    let pairs: Vec<f64> = extrema
        .windows(2)
        .filter_map(|w| {
            let (hi, lo) = if w[0] > w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            (hi + lo > 0.0).then(|| (hi - lo) / (hi + lo))
        })
        .collect();
    if pairs.is_empty() {
        0.0
    } else {
        pairs.iter().sum::<f64>() / pairs.len() as f64
    }
}

/// Interior local extrema in order of appearance; plateaus count once.
fn local_extrema(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last_slope = 0i8;
    let mut last_value = match values.first() {
        Some(v) => *v,
        None => return out,
    };
    for &v in &values[1..] {
        let slope = if v > last_value {
            1
        } else if v < last_value {
            -1
        } else {
            0
        };
        if slope != 0 {
            if last_slope != 0 && slope != last_slope {
                out.push(last_value);
            }
            last_slope = slope;
        }
        last_value = v;
    }
    out
}
