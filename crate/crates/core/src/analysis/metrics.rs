use crate::error::{Error, Result};
use crate::genome::LatticeDims;

pub type Point = [f64; 3];

/// Voxel centres of integer lattice coordinates.
pub fn points(coords: &[[usize; 3]]) -> Vec<Point> {
    coords.iter().map(|c| [c[0] as f64, c[1] as f64, c[2] as f64]).collect()
}

#[inline]
fn dist_sq(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Directed sup-inf distance, squared. The inner scan stops as soon as it
/// finds a point closer than the running maximum, since that point can no
/// longer raise it.
fn directed_sq(from: &[Point], to: &[Point]) -> f64 {
    let mut worst = 0.0f64;
    for p in from {
        let mut nearest = f64::INFINITY;
        for q in to {
            let d = dist_sq(p, q);
            if d < nearest {
                nearest = d;
                if nearest <= worst {
                    break;
                }
            }
        }
        worst = worst.max(nearest);
    }
    worst
}

/// Symmetric Hausdorff distance between two point sets, in voxel lengths.
pub fn hausdorff(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("hausdorff distance needs two non-empty sets".into()));
    }
    Ok(directed_sq(a, b).max(directed_sq(b, a)).sqrt())
}

/// The eight lattice rotations compared for geometric diversity: quarter
/// turns in the xy plane composed with 0 or 90 degrees in the yz plane,
/// about the lattice centre.
pub fn rotations(points: &[Point], dims: LatticeDims) -> [Vec<Point>; 8] {
    let cx = (dims.nx as f64 - 1.0) / 2.0;
    let cy = (dims.ny as f64 - 1.0) / 2.0;
    let cz = (dims.nz as f64 - 1.0) / 2.0;
    std::array::from_fn(|r| {
        let xy_turns = r % 4;
        let yz_turn = r / 4 == 1;
        points
            .iter()
            .map(|p| {
                let (mut x, mut y, mut z) = (p[0] - cx, p[1] - cy, p[2] - cz);
                for _ in 0..xy_turns {
                    (x, y) = (-y, x);
                }
                if yz_turn {
                    (y, z) = (-z, y);
                }
                [x + cx, y + cy, z + cz]
            })
            .collect()
    })
}

/// Minimum Hausdorff distance between `a` and any of the eight rotations of
/// `b`.
pub fn min_rotation_hausdorff(a: &[Point], b: &[Point], dims: LatticeDims) -> Result<f64> {
    let mut best = f64::INFINITY;
    for rotated in rotations(b, dims) {
        best = best.min(hausdorff(a, &rotated)?);
    }
    Ok(best)
}

fn relative_changes(k_congenital: &[f64], k_final: &[f64]) -> Result<Vec<f64>> {
    if k_congenital.len() != k_final.len() {
        return Err(Error::InvalidInput(format!(
            "stiffness fields differ in length ({} vs {})",
            k_congenital.len(),
            k_final.len()
        )));
    }
    if k_congenital.is_empty() {
        return Err(Error::EmptyGeometry);
    }
    k_congenital
        .iter()
        .zip(k_final)
        .map(|(&k0, &k1)| {
            if k0 > 0.0 {
                Ok((k1 / k0 - 1.0).abs())
            } else {
                Err(Error::InvalidInput(format!("congenital stiffness must be positive (got {k0})")))
            }
        })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population variance (divides by `n`).
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Mean relative lifetime change in stiffness, `|k_final / k_congenital - 1|`
/// averaged over the body. Both fields list present voxels only.
pub fn m_body(k_congenital: &[f64], k_final: &[f64]) -> Result<f64> {
    Ok(mean(&relative_changes(k_congenital, k_final)?))
}

/// Population variance of the relative lifetime stiffness change.
pub fn v_body(k_congenital: &[f64], k_final: &[f64]) -> Result<f64> {
    Ok(variance(&relative_changes(k_congenital, k_final)?))
}

/// Variance of development gains after normalising them to `[0, 1]` by
/// group-level bounds.
pub fn v_gain(gains: &[f64], gain_min: f64, gain_max: f64) -> Result<f64> {
    if gains.is_empty() {
        return Err(Error::EmptyGeometry);
    }
    if !(gain_max > gain_min) {
        return Err(Error::InvalidInput(format!(
            "gain bounds must satisfy min < max (got {gain_min}, {gain_max})"
        )));
    }
    let span = gain_max - gain_min;
    let normalised: Vec<f64> = gains.iter().map(|a| (a - gain_min) / span).collect();
    Ok(variance(&normalised))
}
