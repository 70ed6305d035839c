//! Radial surfaces over the positive hyperoctant of Schmidt vectors.
//!
//! Along a unit direction `u`, each surface is the point `r(u) * u`.

use std::f64::consts::FRAC_PI_2;

use chanwit::schmidt::{norm1, norm2, norm_inf};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SURFACES: [&str; 5] = ["sphere", "octahedron", "cube", "separable-witness", "me-witness"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRadii {
    pub sphere: f64,
    pub octahedron: f64,
    pub cube: f64,
    pub separable_witness: f64,
    pub me_witness: f64,
}

impl SurfaceRadii {
    pub fn as_array(&self) -> [f64; 5] {
        [self.sphere, self.octahedron, self.cube, self.separable_witness, self.me_witness]
    }
}

/// Radii of the five surfaces along `direction`, which is normalized first.
pub fn surface_radii(direction: &[f64]) -> CliResult<SurfaceRadii> {
    let n = norm2(direction);
    if direction.is_empty() || n == 0.0 || direction.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(CliError::Input("direction must be non-zero, finite and non-negative".into()));
    }
    let u: Vec<f64> = direction.iter().map(|x| x / n).collect();
    let d = u.len() as f64;
    Ok(SurfaceRadii {
        sphere: 1.0,
        octahedron: 1.0 / norm1(&u),
        cube: 1.0 / (d.sqrt() * norm_inf(&u)),
        separable_witness: norm_inf(&u).powi(2),
        me_witness: norm1(&u).powi(2) / d,
    })
}

/// Unit directions on an angular grid with `resolution` steps per angle.
pub fn directions(d: usize, resolution: usize) -> CliResult<Vec<Vec<f64>>> {
    if resolution == 0 {
        return Err(CliError::Input("resolution must be positive".into()));
    }
    let angle = |i: usize| FRAC_PI_2 * i as f64 / resolution as f64;
    match d {
        2 => Ok((0..=resolution).map(|i| vec![angle(i).cos(), angle(i).sin()]).collect()),
        3 => {
            let mut out = Vec::with_capacity((resolution + 1) * (resolution + 1));
            for i in 0..=resolution {
                let polar = angle(i);
                // One point at the pole instead of a degenerate ring.
                let rings = if i == 0 { 0 } else { resolution };
                for j in 0..=rings {
                    let az = angle(j);
                    out.push(vec![polar.sin() * az.cos(), polar.sin() * az.sin(), polar.cos()]);
                }
            }
            Ok(out)
        }
        _ => Err(CliError::Input(format!("surface export supports d = 2 or 3, got {d}"))),
    }
}

/// CSV with columns `sigma_0..sigma_{d-1},radius,surface_id`.
pub fn surfaces_csv(d: usize, resolution: usize) -> CliResult<String> {
    let mut header: Vec<String> = (0..d).map(|k| format!("sigma_{k}")).collect();
    header.push("radius".into());
    header.push("surface_id".into());
    let mut rows = vec![header.join(",")];
    let dirs = directions(d, resolution)?;
    for (s, name) in SURFACES.iter().enumerate() {
        for u in &dirs {
            let r = surface_radii(u)?.as_array()[s];
            let mut row: Vec<String> = u.iter().map(|x| format!("{:.12}", r * x)).collect();
            row.push(format!("{r:.12}"));
            row.push(name.to_string());
            rows.push(row.join(","));
        }
    }
    Ok(rows.join("\n") + "\n")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    /// Number of equal non-zero entries in the direction.
    pub k: usize,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub separable_radius: f64,
    pub me_radius: f64,
}

/// Norms along the `k`-uniform directions `(1, .., 1, 0, .., 0) / sqrt(k)`.
pub fn norms_table(d: usize) -> CliResult<Vec<NormRow>> {
    if d < 2 {
        return Err(CliError::Input(format!("geometry needs d >= 2, got {d}")));
    }
    (1..=d)
        .map(|k| {
            let u: Vec<f64> = (0..d).map(|i| if i < k { 1.0 / (k as f64).sqrt() } else { 0.0 }).collect();
            let r = surface_radii(&u)?;
            Ok(NormRow {
                k,
                l1: norm1(&u),
                l2: norm2(&u),
                linf: norm_inf(&u),
                separable_radius: r.separable_witness,
                me_radius: r.me_witness,
            })
        })
        .collect()
}

pub fn norms_csv(rows: &[NormRow]) -> String {
    let mut out = vec!["k,l1,l2,linf,separable_radius,me_radius".to_string()];
    out.extend(rows.iter().map(|r| {
        format!(
            "{},{:.12},{:.12},{:.12},{:.12},{:.12}",
            r.k, r.l1, r.l2, r.linf, r.separable_radius, r.me_radius
        )
    }));
    out.join("\n") + "\n"
}
