//! Seeded three-class point-cloud benchmark.
//!
//! * `circle`: one noisy circle (a single dominant H1 bar)
//! * `two_circles`: two disjoint noisy circles (two H1 bars)
//! * `noise`: uniform points in a square (no persistent H1)
//!
//! Each instance has between 20 and 40 points.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::embedding::PointCloud;
use crate::error::{Error, Result};

pub const SYNTHETIC_CLASSES: [&str; 3] = ["circle", "two_circles", "noise"];

const MIN_POINTS: usize = 20;
const MAX_POINTS: usize = 40;
const RADIAL_NOISE: f64 = 0.08;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloud {
    pub label: String,
    pub cloud: PointCloud,
}

/// `per_class` clouds for each of the first `classes` classes, class-major.
pub fn synthetic_clouds(classes: usize, per_class: usize, seed: u64) -> Result<Vec<LabeledCloud>> {
    if classes == 0 || classes > SYNTHETIC_CLASSES.len() {
        return Err(Error::param(format!(
            "classes must be in 1..={}, got {classes}",
            SYNTHETIC_CLASSES.len()
        )));
    }
    if per_class == 0 {
        return Err(Error::param("per_class must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, RADIAL_NOISE).expect("valid std");

    let mut out = Vec::with_capacity(classes * per_class);
    for &label in &SYNTHETIC_CLASSES[..classes] {
        for _ in 0..per_class {
            let n = rng.random_range(MIN_POINTS..=MAX_POINTS);
            let points = match label {
                "circle" => circle(&mut rng, &noise, n, (0.0, 0.0), 1.0),
                "two_circles" => {
                    let half = n / 2;
                    let mut pts = circle(&mut rng, &noise, half, (-1.25, 0.0), 0.6);
                    pts.extend(circle(&mut rng, &noise, n - half, (1.25, 0.0), 0.6));
                    pts
                }
                _ => (0..n)
                    .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                    .collect(),
            };
            out.push(LabeledCloud {
                label: label.to_string(),
                cloud: PointCloud::new(points)?,
            });
        }
    }
    Ok(out)
}

fn circle(
    rng: &mut ChaCha8Rng,
    noise: &Normal<f64>,
    n: usize,
    center: (f64, f64),
    radius: f64,
) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let theta = rng.random_range(0.0..TAU);
            let r = radius * (1.0 + noise.sample(rng));
            vec![center.0 + r * theta.cos(), center.1 + r * theta.sin()]
        })
        .collect()
}
