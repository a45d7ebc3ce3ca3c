use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FieldError;

/// Coordinates of a point in a real chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint(Vec<f64>);

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, FieldError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(FieldError::NonFinite { point: coords });
        }
        Ok(ChartPoint(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl AsRef<[f64]> for ChartPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A region removed from the chart. The predicate is strictly positive at
/// admitted points.
#[derive(Clone)]
pub struct Locus {
    pub description: String,
    predicate: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl Locus {
    pub fn new(description: impl Into<String>, predicate: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Locus {
            description: description.into(),
            predicate: Arc::new(predicate),
        }
    }

    pub fn admits(&self, p: &[f64]) -> bool {
        (self.predicate)(p) > 0.0
    }
}

impl fmt::Debug for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Locus({})", self.description)
    }
}

/// How one group of coordinates is sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleBlock {
    /// Independent uniform draws on `[lo, hi)` for each listed coordinate.
    Box { coords: Vec<usize>, lo: f64, hi: f64 },
    /// Volume-uniform draw in the shell `r_min ≤ ‖x‖ ≤ r_max`.
    Shell { coords: Vec<usize>, r_min: f64, r_max: f64 },
}

/// Deterministic sampler for a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampler {
    pub dim: usize,
    pub blocks: Vec<SampleBlock>,
}

impl Sampler {
    pub fn unit_box(dim: usize) -> Self {
        Sampler {
            dim,
            blocks: vec![SampleBlock::Box {
                coords: (0..dim).collect(),
                lo: 0.0,
                hi: 1.0,
            }],
        }
    }

    /// Draw `count` points from a ChaCha stream seeded with `seed`.
    pub fn sample(&self, seed: u64, count: usize, locus: Option<&Locus>) -> Vec<ChartPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p = self.draw(&mut rng);
            if locus.map_or(true, |l| l.admits(&p)) {
                out.push(ChartPoint(p));
            }
        }
        out
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut p = vec![0.0; self.dim];
        for block in &self.blocks {
            match block {
                SampleBlock::Box { coords, lo, hi } => {
                    for &c in coords {
                        p[c] = rng.gen_range(*lo..*hi);
                    }
                }
                SampleBlock::Shell { coords, r_min, r_max } => loop {
                    let v: Vec<f64> = coords.iter().map(|_| rng.gen_range(-*r_max..*r_max)).collect();
                    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if r >= *r_min && r <= *r_max {
                        for (&c, x) in coords.iter().zip(v) {
                            p[c] = x;
                        }
                        break;
                    }
                },
            }
        }
        p
    }
}
