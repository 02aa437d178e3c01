//! Periodic coordinate boxes `[0, 2π)^m`, their uniform grids, coordinate
//! loops and quadrature.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::iter::Sum;
use std::ops::Mul;

pub const TWO_PI: f64 = 2.0 * PI;

/// A point of the torus; unused trailing coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: [f64; 4],
    pub dim: usize,
}

impl Point {
    /// Reduces every coordinate into `[0, 2π)`.
    pub fn new(coords: &[f64]) -> Self {
        let mut c = [0.0; 4];
        for (slot, x) in c.iter_mut().zip(coords) {
            let r = x.rem_euclid(TWO_PI);
            *slot = if r >= TWO_PI { 0.0 } else { r };
        }
        Point {
            coords: c,
            dim: coords.len(),
        }
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: [0.0; 4],
            dim,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    dim: usize,
    resolution: usize,
    q_ref: Option<[f64; 4]>,
}

impl Chart {
    /// Builds a chart; `q_ref` defaults to `(0,0,0,1)` in four dimensions and
    /// is rejected in three.
    pub fn new(dim: usize, resolution: usize, q_ref: Option<[f64; 4]>) -> Result<Self> {
        if dim != 3 && dim != 4 {
            return Err(Error::BadDimension(dim));
        }
        if resolution < 8 {
            return Err(Error::BadResolution(resolution));
        }
        let q_ref = match (dim, q_ref) {
            (4, None) => Some([0.0, 0.0, 0.0, 1.0]),
            (4, q) => q,
            (_, Some(_)) => return Err(Error::UnexpectedReferenceCovector),
            (_, None) => None,
        };
        Ok(Chart {
            dim,
            resolution,
            q_ref,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn q_ref(&self) -> Option<[f64; 4]> {
        self.q_ref
    }

    pub fn with_resolution(&self, resolution: usize) -> Result<Self> {
        Chart::new(
            self.dim,
            resolution,
            if self.dim == 4 { self.q_ref } else { None },
        )
    }

    pub fn spacing(&self) -> f64 {
        TWO_PI / self.resolution as f64
    }

    pub fn num_points(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    /// Stride of `axis` (0-based) in the row-major flattening; axis 0 varies fastest.
    pub fn stride(&self, axis: usize) -> usize {
        self.resolution.pow(axis as u32)
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 4] {
        let mut idx = [0; 4];
        let mut rest = flat;
        for slot in idx.iter_mut().take(self.dim) {
            *slot = rest % self.resolution;
            rest /= self.resolution;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.dim)
            .enumerate()
            .map(|(a, i)| (i % self.resolution) * self.stride(a))
            .sum()
    }

    pub fn point(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let h = self.spacing();
        let coords: Vec<f64> = idx[..self.dim].iter().map(|&i| i as f64 * h).collect();
        Point::new(&coords)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.num_points()).map(move |k| self.point(k))
    }

    /// Locates `p` on the grid, tolerating rounding in the coordinates.
    pub fn grid_index_of(&self, p: &Point) -> Option<usize> {
        let h = self.spacing();
        let mut idx = [0usize; 4];
        for a in 0..self.dim {
            let t = p.coords[a] / h;
            let r = t.round();
            if (t - r).abs() > 1e-9 {
                return None;
            }
            idx[a] = (r as usize) % self.resolution;
        }
        Some(self.flat_index(&idx[..self.dim]))
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis == 0 || axis > self.dim {
            return Err(Error::BadAxis {
                axis,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// `n` points on the coordinate circle through the origin along `axis`
    /// (1-based), at parameter values `2πk/n`.
    pub fn loop_samples(&self, axis: usize, n: usize) -> Result<Vec<Point>> {
        self.check_axis(axis)?;
        Ok((0..n)
            .map(|k| {
                let mut c = vec![0.0; self.dim];
                c[axis - 1] = TWO_PI * k as f64 / n as f64;
                Point::new(&c)
            })
            .collect())
    }

    /// Periodic trapezoidal rule over the full grid or over one coordinate loop
    /// with `resolution` samples.
    pub fn integrate_periodic<T>(&self, samples: &[T]) -> Result<T>
    where
        T: Copy + Sum<T> + Mul<f64, Output = T>,
    {
        let n = samples.len();
        if n == self.num_points() {
            Ok(samples.iter().copied().sum::<T>() * self.spacing().powi(self.dim as i32))
        } else if n == self.resolution {
            Ok(integrate_loop(samples))
        } else {
            Err(Error::SampleCountMismatch {
                got: n,
                grid: self.num_points(),
                loop_len: self.resolution,
            })
        }
    }
}

/// Rectangle rule over one period `[0, 2π)` for uniformly spaced samples.
pub fn integrate_loop<T>(samples: &[T]) -> T
where
    T: Copy + Sum<T> + Mul<f64, Output = T>,
{
    samples.iter().copied().sum::<T>() * (TWO_PI / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(Chart::new(3, 32, None).unwrap().num_points(), 32768);
        assert_eq!(
            Chart::new(4, 16, Some([0.0, 0.0, 0.0, 1.0]))
                .unwrap()
                .num_points(),
            65536
        );
        assert_eq!(Chart::new(5, 32, None), Err(Error::BadDimension(5)));
        assert_eq!(Chart::new(3, 4, None), Err(Error::BadResolution(4)));
    }

    #[test]
    fn loop_points() {
        let c3 = Chart::new(3, 8, None).unwrap();
        let pts = c3.loop_samples(3, 4).unwrap();
        let x3: Vec<f64> = pts.iter().map(|p| p.coords[2]).collect();
        assert_eq!(x3, vec![0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        assert!(pts.iter().all(|p| p.coords[0] == 0.0 && p.coords[1] == 0.0));
        assert_eq!(
            c3.loop_samples(4, 16),
            Err(Error::BadAxis { axis: 4, dim: 3 })
        );

        let c4 = Chart::new(4, 8, None).unwrap();
        let pts = c4.loop_samples(1, 64).unwrap();
        assert_eq!(pts.len(), 64);
        assert!(pts.windows(2).all(|w| w[1].coords[0] > w[0].coords[0]));
    }

    #[test]
    fn quadrature() {
        let c = Chart::new(3, 32, None).unwrap();
        let ones = vec![1.0; 32];
        assert!((c.integrate_periodic(&ones).unwrap() - TWO_PI).abs() < 1e-14);
        let sines: Vec<f64> = c
            .loop_samples(1, 32)
            .unwrap()
            .iter()
            .map(|p| p.coords[0].sin())
            .collect();
        assert!(c.integrate_periodic(&sines).unwrap().abs() < 1e-12);
        // ∫ cos²(x¹) over T³ = π · (2π)² from the antiderivative x/2 + sin(2x)/4.
        let oracle = (TWO_PI / 2.0 + (2.0 * TWO_PI).sin() / 4.0) * TWO_PI * TWO_PI;
        let vals: Vec<f64> = c.points().map(|p| p.coords[0].cos().powi(2)).collect();
        assert!((c.integrate_periodic(&vals).unwrap() - oracle).abs() < 1e-10);
        assert!(matches!(
            c.integrate_periodic(&[1.0; 7]),
            Err(Error::SampleCountMismatch { .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        let c = Chart::new(4, 8, None).unwrap();
        for k in [0, 1, 7, 8, 63, 511, 4095] {
            let p = c.point(k);
            assert_eq!(c.grid_index_of(&p), Some(k));
        }
        assert_eq!(c.grid_index_of(&Point::new(&[0.1, 0.0, 0.0, 0.0])), None);
    }
}
