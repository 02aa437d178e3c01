//! Fourier differentiation and integration of periodic grid fields.

use crate::chart::{integrate_loop, Chart};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

/// Signed wavenumber of FFT bin `i` on `n` points; the Nyquist bin maps to 0.
fn wavenumber(i: usize, n: usize) -> f64 {
    if 2 * i < n {
        i as f64
    } else if 2 * i == n {
        0.0
    } else {
        i as f64 - n as f64
    }
}

/// In-place FFT along `axis` (0-based) of a grid-flattened array.
fn fft_axis(data: &mut [C64], chart: &Chart, axis: usize, inverse: bool) {
    let n = chart.resolution();
    let stride = chart.stride(axis);
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![C64::new(0.0, 0.0); n];
    for base in 0..data.len() {
        if (base / stride) % n != 0 {
            continue;
        }
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = data[base + k * stride];
        }
        fft.process(&mut line);
        for (k, v) in line.iter().enumerate() {
            data[base + k * stride] = *v;
        }
    }
}

fn forward(samples: &[f64], chart: &Chart) -> Vec<C64> {
    let mut data: Vec<C64> = samples.iter().map(|v| C64::new(*v, 0.0)).collect();
    for a in 0..chart.dim() {
        fft_axis(&mut data, chart, a, false);
    }
    data
}

fn backward(mut data: Vec<C64>, chart: &Chart) -> Vec<f64> {
    for a in 0..chart.dim() {
        fft_axis(&mut data, chart, a, true);
    }
    let scale = 1.0 / chart.num_points() as f64;
    data.iter().map(|v| v.re * scale).collect()
}

/// `∂_axis f` for a real periodic field sampled on the grid.
pub fn derivative(samples: &[f64], chart: &Chart, axis: usize) -> Vec<f64> {
    let n = chart.resolution();
    let mut hat = forward(samples, chart);
    for (k, v) in hat.iter_mut().enumerate() {
        let kk = wavenumber(chart.multi_index(k)[axis], n);
        *v *= C64::new(0.0, kk);
    }
    backward(hat, chart)
}

/// Largest `|∂_a ω_b − ∂_b ω_a|` over the grid.
pub fn curl_defect(omega: &[Vec<f64>], chart: &Chart) -> f64 {
    let dim = chart.dim();
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in (a + 1)..dim {
            let dab = derivative(&omega[b], chart, a);
            let dba = derivative(&omega[a], chart, b);
            worst = dab
                .iter()
                .zip(&dba)
                .map(|(x, y)| (x - y).abs())
                .fold(worst, f64::max);
        }
    }
    worst
}

/// `∮ ω_j dx^j` along each coordinate circle through the origin.
pub fn axis_periods(omega: &[Vec<f64>], chart: &Chart) -> Vec<f64> {
    (0..chart.dim())
        .map(|a| {
            let line: Vec<f64> = (0..chart.resolution())
                .map(|i| omega[a][i * chart.stride(a)])
                .collect();
            integrate_loop(&line)
        })
        .collect()
}

/// Zero-mean `ψ` minimizing `‖∇ψ − ω‖` in the discrete Fourier sense; exact
/// when `ω` is closed with zero periods and band-limited.
pub fn potential_of(omega: &[Vec<f64>], chart: &Chart) -> Vec<f64> {
    let n = chart.resolution();
    let dim = chart.dim();
    let hats: Vec<Vec<C64>> = omega.iter().map(|w| forward(w, chart)).collect();
    let mut psi = vec![C64::new(0.0, 0.0); chart.num_points()];
    for (k, slot) in psi.iter_mut().enumerate() {
        let idx = chart.multi_index(k);
        let ks: Vec<f64> = (0..dim).map(|a| wavenumber(idx[a], n)).collect();
        let k2: f64 = ks.iter().map(|v| v * v).sum();
        if k2 == 0.0 {
            continue;
        }
        let div: C64 = (0..dim).map(|a| hats[a][k] * ks[a]).sum();
        *slot = div * C64::new(0.0, -1.0) / k2;
    }
    backward(psi, chart)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_trig_polynomial() {
        let c = Chart::new(3, 16, None).unwrap();
        let f: Vec<f64> = c
            .points()
            .map(|p| (2.0 * p.coords[0]).sin() * p.coords[2].cos())
            .collect();
        let d = derivative(&f, &c, 0);
        for (k, p) in c.points().enumerate() {
            let exact = 2.0 * (2.0 * p.coords[0]).cos() * p.coords[2].cos();
            assert!((d[k] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_field_has_no_curl_and_zero_periods() {
        let c = Chart::new(3, 16, None).unwrap();
        let f = |x: &[f64]| (x[0] + 2.0 * x[1]).sin() + x[2].cos();
        let grads: Vec<Vec<f64>> = (0..3)
            .map(|a| {
                c.points()
                    .map(|p| {
                        let x = p.coords;
                        match a {
                            0 => (x[0] + 2.0 * x[1]).cos(),
                            1 => 2.0 * (x[0] + 2.0 * x[1]).cos(),
                            _ => -x[2].sin(),
                        }
                    })
                    .collect()
            })
            .collect();
        assert!(curl_defect(&grads, &c) < 1e-12);
        assert!(axis_periods(&grads, &c).iter().all(|p| p.abs() < 1e-12));
        let psi = potential_of(&grads, &c);
        let mean: f64 = c.points().map(|p| f(&p.coords)).sum::<f64>() / c.num_points() as f64;
        for (k, p) in c.points().enumerate() {
            assert!((psi[k] - (f(&p.coords) - mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_form_periods() {
        let c = Chart::new(3, 8, None).unwrap();
        let omega = vec![vec![0.0; 512], vec![0.0; 512], vec![0.5; 512]];
        let p = axis_periods(&omega, &c);
        assert!((p[2] - std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(p[0], 0.0);
    }
}
