//! Laurent coefficients by the trapezoid rule on a circle.
//!
//! `c_k = (1/2 pi i) \oint f(z) (z - c)^{-k-1} dz
//!      = (1/n) sum_j f(c + r w_j) r^{-k} w_j^{-k}`, `w_j = e^{2 pi i j / n}`.
//! The node count doubles (reusing previous nodes) until two successive
//! estimates differ by less than `tol / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::sum::ComplexSum;

pub const MIN_NODES: usize = 16;
pub const MAX_NODES: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub enum ContourError<E> {
    Eval(E),
    NotConverged { estimate: Complex64, change: f64, nodes: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct LaurentEstimate {
    pub value: Complex64,
    /// Difference between the last two node counts.
    pub change: f64,
    pub nodes: usize,
}

fn unit(j: usize, n: usize) -> Complex64 {
    let theta = 2.0 * PI * j as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}

pub fn laurent_coefficient<F, E>(
    mut f: F,
    center: Complex64,
    radius: f64,
    power: i32,
    tol: f64,
) -> Result<LaurentEstimate, ContourError<E>>
where
    F: FnMut(Complex64) -> Result<Complex64, E>,
{
    let mut eval = |w: Complex64| -> Result<Complex64, ContourError<E>> {
        let v = f(center + w * radius).map_err(ContourError::Eval)?;
        Ok(v * w.powi(-power))
    };
    let mut n = MIN_NODES;
    let mut acc = ComplexSum::new();
    for j in 0..n {
        acc.add(eval(unit(j, n))?);
    }
    let scale = radius.powi(-power);
    let mut estimate = acc.total() * (scale / n as f64);
    loop {
        let next_n = 2 * n;
        for j in (1..next_n).step_by(2) {
            acc.add(eval(unit(j, next_n))?);
        }
        let next = acc.total() * (scale / next_n as f64);
        let change = (next - estimate).norm();
        n = next_n;
        estimate = next;
        if change < tol / 2.0 {
            return Ok(LaurentEstimate {
                value: estimate,
                change,
                nodes: n,
            });
        }
        if n >= MAX_NODES {
            return Err(ContourError::NotConverged {
                estimate,
                change,
                nodes: n,
            });
        }
    }
}
