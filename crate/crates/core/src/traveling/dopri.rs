//! Dormand–Prince 5(4) with error-per-step control.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (first-same-as-last: equal to the last row of `A`).
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

/// Result of [`integrate_samples`]: accepted samples plus the error that
/// stopped the run early, if any.
pub(crate) struct Samples<const N: usize> {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub halt: Option<Error>,
}

/// Integrates `y' = f(x, y)` from `x0` and records `y` at `x0 + i·dx` for
/// `i = 0..=count`. Steps are shortened to land on each sample. `dx` may be
/// negative.
///
/// A right-hand-side failure inside a trial step shrinks the step; if the
/// step cannot be reduced further the failure becomes the halt reason and
/// the samples so far are returned. Error-control underflow is an error.
pub(crate) fn integrate_samples<const N: usize, F>(
    f: F,
    x0: f64,
    y0: [f64; N],
    dx: f64,
    count: usize,
    tol: Tolerances,
) -> Result<Samples<N>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut xs = vec![x0];
    let mut ys = vec![y0];
    let dir = dx.signum();
    let mut x = x0;
    let mut y = y0;
    let mut k0 = match f(x, &y) {
        Ok(k) => k,
        Err(e) => return Ok(Samples { xs, ys, halt: Some(e) }),
    };
    let mut h = dx.abs().min(0.1 * dx.abs().max(1e-3));
    let mut last_error: Option<Error> = None;

    for i in 1..=count {
        let target = x0 + i as f64 * dx;
        while (target - x) * dir > 0.0 {
            let remaining = (target - x).abs();
            let landing = h >= remaining * (1.0 - 1e-12);
            let step = if landing { remaining } else { h };
            let min_step = 1e-13 * x.abs().max(dx.abs());
            if step < min_step {
                return match last_error.take() {
                    Some(e) => Ok(Samples { xs, ys, halt: Some(e) }),
                    None => Err(Error::StepUnderflow { xi: x }),
                };
            }
            match trial(&f, x, &y, &k0, dir * step) {
                Err(e) => {
                    last_error = Some(e);
                    h = 0.25 * step;
                }
                Ok((y_new, k_new, err_vec)) => {
                    let norm = error_norm(&y, &y_new, &err_vec, tol);
                    if norm <= 1.0 {
                        last_error = None;
                        x = if landing { target } else { x + dir * step };
                        y = y_new;
                        k0 = k_new;
                        let grow = if norm == 0.0 {
                            5.0
                        } else {
                            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        // A shortened landing step says nothing about the
                        // natural step length.
                        h = if landing { h.max(step * grow) } else { step * grow };
                    } else {
                        h = step * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
                    }
                }
            }
        }
        xs.push(target);
        ys.push(y);
    }
    Ok(Samples { xs, ys, halt: None })
}

type Trial<const N: usize> = ([f64; N], [f64; N], [f64; N]);

fn trial<const N: usize, F>(f: &F, x: f64, y: &[f64; N], k0: &[f64; N], h: f64) -> Result<Trial<N>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut k = [[0.0; N]; 7];
    k[0] = *k0;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for d in 0..N {
                    ys[d] += h * a * kj[d];
                }
            }
        }
        k[s] = f(x + C[s] * h, &ys)?;
        if s == 6 {
            // Stage 7 is evaluated at the fifth-order solution.
            let mut err = [0.0; N];
            for d in 0..N {
                err[d] = h * (0..7).map(|j| E[j] * k[j][d]).sum::<f64>();
            }
            let mut y_new = *y;
            for d in 0..N {
                y_new[d] += h * (0..7).map(|j| B[j] * k[j][d]).sum::<f64>();
            }
            return Ok((y_new, k[6], err));
        }
    }
    unreachable!()
}

fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], tol: Tolerances) -> f64 {
    let sum: f64 = (0..N)
        .map(|d| {
            let scale = tol.atol + tol.rtol * y[d].abs().max(y_new[d].abs());
            (err[d] / scale).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}
