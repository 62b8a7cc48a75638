/// One classical Runge-Kutta step for an autonomous system `y' = f(y)`.
pub fn rk4_step<const N: usize, F>(y: &[f64; N], dt: f64, f: F) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * dt, &k1));
    let k3 = f(&axpy(y, 0.5 * dt, &k2));
    let k4 = f(&axpy(y, dt, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, x: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * x[i];
    }
    out
}
