use crate::error::Result;
use crate::spectral::{Grid, RealField, SpectralField};

/// Striped summation with 8 independent accumulators. Keeps the rounding
/// error far below the mass-conservation tolerances without the latency
/// chain of compensated summation.
#[inline]
pub fn sum(values: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let chunks = values.chunks_exact(8);
    let rem = chunks.remainder();
    for c in chunks {
        for (a, v) in acc.iter_mut().zip(c) {
            *a += *v;
        }
    }
    let mut tail = 0.0;
    for v in rem {
        tail += *v;
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `sum(f(v) for v in values)` with the same striping.
#[inline]
pub fn sum_map(values: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut acc = [0.0f64; 8];
    let chunks = values.chunks_exact(8);
    let rem = chunks.remainder();
    for c in chunks {
        for (a, v) in acc.iter_mut().zip(c) {
            *a += f(*v);
        }
    }
    let mut tail = 0.0;
    for v in rem {
        tail += f(*v);
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `sum(f(a, b) for (a, b) in zip(xs, ys))` with the same striping.
#[inline]
pub fn sum_zip_map(xs: &[f64], ys: &[f64], mut f: impl FnMut(f64, f64) -> f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mut acc = [0.0f64; 8];
    let chunks = xs.chunks_exact(8).zip(ys.chunks_exact(8));
    for (cx, cy) in chunks {
        for ((a, x), y) in acc.iter_mut().zip(cx).zip(cy) {
            *a += f(*x, *y);
        }
    }
    let n = xs.len() - xs.len() % 8;
    let mut tail = 0.0;
    for (x, y) in xs[n..].iter().zip(&ys[n..]) {
        tail += f(*x, *y);
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Three-array variant of [`sum_zip_map`].
#[inline]
pub fn sum_zip3_map(
    xs: &[f64],
    ys: &[f64],
    zs: &[f64],
    mut f: impl FnMut(f64, f64, f64) -> f64,
) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert_eq!(xs.len(), zs.len());
    let mut acc = [0.0f64; 8];
    let chunks = xs
        .chunks_exact(8)
        .zip(ys.chunks_exact(8))
        .zip(zs.chunks_exact(8));
    for ((cx, cy), cz) in chunks {
        for (((a, x), y), z) in acc.iter_mut().zip(cx).zip(cy).zip(cz) {
            *a += f(*x, *y, *z);
        }
    }
    let n = xs.len() - xs.len() % 8;
    let mut tail = 0.0;
    for ((x, y), z) in xs[n..].iter().zip(&ys[n..]).zip(&zs[n..]) {
        tail += f(*x, *y, *z);
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Rectangle-rule integral `hx*hy * sum(f)`; spectrally accurate for smooth
/// periodic integrands.
pub fn integral(f: &RealField) -> f64 {
    f.grid().cell_area() * sum(f.values())
}

/// Discrete L2 inner product `hx*hy * sum(f .* g)`.
pub fn inner(f: &RealField, g: &RealField) -> Result<f64> {
    f.check_same_grid(g, "inner")?;
    Ok(f.grid().cell_area() * sum_zip_map(f.values(), g.values(), |x, y| x * y))
}

/// Discrete L2 norm `sqrt(hx*hy * sum(f^2))`.
pub fn l2_norm(f: &RealField) -> f64 {
    (f.grid().cell_area() * sum_map(f.values(), |x| x * x)).sqrt()
}

/// Discrete L2 norm of `f - g`.
pub fn l2_diff(f: &RealField, g: &RealField) -> Result<f64> {
    f.check_same_grid(g, "l2_diff")?;
    Ok((f.grid().cell_area() * sum_zip_map(f.values(), g.values(), |x, y| (x - y) * (x - y)))
        .sqrt())
}

/// Parseval weight of half-spectrum row `jc`: interior rows stand for a
/// conjugate pair, the `ky = 0` and Nyquist rows for themselves.
#[inline]
pub(crate) fn row_weight(grid: Grid, jc: usize) -> f64 {
    if jc == 0 || jc == grid.nyc() - 1 {
        1.0
    } else {
        2.0
    }
}

/// `inner(f, g)` evaluated in coefficient space via Parseval's identity.
pub fn inner_spectral(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.check_same_grid(b, "inner_spectral")?;
    let grid = a.grid();
    let nx = grid.nx();
    let mut total = 0.0;
    for jc in 0..grid.nyc() {
        let ra = &a.data()[jc * nx..(jc + 1) * nx];
        let rb = &b.data()[jc * nx..(jc + 1) * nx];
        let mut s = 0.0;
        for (x, y) in ra.iter().zip(rb) {
            s += x.re * y.re + x.im * y.im;
        }
        total += row_weight(grid, jc) * s;
    }
    Ok(total * grid.cell_area() / grid.len() as f64)
}

/// `inner(f, Op(symbol) f)` evaluated in coefficient space:
/// `sum(symbol(k) |f_hat(k)|^2)` with Parseval normalization.
pub fn quadratic_form(symbol: &[f64], a: &SpectralField) -> f64 {
    let grid = a.grid();
    let nx = grid.nx();
    let mut total = 0.0;
    for jc in 0..grid.nyc() {
        let row = &a.data()[jc * nx..(jc + 1) * nx];
        let sym = &symbol[jc * nx..(jc + 1) * nx];
        let mut s = 0.0;
        for (x, m) in row.iter().zip(sym) {
            s += m * (x.re * x.re + x.im * x.im);
        }
        total += row_weight(grid, jc) * s;
    }
    total * grid.cell_area() / grid.len() as f64
}
