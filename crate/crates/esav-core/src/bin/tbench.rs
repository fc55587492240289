use esav_core::spectral::{Fft2d, Grid, RealField};
use std::time::Instant;

fn main() {
    let g = Grid::square(128, 2.0 * std::f64::consts::PI).unwrap();
    let mut fft = Fft2d::new(g);
    let f = RealField::from_fn(g, |x, y| (x * 3.0).sin() + (y * 2.0).cos());
    let mut spec = fft.forward(&f).unwrap();
    let mut out = RealField::zeros(g);
    let n = 20000;
    let t0 = Instant::now();
    for _ in 0..n {
        fft.forward_into(&f, &mut spec).unwrap();
    }
    let fwd = t0.elapsed().as_secs_f64() / n as f64 * 1e6;
    let t0 = Instant::now();
    for _ in 0..n {
        fft.backward_into(&spec, &mut out).unwrap();
    }
    let bwd = t0.elapsed().as_secs_f64() / n as f64 * 1e6;
    println!("forward {fwd:.1} us, backward {bwd:.1} us, sink {}", out.at(3, 5));
}
