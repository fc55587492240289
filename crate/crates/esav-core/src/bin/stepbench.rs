use esav_core::models::ModelSpec;
use esav_core::schemes::{EsavFirstOrder, EsavState, SavFirstOrder, SavState};
use esav_core::spectral::{Grid, RealField};
use std::time::Instant;

fn main() {
    let g = Grid::square(128, 2.0 * std::f64::consts::PI).unwrap();
    let model = ModelSpec::AllenCahn { mobility: 1.0, epsilon: 0.1 };
    let phi0 = RealField::from_fn(g, |x, y| 0.05 * x.sin() * y.sin());

    let mut esav = EsavFirstOrder::new(model, g, 1e-6).unwrap();
    let mut state = EsavState::new(esav.fft(), &model, phi0.clone(), None).unwrap();
    let n = 20000;
    let t0 = Instant::now();
    for _ in 0..n {
        state = esav.step(state).unwrap().0;
    }
    let esav_us = t0.elapsed().as_secs_f64() / n as f64 * 1e6;

    let mut sav = SavFirstOrder::new(model, g, 1e-6).unwrap();
    let mut sstate = SavState::new(sav.fft(), &model, phi0, Some(1.0)).unwrap();
    let t0 = Instant::now();
    for _ in 0..n {
        sstate = sav.step(sstate).unwrap().0;
    }
    let sav_us = t0.elapsed().as_secs_f64() / n as f64 * 1e6;
    println!("esav1 step: {esav_us:.1} us   sav1 step: {sav_us:.1} us   (128^2)");
    println!("3.2M-step reference projections: esav {:.1} min, sav {:.1} min",
        3.2e6 * esav_us / 6e7, 3.2e6 * sav_us / 6e7);
    println!("sink: {} {}", state.s(), sstate.r());
}
