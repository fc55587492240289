use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::harness::rng::SplitMix64;
use crate::spectral::{Grid, RealField};

/// Initial data produced by an experiment id.
#[derive(Debug, Clone)]
pub enum IcFields {
    Scalar(RealField),
    Pair(RealField, RealField),
}

impl IcFields {
    pub fn phi(&self) -> &RealField {
        match self {
            IcFields::Scalar(f) | IcFields::Pair(f, _) => f,
        }
    }

    pub fn rho(&self) -> Option<&RealField> {
        match self {
            IcFields::Scalar(_) => None,
            IcFields::Pair(_, r) => Some(r),
        }
    }
}

/// Deterministic initial condition for a named experiment. `epsilon` is the
/// interface width used by the bubble profile (ignored elsewhere); random
/// fields draw from SplitMix64 in row-major order.
pub fn initial_condition(id: &str, grid: Grid, seed: u64, epsilon: f64) -> Result<IcFields> {
    match id {
        "example1" => Ok(IcFields::Scalar(RealField::from_fn(grid, |x, y| {
            0.05 * x.sin() * y.sin()
        }))),
        "example2" => {
            // two osculating bubbles with a tanh interface profile
            let r0 = 0.19;
            let centers = [(0.3, 0.5), (0.7, 0.5)];
            let w = 2.0f64.sqrt() * epsilon;
            Ok(IcFields::Scalar(RealField::from_fn(grid, |x, y| {
                let mut v = 1.0;
                for (cx, cy) in centers {
                    let d = ((x - cx) * (x - cx) + (y - cy) * (y - cy)).sqrt();
                    v -= ((d - r0) / w).tanh();
                }
                v
            })))
        }
        "example3" => {
            let mut rng = SplitMix64::new(seed);
            Ok(IcFields::Scalar(RealField::from_fn(grid, |_, _| {
                0.25 + 0.4 * rng.next_uniform()
            })))
        }
        "example4" => Ok(IcFields::Scalar(crystallites(grid))),
        "example5" => {
            // zero-mean random perturbation around 0.07
            let mut rng = SplitMix64::new(seed);
            let mut noise = RealField::from_fn(grid, |_, _| rng.next_uniform());
            let mean =
                crate::spectral::quadrature::sum(noise.values()) / grid.len() as f64;
            for v in noise.values_mut() {
                *v = 0.07 + 0.07 * (*v - mean);
            }
            Ok(IcFields::Scalar(noise))
        }
        "example6" => Ok(IcFields::Pair(
            RealField::from_fn(grid, |x, y| 0.3 * (3.0 * x).cos() + 0.5 * y.cos()),
            RealField::from_fn(grid, |x, y| 0.2 * (2.0 * x).cos() + 0.25 * y.sin()),
        )),
        "example7" => {
            let mut rng = SplitMix64::new(seed);
            let phi = RealField::from_fn(grid, |_, _| 0.001 * rng.next_uniform());
            let rho = RealField::from_fn(grid, |_, _| 0.2 + 0.001 * rng.next_uniform());
            Ok(IcFields::Pair(phi, rho))
        }
        "sine" => Ok(IcFields::Scalar(RealField::from_fn(grid, |x, _| x.sin()))),
        other => Err(Error::InvalidArgument(format!(
            "unknown initial-condition id `{other}`"
        ))),
    }
}

/// Three crystallite patches on axis-aligned squares of side 40, each with
/// its own lattice orientation.
fn crystallites(grid: Grid) -> RealField {
    let phi_bar = 0.285;
    let amp = 0.446;
    let q = 0.66;
    let patches = [
        (150.0, 150.0, PI / 4.0),
        (200.0, 250.0, 0.0),
        (250.0, 150.0, -PI / 4.0),
    ];
    let half = 20.0;
    RealField::from_fn(grid, |x, y| {
        for (cx, cy, theta) in patches {
            if (x - cx).abs() <= half && (y - cy).abs() <= half {
                let xl = x * theta.sin() + y * theta.cos();
                let yl = -x * theta.cos() + y * theta.sin();
                return phi_bar
                    + amp
                        * ((q / 3.0f64.sqrt() * yl).cos() * (q * xl).cos()
                            - 0.5 * (2.0 * q / 3.0f64.sqrt() * yl).cos());
            }
        }
        phi_bar
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_value_at_quarter_point() {
        let g = Grid::square(128, 2.0 * PI).unwrap();
        let f = initial_condition("example1", g, 0, 0.1).unwrap();
        // x = y = pi/2 is grid point (32, 32)
        assert!((f.phi().at(32, 32) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn example2_center_matches_direct_formula() {
        let g = Grid::square(256, 1.0).unwrap();
        let eps = 0.01;
        let f = initial_condition("example2", g, 0, eps).unwrap();
        // bubble-1 center (0.3, 0.5) lies on the grid: i = 76.8 is not an
        // integer, so evaluate the formula at an actual grid point instead
        let (i, j) = (77, 128);
        let (x, y) = (g.x(i), g.y(j));
        let r0 = 0.19;
        let w = 2.0f64.sqrt() * eps;
        let d1 = ((x - 0.3f64).powi(2) + (y - 0.5f64).powi(2)).sqrt();
        let d2 = ((x - 0.7f64).powi(2) + (y - 0.5f64).powi(2)).sqrt();
        let expect = 1.0 - ((d1 - r0) / w).tanh() - ((d2 - r0) / w).tanh();
        assert!((f.phi().at(i, j) - expect).abs() < 1e-14);
        // near the center: 1 + tanh(R0/w) - tanh((d2 - R0)/w), which is ~1
        assert!((f.phi().at(i, j) - 1.0).abs() < 0.05);
        // far corner is the minus phase
        assert!(f.phi().at(0, 0) < -0.9);
    }

    #[test]
    fn seeded_fields_are_bitwise_reproducible() {
        let g = Grid::square(64, 2.0 * PI).unwrap();
        for id in ["example3", "example5", "example7"] {
            let a = initial_condition(id, g, 7, 0.1).unwrap();
            let b = initial_condition(id, g, 7, 0.1).unwrap();
            match (a, b) {
                (IcFields::Scalar(x), IcFields::Scalar(y)) => {
                    assert_eq!(x.values(), y.values(), "{id}");
                }
                (IcFields::Pair(x1, x2), IcFields::Pair(y1, y2)) => {
                    assert_eq!(x1.values(), y1.values(), "{id}");
                    assert_eq!(x2.values(), y2.values(), "{id}");
                }
                _ => panic!("shape changed between calls"),
            }
        }
    }

    #[test]
    fn example5_perturbation_is_zero_mean() {
        let g = Grid::square(128, 128.0).unwrap();
        let f = initial_condition("example5", g, 3, 0.1).unwrap();
        let mean = crate::spectral::quadrature::sum(f.phi().values()) / g.len() as f64;
        assert!((mean - 0.07).abs() < 1e-13, "mean = {mean}");
    }

    #[test]
    fn example4_background_and_patch() {
        let g = Grid::square(256, 400.0).unwrap();
        let f = initial_condition("example4", g, 0, 0.1).unwrap();
        // far from all patches
        assert!((f.phi().at(0, 0) - 0.285).abs() < 1e-15);
        // inside the unrotated patch at (200, 250): lattice modulation present
        let i = (200.0 / g.hx()).round() as usize;
        let j = (250.0 / g.hy()).round() as usize;
        assert!((f.phi().at(i, j) - 0.285).abs() > 1e-3);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let g = Grid::square(16, 1.0).unwrap();
        assert!(initial_condition("example99", g, 0, 0.1).is_err());
    }
}
