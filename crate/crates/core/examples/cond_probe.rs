use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use wlab_core::grid::CollocationGrid;

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for n in [128usize, 256] {
        let g = CollocationGrid::new(n);
        // modal laplacian matrix: synthesis * diag(-k(k+1)) * analysis
        let mut synth = DMatrix::zeros(n, n);
        for i in 0..n {
            let x = g.node(i);
            let mut pm = 1.0;
            let mut p = x;
            for k in 0..n {
                synth[(i, k)] = match k {
                    0 => 1.0,
                    1 => x,
                    _ => {
                        let kf = (k - 1) as f64;
                        let pn = ((2.0 * kf + 1.0) * x * p - kf * pm) / (kf + 1.0);
                        pm = p; p = pn; pn
                    }
                };
            }
        }
        // analysis from grid
        let mut modal = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut unit = DVector::zeros(n);
            unit[k] = 1.0;
            let c = g.legendre_coeffs(&unit);
            for row in 0..n {
                modal[(row, k)] = c[row] * (-(row as f64) * (row as f64 + 1.0));
            }
        }
        let modal_lap = &synth * &modal;

        // noise response: smooth f plus white noise 1e-13
        let f = DVector::from_iterator(n, g.nodes().iter().map(|&x: &f64| (1.3 * x).sin()));
        let noise = DVector::from_iterator(n, (0..n).map(|_| 1e-13 * rng.gen_range(-1.0..1.0)));
        let fn_ = &f + &noise;
        let resp_matrix = (g.round_laplacian(&fn_) - g.round_laplacian(&f)).amax();
        let resp_modal = ((&modal_lap * &fn_) - (&modal_lap * &f)).amax();
        // accuracy check of the modal route: D(1-x^2)D sin(1.3x)
        let exact = DVector::from_iterator(n, g.nodes().iter().map(|&x: &f64| {
            -2.0 * x * 1.3 * (1.3 * x).cos() + (1.0 - x * x) * (-1.69) * (1.3 * x).sin()
        }));
        let acc_matrix = (g.round_laplacian(&f) - &exact).amax();
        let acc_modal = ((&modal_lap * &f) - &exact).amax();
        println!("n={n}: noise response matrix {resp_matrix:.2e} modal {resp_modal:.2e}; accuracy matrix {acc_matrix:.2e} modal {acc_modal:.2e}");
    }
}
