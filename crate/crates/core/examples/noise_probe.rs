use nalgebra::DVector;
use wlab_core::grid::CollocationGrid;

fn main() {
    for n in [128usize, 256] {
        let g = CollocationGrid::new(n);
        // smooth test function with known laplacian: f = exp(mu):
        // d/dmu[(1-mu^2) e^mu] = (1 - 2mu - mu^2 + ... ) e^mu
        let f = DVector::from_iterator(n, g.nodes().iter().map(|&x: &f64| x.exp()));
        let exact = DVector::from_iterator(
            n,
            g.nodes().iter().map(|&x: &f64| ((1.0 - x * x) - 2.0 * x) * x.exp()),
        );
        let lap = g.round_laplacian(&f);
        let err_interior = (0..n)
            .filter(|&i| g.node(i).abs() < 0.99)
            .map(|i| (lap[i] - exact[i]).abs())
            .fold(0.0, f64::max);
        let err_all = (&lap - &exact).amax();
        // second derivative via D twice
        let d2 = g.deriv(&g.deriv(&f));
        let err_d2 = (0..n)
            .filter(|&i| g.node(i).abs() < 0.99)
            .map(|i| (d2[i] - g.node(i).exp()).abs())
            .fold(0.0, f64::max);
        println!("n={n}: lap err interior {err_interior:.2e}, all {err_all:.2e}; D^2 err interior {err_d2:.2e}");
    }
}
