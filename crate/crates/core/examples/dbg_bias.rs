use hamsplit_core::geom::{Hyperplane, Vector};
use hamsplit_core::measure::Measure;

fn main() {
    let m = Measure::uniform_ball(Vector::new(vec![-3.0, 0.0]), 1.0).unwrap();
    let v = Vector::new(vec![0.10656383659810943, 0.9943058627653221]);
    let h = Hyperplane::from_unit(v, 0.0).unwrap();
    let exact = m.mass_halfspace(&h).unwrap().value;
    for samples in [200_000, 2_000_000, 8_000_000] {
        for seed in [0x5eedu64, 1, 7, 99] {
            let mc = m.mass_halfspace_mc(&h, samples, seed).unwrap();
            let sigma = mc.error_bound / 3.0;
            println!("N={samples} seed={seed}: dev={:+.5} ({:+.2} sigma)", mc.value - exact, (mc.value - exact) / sigma);
        }
    }
}
