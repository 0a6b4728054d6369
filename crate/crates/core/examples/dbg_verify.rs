use hamsplit_core::*;
use hamsplit_core::solver::*;
use hamsplit_core::geom::Vector;
use hamsplit_core::measure::Measure;

fn main() {
    let disc = |cx: f64, cy: f64, r: f64| Measure::uniform_ball(Vector::new(vec![cx, cy]), r).unwrap();
    let p = Problem::new(vec![disc(-3.0, 0.0, 1.0), disc(3.0, 0.0, 1.0)], vec![0.3, 0.7], None).unwrap();
    let cfg = SolveConfig { scan_resolution: 128, ..Default::default() };
    match find_split(&p, &cfg).unwrap() {
        SplitOutcome::Found(res) => {
            println!("v={:?} lam={} achieved={:?} res={} plateau={}", res.hyperplane.normal(), res.hyperplane.offset(), res.achieved, res.residual_norm, res.plateau);
            let rep = verify_split(&p, &res.hyperplane, 1e-6).unwrap();
            println!("pass={} recomputed={:?}", rep.pass, rep.recomputed);
            println!("mc={:?}", rep.monte_carlo);
        }
        SplitOutcome::NotFound(s) => println!("notfound best themselves={}", s.best_norm),
    }
}
