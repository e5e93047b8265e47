// probe 7: acceptance-8 configuration with spec-default solver settings
use edgeo::geometry::{squared_edm, PointConfig};
use edgeo::nystrom::center_blocks;
use edgeo::sampling::{draw_samples_per_column, observe};
use edgeo::solver::{recover_b_nuclear, Method, SolverConfig};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type M = DMatrix<f64>;

fn main() {
    let cfg = SolverConfig { method: Method::NuclearNorm, max_iters: 2000, ..Default::default() };
    let mut ok = 0; let mut worst_rel: f64 = 0.0; let mut worst_it = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let coords = M::from_fn(2, 50, |_, _| rng.random_range(-1.0..1.0));
        let pc = PointConfig::new(coords, 10).unwrap();
        let d = squared_edm(&pc);
        let (_, b_true) = center_blocks(&d.e_block(), &d.f_block()).unwrap();
        let omega = draw_samples_per_column(10, 40, 8, seed).unwrap();
        let obs = observe(&d, &omega).unwrap();
        let solve = recover_b_nuclear(&obs, &cfg).unwrap();
        let rel = (&solve.b - &b_true).norm() / b_true.norm();
        if rel <= 1e-3 { ok += 1; }
        worst_rel = worst_rel.max(rel);
        worst_it = worst_it.max(solve.iterations);
    }
    println!("defaults at k=8: ok {ok}/20, worst rel {worst_rel:.2e}, worst iters {worst_it}");
}
