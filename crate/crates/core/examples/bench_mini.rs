use std::sync::Arc;
use std::time::Instant;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use leavitt::graph::Graph;
use leavitt::sampling;
use leavitt::scalar::FieldSpec;
use leavitt::structure::{decompose, projection_for_idempotent, unit_regular_witness, Model};

fn main() {
    let g = Arc::new(Graph::parse(
        r#"{"vertices":["u","v","w"],"edges":[["a","v","w"],["b","w","v"],["t","u","v"]]}"#,
    ).unwrap());
    let d = decompose(&g).unwrap();
    let spec = FieldSpec::gaussian_rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let t0 = Instant::now();
    for i in 0..5 {
        let a = sampling::random_block_matrix(&mut rng, &d, Model::Q, spec, 1);
        let u = unit_regular_witness(&a).unwrap();
        assert_eq!(a.mul(&u).mul(&a), a);
        println!("unit_regular {} at {:?}", i, t0.elapsed());
    }
    let t1 = Instant::now();
    for i in 0..5 {
        let e = sampling::random_idempotent(&mut rng, &d, spec, 1);
        let p = projection_for_idempotent(&e).unwrap();
        assert_eq!(p.star(), p);
        println!("projection {} at {:?}", i, t1.elapsed());
    }
}
