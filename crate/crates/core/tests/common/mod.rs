#![allow(dead_code)]

use mibound::{JointDist, ValidationPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn example1() -> JointDist {
    JointDist::new(&[[0.017, 0.285], [0.424, 0.274]], ValidationPolicy::Strict).unwrap()
}

pub fn example2() -> JointDist {
    JointDist::new(
        &[[0.090, 0.098, 0.207, 0.064, 0.026], [0.239, 0.030, 0.104, 0.107, 0.035]],
        ValidationPolicy::Strict,
    )
    .unwrap()
}

/// Example 3 exactly as printed; the entries sum to 0.937.
pub fn example3_printed() -> Vec<Vec<f64>> {
    vec![
        vec![0.101, 0.062, 0.025, 0.088, 0.005, 0.007, 0.069, 0.059, 0.080, 0.074],
        vec![0.103, 0.006, 0.038, 0.002, 0.018, 0.079, 0.049, 0.032, 0.020, 0.020],
    ]
}

/// Example 3 with entry (1, 6) read as 0.070 instead of the printed 0.007;
/// this sums to exactly 1.
pub fn example3_corrected() -> JointDist {
    let mut raw = example3_printed();
    raw[0][5] = 0.070;
    JointDist::new(&raw, ValidationPolicy::Strict).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random strictly positive 2 x `my` joint distribution.
pub fn random_joint<R: Rng>(rng: &mut R, my: usize) -> JointDist {
    let raw: Vec<f64> = (0..2 * my).map(|_| rng.random::<f64>() + 0.02).collect();
    let rows = [raw[..my].to_vec(), raw[my..].to_vec()];
    JointDist::new(&rows, ValidationPolicy::Renormalize).unwrap()
}
