#![allow(dead_code)]

use std::f64::consts::PI;

use helstrom::{PureFamily, QubitModel, WeightFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_family<R: Rng>(rng: &mut R) -> PureFamily {
    match rng.gen_range(0..3) {
        0 => PureFamily::xz_circle(),
        // keep the fixed colatitude off the poles so the longitude moves the state
        1 => PureFamily::longitude(rng.gen_range(0.2..PI - 0.2)),
        _ => PureFamily::colatitude(rng.gen_range(-PI..PI)),
    }
}

fn weight_ok(w: f64) -> bool {
    w > 0.03 && w < 0.97 && (w - 0.5).abs() > 0.03
}

/// Random weight family valid at `theta`.
pub fn random_weight<R: Rng>(rng: &mut R, theta: f64) -> WeightFamily {
    loop {
        let cand = match rng.gen_range(0..3) {
            0 => WeightFamily::Const {
                value: rng.gen_range(0.05..0.95),
            },
            1 => WeightFamily::Affine {
                a: rng.gen_range(0.05..0.95),
                b: rng.gen_range(-0.2..0.2),
            },
            _ => WeightFamily::Sinusoidal {
                a: rng.gen_range(0.2..0.8),
                b: rng.gen_range(-0.15..0.15),
            },
        };
        let (w, _) = cand.eval_unchecked(theta);
        let (wl, _) = cand.eval_unchecked(theta - 1e-4);
        let (wh, _) = cand.eval_unchecked(theta + 1e-4);
        if weight_ok(w) && weight_ok(wl) && weight_ok(wh) {
            return cand;
        }
    }
}

pub fn random_theta<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-PI..PI)
}

/// Random `(model, theta)` pair; pure with probability 1/4.
pub fn random_model<R: Rng>(rng: &mut R) -> (QubitModel, f64) {
    let theta = random_theta(rng);
    let family = random_family(rng);
    if rng.gen_bool(0.25) {
        (QubitModel::pure(family), theta)
    } else {
        (QubitModel::mixed(family, random_weight(rng, theta)), theta)
    }
}

pub fn random_mixed_model<R: Rng>(rng: &mut R) -> (QubitModel, f64) {
    let theta = random_theta(rng);
    let family = random_family(rng);
    (QubitModel::mixed(family, random_weight(rng, theta)), theta)
}

/// Fuzzed model/theta with the pure part moving (I1 bounded away from zero).
pub fn random_moving_model<R: Rng>(rng: &mut R, mixed_only: bool) -> (QubitModel, f64) {
    loop {
        let (m, t) = if mixed_only { random_mixed_model(rng) } else { random_model(rng) };
        if m.qfi_pure_part(t) > 1e-3 {
            return (m, t);
        }
    }
}
