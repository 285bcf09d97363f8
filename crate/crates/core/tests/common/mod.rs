#![allow(dead_code)]

use privtrack::analysis::boundary_triangles;
use privtrack::classifier::{classify, ClassKind};
use privtrack::{ProblemInstance, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DEN: i64 = 1000;

/// Random rescaling so instances are not all at `delta = 2`.
fn rescale(rng: &mut ChaCha8Rng, p: ProblemInstance) -> ProblemInstance {
    let lambda = Rational::ratio(rng.gen_range(1..=400), 4);
    p.scaled(&lambda).expect("positive scale")
}

fn point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Rational {
    let lo = (lo * DEN as f64).floor() as i64;
    let hi = (hi * DEN as f64).ceil() as i64;
    Rational::ratio(rng.gen_range(lo.max(1)..=hi.max(lo.max(1))), DEN)
}

/// Boundary instance, sampled near one of the triangles.
pub fn boundary_instance(rng: &mut ChaCha8Rng) -> ProblemInstance {
    loop {
        let c = rng.gen_range(2..=6u64);
        let tris = boundary_triangles(c);
        let t = &tris[rng.gen_range(0..tris.len())];
        let xs: Vec<f64> = t.vertices.iter().map(|v| v.0.to_f64()).collect();
        let ys: Vec<f64> = t.vertices.iter().map(|v| v.1.to_f64()).collect();
        let fold = |v: &[f64], f: fn(f64, f64) -> f64| v.iter().copied().fold(v[0], f);
        let rp = point(rng, fold(&xs, f64::min), fold(&xs, f64::max));
        let rt = point(rng, fold(&ys, f64::min), fold(&ys, f64::max));
        let p = ProblemInstance::new(rp, rt, Rational::from(2), c).expect("positive");
        if classify(&p).is_boundary() {
            return rescale(rng, p);
        }
    }
}

/// Instance of the given class drawn uniformly from `(0, 2]^2` at `delta = 2`.
pub fn instance_of(rng: &mut ChaCha8Rng, kind: ClassKind) -> ProblemInstance {
    loop {
        let c = rng.gen_range(1..=8u64);
        let rp = point(rng, 0.0, 2.0);
        let rt = point(rng, 0.0, 2.0);
        let p = ProblemInstance::new(rp, rt, Rational::from(2), c).expect("positive");
        if classify(&p).kind() == kind {
            return rescale(rng, p);
        }
    }
}

/// Uniform rational in the closed interval `[lo, hi]`.
pub fn between(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let t = Rational::ratio(rng.gen_range(0..=DEN), DEN);
    lo + &(&(hi - lo) * &t)
}
