//! Containment fuzz for the interval substrate: for random operand
//! intervals and random point selections inside them, the exact point
//! result must lie in the output interval. 1e5 trials per operation.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use woods10_core::{Interval, IntervalError};

const TRIALS: usize = 100_000;

fn rand_interval(rng: &mut StdRng) -> Interval {
    // mix magnitudes so subnormal and large ranges both get exercised
    let scale = 10f64.powi(rng.gen_range(-12..=6));
    let a = (rng.gen::<f64>() - 0.5) * scale;
    let b = a + rng.gen::<f64>() * scale * rng.gen::<f64>();
    Interval::new(a.min(b), a.max(b))
}

fn rand_point_in(rng: &mut StdRng, iv: Interval) -> f64 {
    let t: f64 = rng.gen();
    let p = iv.lo() + t * (iv.hi() - iv.lo());
    p.clamp(iv.lo(), iv.hi())
}

#[test]
fn add_containment() {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..TRIALS {
        let (x, y) = (rand_interval(&mut rng), rand_interval(&mut rng));
        let r = x.add(y);
        let (a, b) = (rand_point_in(&mut rng, x), rand_point_in(&mut rng, y));
        assert!(r.contains(a + b), "{x:?} + {y:?} = {r:?} misses {a} + {b}");
    }
}

#[test]
fn mul_containment() {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..TRIALS {
        let (x, y) = (rand_interval(&mut rng), rand_interval(&mut rng));
        let r = x.mul(y);
        let (a, b) = (rand_point_in(&mut rng, x), rand_point_in(&mut rng, y));
        assert!(r.contains(a * b), "{x:?} * {y:?} = {r:?} misses {a} * {b}");
    }
}

#[test]
fn div_containment() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut done = 0;
    while done < TRIALS {
        let x = rand_interval(&mut rng);
        let y = rand_interval(&mut rng);
        match x.div(y) {
            Err(e) => {
                assert_eq!(e, IntervalError::DivisorContainsZero);
                assert!(y.contains(0.0));
                continue;
            }
            Ok(r) => {
                let (a, b) = (rand_point_in(&mut rng, x), rand_point_in(&mut rng, y));
                assert!(r.contains(a / b), "{x:?} / {y:?} = {r:?} misses {a} / {b}");
                done += 1;
            }
        }
    }
}

#[test]
fn pow_containment() {
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..TRIALS {
        let x = rand_interval(&mut rng);
        let k = rng.gen_range(1u32..=7);
        let r = x.pow_int(k);
        let a = rand_point_in(&mut rng, x);
        assert!(
            r.contains(a.powi(k as i32)),
            "{x:?}^{k} = {r:?} misses {a}^{k}"
        );
    }
}

#[test]
fn root_containment() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..TRIALS {
        let raw = rand_interval(&mut rng);
        let x = Interval::new(raw.lo().abs().min(raw.hi().abs()), raw.lo().abs().max(raw.hi().abs()));
        let k = rng.gen_range(2u32..=9);
        let r = x.root(k).unwrap();
        let a = rand_point_in(&mut rng, x);
        assert!(
            r.contains(a.powf(1.0 / k as f64)),
            "{x:?}^(1/{k}) = {r:?} misses root of {a}"
        );
    }
}

#[test]
fn monotone_inclusion() {
    // x ⊆ x', y ⊆ y' implies op(x,y) ⊆ op(x',y')
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..20_000 {
        let xo = rand_interval(&mut rng);
        let yo = rand_interval(&mut rng);
        let shrink = |rng: &mut StdRng, iv: Interval| {
            let a = rand_point_in(rng, iv);
            let b = rand_point_in(rng, iv);
            Interval::new(a.min(b), a.max(b))
        };
        let x = shrink(&mut rng, xo);
        let y = shrink(&mut rng, yo);
        assert!(xo.add(yo).contains_interval(x.add(y)));
        assert!(xo.mul(yo).contains_interval(x.mul(y)));
        if let (Ok(big), Ok(small)) = (xo.div(yo), x.div(y)) {
            assert!(big.contains_interval(small));
        }
        let k = rng.gen_range(1u32..=6);
        assert!(xo.pow_int(k).contains_interval(x.pow_int(k)));
    }
}

#[test]
fn width_never_negative() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20_000 {
        let x = rand_interval(&mut rng);
        let y = rand_interval(&mut rng);
        assert!(x.add(y).width() >= 0.0);
        assert!(x.mul(y).width() >= 0.0);
        assert!(x.sub(y).width() >= 0.0);
    }
}
