use rand_distr::{Binomial, Distribution, Hypergeometric, Poisson};

use crate::rng::SimRng;

pub(crate) fn binomial(rng: &mut SimRng, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p).expect("valid binomial").sample(rng)
    }
}

/// Sequential-binomial multinomial draw; the last implicit category
/// takes the remaining probability.
pub(crate) fn multinomial<const K: usize>(rng: &mut SimRng, n: u64, probs: [f64; K]) -> [u64; K] {
    let mut out = [0u64; K];
    let mut left = n;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        let k = if mass <= 0.0 { 0 } else { binomial(rng, left, (p / mass).min(1.0)) };
        out[i] = k;
        left -= k;
        mass -= p;
    }
    out
}

/// Number of marked items when drawing `draws` of `total` without
/// replacement, `marked` of which are marked.
pub(crate) fn hypergeometric(rng: &mut SimRng, total: u64, marked: u64, draws: u64) -> u64 {
    if draws == 0 || marked == 0 {
        0
    } else if marked == total {
        draws
    } else if draws == total {
        marked
    } else {
        Hypergeometric::new(total, marked, draws).expect("valid hypergeometric").sample(rng)
    }
}

/// Composition `(a, b, e)` of `draws` items drawn without replacement from
/// a pool; the pool is reduced accordingly.
pub(crate) fn split_group(rng: &mut SimRng, pool: &mut [u64; 3], draws: u64) -> [u64; 3] {
    let total = pool[0] + pool[1] + pool[2];
    let a = hypergeometric(rng, total, pool[0], draws);
    let b = hypergeometric(rng, total - pool[0], pool[1], draws - a);
    let e = draws - a - b;
    pool[0] -= a;
    pool[1] -= b;
    pool[2] -= e;
    [a, b, e]
}

pub(crate) fn poisson(rng: &mut SimRng, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        0
    } else {
        Poisson::new(lambda).expect("valid poisson").sample(rng) as u64
    }
}
