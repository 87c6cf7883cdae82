//! Sobol low-discrepancy sequences with random digital shifts.
//!
//! Direction numbers are the Joe-Kuo values for the first ten dimensions,
//! which covers every integration dimension the engine uses. Randomized
//! estimates average several digitally shifted replicates and report the
//! spread as an empirical error estimate.

use crate::rng::CounterRng;

// (s, a, m[..s]) per dimension beyond the first (van der Corput) one.
const JOE_KUO: [(u32, u32, [u32; 5]); 9] = [
    (1, 0, [1, 0, 0, 0, 0]),
    (2, 1, [1, 3, 0, 0, 0]),
    (3, 1, [1, 3, 1, 0, 0]),
    (3, 2, [1, 1, 1, 0, 0]),
    (4, 1, [1, 1, 3, 3, 0]),
    (4, 4, [1, 3, 5, 13, 0]),
    (5, 2, [1, 1, 5, 5, 17]),
    (5, 4, [1, 1, 5, 5, 5]),
    (5, 7, [1, 1, 7, 11, 19]),
];

const BITS: u32 = 31;

pub struct Sobol {
    v: Vec<[u32; BITS as usize + 1]>,
    x: Vec<u32>,
    index: u64,
}

impl Sobol {
    pub fn new(dim: usize) -> Self {
        assert!(
            (1..=JOE_KUO.len() + 1).contains(&dim),
            "sobol dimension {dim} outside supported range"
        );
        let mut v = Vec::with_capacity(dim);
        // dimension 1: van der Corput
        let mut v1 = [0u32; BITS as usize + 1];
        for (i, slot) in v1.iter_mut().enumerate().skip(1) {
            *slot = 1 << (32 - i as u32);
        }
        v.push(v1);
        for d in 0..dim.saturating_sub(1) {
            let (s, a, m) = JOE_KUO[d];
            let s = s as usize;
            let mut vd = [0u32; BITS as usize + 1];
            for i in 1..=BITS as usize {
                if i <= s {
                    vd[i] = m[i - 1] << (32 - i as u32);
                } else {
                    let mut val = vd[i - s] ^ (vd[i - s] >> s as u32);
                    for k in 1..s {
                        if (a >> (s - 1 - k)) & 1 == 1 {
                            val ^= vd[i - k];
                        }
                    }
                    vd[i] = val;
                }
            }
            v.push(vd);
        }
        Sobol {
            v,
            x: vec![0; dim],
            index: 0,
        }
    }

    /// Advance and return the raw integer lattice point (gray-code order).
    pub fn next_raw(&mut self) -> &[u32] {
        let c = (self.index.trailing_ones() + 1) as usize;
        debug_assert!(c <= BITS as usize);
        for (xi, vi) in self.x.iter_mut().zip(&self.v) {
            *xi ^= vi[c];
        }
        self.index += 1;
        &self.x
    }

    /// Next point with a digital shift applied, mapped into (0, 1)^dim.
    pub fn next_shifted(&mut self, shift: &[u32], out: &mut [f64]) {
        let raw = self.next_raw();
        for ((o, &x), &s) in out.iter_mut().zip(raw).zip(shift) {
            *o = ((x ^ s) as f64 + 0.5) * (1.0 / 4294967296.0);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QmcEstimate {
    pub value: f64,
    /// Standard error across the shifted replicates.
    pub std_error: f64,
}

/// Randomized QMC mean of `f` over the unit cube: `shifts` digitally
/// shifted Sobol streams of 2^log2_points points each.
pub fn integrate_unit_cube<F: Fn(&[f64]) -> f64 + Sync>(
    f: F,
    dim: usize,
    log2_points: u32,
    shifts: u32,
    seed: u64,
) -> QmcEstimate {
    let n = 1u64 << log2_points;
    let mut means = Vec::with_capacity(shifts as usize);
    let mut point = vec![0.0; dim];
    for r in 0..shifts {
        let mut rng = CounterRng::substream(seed, r as u64);
        let shift: Vec<u32> = (0..dim).map(|_| (rng.next_u64() >> 32) as u32).collect();
        let mut sobol = Sobol::new(dim);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for _ in 0..n {
            sobol.next_shifted(&shift, &mut point);
            let y = f(&point) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        means.push(sum / n as f64);
    }
    let m = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        / (means.len().saturating_sub(1).max(1)) as f64;
    QmcEstimate {
        value: m,
        std_error: (var / means.len() as f64).sqrt(),
    }
}
