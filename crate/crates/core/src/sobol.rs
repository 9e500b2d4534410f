//! LP-tau (Sobol) low-discrepancy points.
//!
//! Points are generated in natural index order: point `n` is the XOR of the
//! direction numbers selected by the binary digits of `n`, so dimension 1 is
//! exactly the base-2 radical inverse and any index can be produced
//! independently of the others.

use thiserror::Error;

pub const MAX_DIMENSION: usize = 16;

const BITS: usize = 32;
const SCALE: f64 = 1.0 / (1u64 << BITS) as f64;

/// Primitive-polynomial coefficients `a` and initial direction integers `m`
/// for dimensions 2..=16 (Joe and Kuo, `new-joe-kuo-6.21201`).
const DIRECTION_TABLE: [(u32, &[u32]); MAX_DIMENSION - 1] = [
    (0, &[1]),
    (1, &[1, 3]),
    (1, &[1, 3, 1]),
    (2, &[1, 1, 1]),
    (1, &[1, 1, 3, 3]),
    (4, &[1, 3, 5, 13]),
    (2, &[1, 1, 5, 5, 17]),
    (4, &[1, 1, 5, 5, 5]),
    (7, &[1, 1, 7, 11, 19]),
    (11, &[1, 1, 5, 1, 1]),
    (13, &[1, 1, 1, 3, 11]),
    (14, &[1, 3, 5, 5, 31]),
    (1, &[1, 3, 3, 9, 7, 49]),
    (13, &[1, 1, 1, 15, 21, 21]),
    (16, &[1, 3, 1, 13, 27, 49]),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SobolError {
    #[error("dimension must be in 1..={MAX_DIMENSION}, got {0}")]
    UnsupportedDimension(usize),
    #[error("index range exceeds 2^32 points")]
    IndexOverflow,
}

fn directions(a: u32, m: &[u32]) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    let s = m.len();
    for (i, &mi) in m.iter().enumerate() {
        v[i] = mi << (BITS - 1 - i);
    }
    for i in s..BITS {
        let mut x = v[i - s] ^ (v[i - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                x ^= v[i - k];
            }
        }
        v[i] = x;
    }
    v
}

#[derive(Debug, Clone)]
pub struct LpTau {
    directions: Vec<[u32; BITS]>,
}

impl LpTau {
    pub fn new(dimension: usize) -> Result<Self, SobolError> {
        if !(1..=MAX_DIMENSION).contains(&dimension) {
            return Err(SobolError::UnsupportedDimension(dimension));
        }
        let mut dirs = Vec::with_capacity(dimension);
        dirs.push(std::array::from_fn(|i| 1u32 << (BITS - 1 - i)));
        for &(a, m) in DIRECTION_TABLE.iter().take(dimension - 1) {
            dirs.push(directions(a, m));
        }
        Ok(Self { directions: dirs })
    }

    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// Writes point `index` into `out` (length = dimension).
    pub fn fill_point(&self, index: u32, out: &mut [f64]) {
        for (value, dirs) in out.iter_mut().zip(&self.directions) {
            let mut x = 0u32;
            let mut n = index;
            let mut bit = 0;
            while n != 0 {
                if n & 1 == 1 {
                    x ^= dirs[bit];
                }
                n >>= 1;
                bit += 1;
            }
            *value = x as f64 * SCALE;
        }
    }

    pub fn point(&self, index: u32) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.fill_point(index, &mut out);
        out
    }
}

/// `count` points starting at sequence index `skip` (index 0 is the origin).
pub fn lp_tau(dimension: usize, count: usize, skip: usize) -> Result<Vec<Vec<f64>>, SobolError> {
    let generator = LpTau::new(dimension)?;
    let end = skip.checked_add(count).ok_or(SobolError::IndexOverflow)?;
    if end as u64 > 1u64 << BITS {
        return Err(SobolError::IndexOverflow);
    }
    Ok((skip..end).map(|i| generator.point(i as u32)).collect())
}
