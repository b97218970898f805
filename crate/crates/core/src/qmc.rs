//! Four-dimensional Sobol' points with random linear scrambling and digital
//! shift (Matousek), the randomization used for replicated QMC estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 4;
const BITS: usize = 32;

/// Joe-Kuo primitive polynomials `(degree, interior coefficients, initial m)`
/// for dimensions 2..=4; dimension 1 is van der Corput.
const POLYS: [(u32, u32, &[u32]); DIM - 1] = [(1, 0, &[1]), (2, 1, &[1, 3]), (3, 1, &[1, 3, 1])];

#[derive(Debug, Clone)]
pub struct Sobol4 {
    directions: [[u32; BITS]; DIM],
    shift: [u32; DIM],
}

fn unscrambled_directions() -> [[u32; BITS]; DIM] {
    let mut v = [[0u32; BITS]; DIM];
    for (k, d) in v[0].iter_mut().enumerate() {
        *d = 1 << (BITS - 1 - k);
    }
    for (dim, &(s, a, init)) in POLYS.iter().enumerate() {
        let s = s as usize;
        let mut m = vec![0u64; BITS];
        m[..s].copy_from_slice(&init.iter().map(|&x| x as u64).collect::<Vec<_>>());
        for k in s..BITS {
            let mut next = m[k - s] ^ (m[k - s] << s);
            for i in 1..s {
                if (a >> (s - 1 - i)) & 1 == 1 {
                    next ^= m[k - i] << i;
                }
            }
            m[k] = next;
        }
        for k in 0..BITS {
            v[dim + 1][k] = (m[k] << (BITS - 1 - k)) as u32;
        }
    }
    v
}

impl Sobol4 {
    /// The plain sequence, first point at the origin.
    pub fn unscrambled() -> Self {
        Sobol4 {
            directions: unscrambled_directions(),
            shift: [0; DIM],
        }
    }

    /// Independent randomization per `(seed, replica)`.
    pub fn scrambled(seed: u64, replica: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replica);
        let base = unscrambled_directions();
        let mut directions = [[0u32; BITS]; DIM];
        let mut shift = [0u32; DIM];
        for dim in 0..DIM {
            // lower-triangular with unit diagonal, MSB-first: row i sees input bits 0..=i
            let mut rows = [0u32; BITS];
            for (i, row) in rows.iter_mut().enumerate() {
                let top = 1u32 << (BITS - 1 - i);
                let above = if i == 0 { 0 } else { !((top << 1) - 1) };
                *row = top | (rng.gen::<u32>() & above);
            }
            for k in 0..BITS {
                let v = base[dim][k];
                let mut out = 0u32;
                for (i, row) in rows.iter().enumerate() {
                    if (row & v).count_ones() & 1 == 1 {
                        out |= 1 << (BITS - 1 - i);
                    }
                }
                directions[dim][k] = out;
            }
            shift[dim] = rng.gen();
        }
        Sobol4 { directions, shift }
    }

    /// Raw integer coordinates of point `index`.
    pub fn point_bits(&self, index: u64) -> [u32; DIM] {
        let gray = index ^ (index >> 1);
        let mut out = self.shift;
        for k in 0..BITS.min(64) {
            if (gray >> k) & 1 == 1 {
                for d in 0..DIM {
                    out[d] ^= self.directions[d][k];
                }
            }
        }
        out
    }

    /// Iterator over points `start..start + len` as coordinates in `(0, 1)`.
    pub fn points(&self, start: u64, len: u64) -> Points<'_> {
        Points {
            seq: self,
            next: start,
            end: start + len,
            state: self.point_bits(start),
        }
    }
}

/// Gray-code walk: consecutive points differ by one direction number.
pub struct Points<'a> {
    seq: &'a Sobol4,
    next: u64,
    end: u64,
    state: [u32; DIM],
}

#[inline]
fn to_unit(bits: u32) -> f64 {
    (bits as f64 + 0.5) * (1.0 / 4_294_967_296.0)
}

impl Iterator for Points<'_> {
    type Item = [f64; DIM];

    fn next(&mut self) -> Option<[f64; DIM]> {
        if self.next >= self.end {
            return None;
        }
        let p = self.state.map(to_unit);
        let k = (self.next + 1).trailing_zeros() as usize;
        if k < BITS {
            for d in 0..DIM {
                self.state[d] ^= self.seq.directions[d][k];
            }
        }
        self.next += 1;
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points_match_reference() {
        let expected = [
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.5, 0.5, 0.5],
            [0.75, 0.25, 0.25, 0.25],
            [0.25, 0.75, 0.75, 0.75],
            [0.375, 0.375, 0.625, 0.875],
            [0.875, 0.875, 0.125, 0.375],
            [0.625, 0.125, 0.875, 0.625],
            [0.125, 0.625, 0.375, 0.125],
        ];
        let s = Sobol4::unscrambled();
        for (i, p) in s.points(0, 8).enumerate() {
            for d in 0..DIM {
                assert!((p[d] - expected[i][d]).abs() < 1e-9, "point {i} dim {d}");
            }
        }
    }

    #[test]
    fn gray_walk_matches_direct() {
        let s = Sobol4::scrambled(42, 3);
        for (i, p) in s.points(1000, 300).enumerate() {
            assert_eq!(p, s.point_bits(1000 + i as u64).map(to_unit));
        }
    }

    #[test]
    fn scrambling_keeps_stratification() {
        // every dyadic interval of length 2^-10 holds exactly one of 2^10 points
        for replica in 0..4 {
            let s = Sobol4::scrambled(7, replica);
            let mut counts = [[0u32; 1024]; DIM];
            for p in s.points(0, 1024) {
                for d in 0..DIM {
                    counts[d][(p[d] * 1024.0) as usize] += 1;
                }
            }
            assert!(counts.iter().all(|c| c.iter().all(|&n| n == 1)));
        }
    }

    #[test]
    fn two_dimensional_projections_are_nets() {
        // (0, m, 2)-net for dims (0, 1): each 32 x 32 box of 1024 points holds one
        let s = Sobol4::scrambled(11, 0);
        let mut grid = vec![0u32; 1024];
        for p in s.points(0, 1024) {
            grid[(p[0] * 32.0) as usize * 32 + (p[1] * 32.0) as usize] += 1;
        }
        assert!(grid.iter().all(|&n| n == 1));
    }

    #[test]
    fn replicas_differ_and_repeat() {
        let a: Vec<_> = Sobol4::scrambled(1, 0).points(0, 16).collect();
        let b: Vec<_> = Sobol4::scrambled(1, 1).points(0, 16).collect();
        let c: Vec<_> = Sobol4::scrambled(1, 0).points(0, 16).collect();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
