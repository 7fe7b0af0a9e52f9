//! Affine maps over GF(2): `x ↦ A x + c (mod 2)`.

use rand::Rng as _;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap2 {
    input_dim: usize,
    rows: Vec<Bits>,
    offset: Bits,
}

impl AffineMap2 {
    pub fn new(input_dim: usize, rows: Vec<Bits>, offset: Bits) -> Result<Self> {
        if offset.len() != rows.len() {
            return Err(Error::Shape {
                expected: rows.len(),
                got: offset.len(),
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != input_dim) {
            return Err(Error::Shape {
                expected: input_dim,
                got: r.len(),
            });
        }
        Ok(AffineMap2 {
            input_dim,
            rows,
            offset,
        })
    }

    /// Linear map from row masks given as integers (`input_dim ≤ 64`).
    pub fn from_masks(input_dim: usize, masks: &[u64], offset: u64) -> Self {
        let rows = masks
            .iter()
            .map(|&m| Bits::from_u64(m, input_dim))
            .collect();
        AffineMap2 {
            input_dim,
            rows,
            offset: Bits::from_u64(offset, masks.len()),
        }
    }

    pub fn identity(d: usize) -> Self {
        let rows = (0..d)
            .map(|i| {
                let mut r = Bits::zeros(d);
                r.set(i, true);
                r
            })
            .collect();
        AffineMap2 {
            input_dim: d,
            rows,
            offset: Bits::zeros(d),
        }
    }

    pub fn zero(input_dim: usize, output_dim: usize) -> Self {
        AffineMap2 {
            input_dim,
            rows: vec![Bits::zeros(input_dim); output_dim],
            offset: Bits::zeros(output_dim),
        }
    }

    /// Uniformly random matrix and offset.
    pub fn random(input_dim: usize, output_dim: usize, with_offset: bool, rng: &mut Rng) -> Self {
        let random_bits = |len: usize, rng: &mut Rng| {
            Bits::from_bools(&(0..len).map(|_| rng.random::<bool>()).collect::<Vec<_>>())
        };
        let rows = (0..output_dim)
            .map(|_| random_bits(input_dim, rng))
            .collect();
        let offset = if with_offset {
            random_bits(output_dim, rng)
        } else {
            Bits::zeros(output_dim)
        };
        AffineMap2 {
            input_dim,
            rows,
            offset,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn offset(&self) -> &Bits {
        &self.offset
    }

    pub fn apply(&self, x: &Bits) -> Bits {
        debug_assert_eq!(x.len(), self.input_dim);
        let mut out = Bits::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let ones: u32 = row
                .words()
                .iter()
                .zip(x.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            out.set(i, (ones & 1 == 1) ^ self.offset.get(i));
        }
        out
    }

    /// Output as an integer, output bit `i` in bit `i` (`output_dim ≤ 64`).
    pub fn apply_u64(&self, x: u64) -> u64 {
        let mut out = self.offset.to_u64();
        for (i, row) in self.rows.iter().enumerate() {
            out ^= (((row.to_u64() & x).count_ones() & 1) as u64) << i;
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap2) -> Result<AffineMap2> {
        if inner.output_dim() != self.input_dim {
            return Err(Error::Shape {
                expected: self.input_dim,
                got: inner.output_dim(),
            });
        }
        let d = inner.input_dim;
        let mut rows = Vec::with_capacity(self.rows.len());
        let offset = self.apply(&inner.offset);
        for row in &self.rows {
            let mut acc = Bits::zeros(d);
            for (j, inner_row) in inner.rows.iter().enumerate() {
                if row.get(j) {
                    acc = xor(&acc, inner_row);
                }
            }
            rows.push(acc);
        }
        AffineMap2::new(d, rows, offset)
    }
}

pub(crate) fn xor(a: &Bits, b: &Bits) -> Bits {
    a.zip_with(b, |x, y| x ^ y)
}
