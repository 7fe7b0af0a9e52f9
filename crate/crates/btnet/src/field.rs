//! GF(2) polynomials and GF(2^n) arithmetic for `n ≤ 64`.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

/// Polynomial over GF(2), coefficient `i` in bit `i`. Trailing zero words are
/// trimmed so that equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    words: Vec<u64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_words(vec![v])
    }

    pub fn from_u128(v: u128) -> Self {
        Self::from_words(vec![v as u64, (v >> 64) as u64])
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Poly2 { words }
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut words = vec![0; k / 64 + 1];
        words[k / 64] = 1 << (k % 64);
        Poly2 { words }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low 64 coefficients.
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).unwrap_or(&0) ^ other.words.get(i).unwrap_or(&0))
            .collect();
        Poly2::from_words(words)
    }

    fn shl(&self, k: usize) -> Poly2 {
        if self.is_zero() {
            return Poly2::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] ^= w << bs;
            if bs != 0 {
                words[i + ws + 1] ^= w >> (64 - bs);
            }
        }
        Poly2::from_words(words)
    }
}

impl std::fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let Some(d) = self.degree() else {
            return f.write_str("0");
        };
        let terms: Vec<String> = (0..=d)
            .rev()
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Carry-less 64×64 → 128-bit product.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut b = b;
    let a = a as u128;
    while b != 0 {
        let i = b.trailing_zeros();
        acc ^= a << i;
        b &= b - 1;
    }
    acc
}

pub fn poly_mul(a: &Poly2, b: &Poly2) -> Poly2 {
    if a.is_zero() || b.is_zero() {
        return Poly2::zero();
    }
    let mut out = vec![0u64; a.words.len() + b.words.len()];
    for (i, &x) in a.words.iter().enumerate() {
        for (j, &y) in b.words.iter().enumerate() {
            let p = clmul64(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
    Poly2::from_words(out)
}

/// Quotient and remainder of `a` by `e`.
pub fn poly_divmod(a: &Poly2, e: &Poly2) -> Result<(Poly2, Poly2)> {
    let de = e
        .degree()
        .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
    let mut r = a.clone();
    let mut q = Poly2::zero();
    while let Some(dr) = r.degree() {
        if dr < de {
            break;
        }
        r = r.add(&e.shl(dr - de));
        q = q.add(&Poly2::monomial(dr - de));
    }
    Ok((q, r))
}

pub fn poly_mod(a: &Poly2, e: &Poly2) -> Result<Poly2> {
    poly_divmod(a, e).map(|(_, r)| r)
}

pub fn poly_gcd(a: &Poly2, b: &Poly2) -> Poly2 {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = poly_mod(&a, &b).expect("b is nonzero");
        a = b;
        b = r;
    }
    a
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `E` of degree `n` is irreducible iff `x^(2^n) ≡ x (mod E)`
/// and `gcd(x^(2^(n/q)) − x, E) = 1` for every prime `q | n`.
pub fn is_irreducible(e: &Poly2) -> bool {
    let Some(n) = e.degree() else { return false };
    if n == 0 {
        return false;
    }
    let x = Poly2::monomial(1);
    // x^(2^i) mod E for i = 0..=n by repeated squaring.
    let mut pows = vec![poly_mod(&x, e).unwrap()];
    for _ in 0..n {
        let last = pows.last().unwrap();
        pows.push(poly_mod(&poly_mul(last, last), e).unwrap());
    }
    if pows[n] != pows[0] {
        return false;
    }
    prime_factors(n).into_iter().all(|q| {
        let diff = pows[n / q].add(&x);
        poly_gcd(&diff, e).degree() == Some(0)
    })
}

/// Smallest irreducible polynomial of degree `n` at or after a seeded starting
/// point, scanning the low coefficients in increasing order and wrapping.
pub fn find_irreducible(n: usize, seed: u64) -> Result<Poly2> {
    if !(1..=64).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "field degree {n} outside 1..=64"
        )));
    }
    let span: u128 = 1u128 << n;
    let start = (rng::stream(seed, &[n as u64]).random::<u64>() as u128) % span;
    let top = Poly2::monomial(n);
    for step in 0..span {
        let low = (start + step) % span;
        let cand = top.add(&Poly2::from_u128(low));
        if is_irreducible(&cand) {
            return Ok(cand);
        }
    }
    Err(Error::Internal(format!(
        "no irreducible polynomial of degree {n}"
    )))
}

/// GF(2^n) with elements stored as `u64` coefficient vectors of degree `< n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    n: usize,
    /// Low `n` coefficients of the modulus; the `x^n` term is implicit.
    low: u64,
    modulus: Poly2,
}

impl FieldCtx {
    pub fn new(modulus: Poly2) -> Result<Self> {
        let n = modulus
            .degree()
            .filter(|&d| (1..=64).contains(&d))
            .ok_or_else(|| Error::InvalidArgument("modulus degree must be in 1..=64".into()))?;
        if !is_irreducible(&modulus) {
            return Err(Error::InvalidArgument(format!("{modulus:?} is reducible")));
        }
        let low = poly_mod(&modulus, &Poly2::monomial(n)).unwrap().to_u64();
        Ok(FieldCtx { n, low, modulus })
    }

    pub fn with_seed(n: usize, seed: u64) -> Result<Self> {
        Self::new(find_irreducible(n, seed)?)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &Poly2 {
        &self.modulus
    }

    pub fn mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Reduces a product of two reduced elements.
    #[inline]
    pub fn reduce(&self, mut v: u128) -> u64 {
        let n = self.n;
        let full = (1u128 << n) | self.low as u128;
        while v >> n != 0 {
            let top = 127 - v.leading_zeros() as usize;
            v ^= full << (top - n);
        }
        v as u64
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(clmul64(a, b))
    }

    pub fn square(&self, a: u64) -> u64 {
        self.mul(a, a)
    }

    pub fn pow(&self, a: u64, mut e: u128) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, (1u128 << self.n) - 2))
    }

    /// `x^t mod E` for any `t`.
    pub fn x_pow(&self, t: u128) -> u64 {
        if self.n == 1 {
            // x ≡ low (mod E) when n = 1.
            return self.pow(self.low, t);
        }
        self.pow(2, t)
    }

    /// The table `e_{m,j} = x^(j·2^m) mod E` for `j < n`. Raising to the
    /// power `2^m` is GF(2)-linear: `z^(2^m) = Σ_j z_j e_{m,j}`.
    pub fn frobenius_table(&self, m: u32) -> Vec<u64> {
        (0..self.n).map(|j| self.x_pow((j as u128) << m)).collect()
    }

    /// `z^(2^m)` through the linear table.
    pub fn frobenius(&self, table: &[u64], z: u64) -> u64 {
        let mut acc = 0;
        let mut z = z;
        while z != 0 {
            acc ^= table[z.trailing_zeros() as usize];
            z &= z - 1;
        }
        acc
    }
}

/// `Σ p_i z^i` in GF(2^n) by Horner's rule.
pub fn field_horner(ctx: &FieldCtx, coeffs: &[u64], z: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &p| ctx.mul(acc, z) ^ p)
}
