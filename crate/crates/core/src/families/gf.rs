//! Linear algebra over the prime field GF(p).

use crate::error::{Error, Result};

pub const DEFAULT_PRIME: u64 = (1 << 31) - 1;

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// A `rows × cols` matrix with entries reduced modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfMatrix {
    prime: u64,
    rows: usize,
    cols: usize,
    /// column-major: column j is `data[j*rows..(j+1)*rows]`
    data: Vec<u64>,
}

impl GfMatrix {
    /// Builds from integer rows; negative entries are reduced into `0..p`.
    pub fn from_rows(rows: &[Vec<i64>], prime: u64) -> Result<Self> {
        if prime < 2 || prime > (1 << 62) || !is_prime(prime) {
            return Err(Error::Input(format!(
                "{prime} is not a supported prime modulus"
            )));
        }
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Input("matrix rows have different lengths".into()));
        }
        let mut data = vec![0; r * c];
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                data[j * r + i] = x.rem_euclid(prime as i64) as u64;
            }
        }
        Ok(Self {
            prime,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[u64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn rank(&self) -> usize {
        let mut basis = Basis::new(self.rows, self.prime);
        (0..self.cols)
            .filter(|&j| basis.insert(self.column(j)))
            .count()
    }

    /// Whether the columns indexed by `cols` are linearly independent.
    pub fn independent(&self, cols: &[usize]) -> bool {
        let mut basis = Basis::new(self.rows, self.prime);
        cols.iter().all(|&j| basis.insert(self.column(j)))
    }
}

/// Incrementally maintained reduced row-echelon basis of a column space.
pub struct Basis {
    prime: u64,
    dim: usize,
    /// (pivot coordinate, vector normalised to 1 at the pivot, 0 at the
    /// other pivots)
    vectors: Vec<(usize, Vec<u64>)>,
    scratch: Vec<u64>,
}

impl Basis {
    pub fn new(dim: usize, prime: u64) -> Self {
        Self {
            prime,
            dim,
            vectors: Vec::with_capacity(dim),
            scratch: vec![0; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Adds `v` if it is independent of the current span; returns whether
    /// it was added.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let p = self.prime;
        self.scratch.copy_from_slice(v);
        for (pivot, b) in &self.vectors {
            let f = self.scratch[*pivot];
            if f != 0 {
                for (x, &y) in self.scratch.iter_mut().zip(b) {
                    *x = (*x + p - mul_mod(f, y, p)) % p;
                }
            }
        }
        let Some(pivot) = self.scratch.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(self.scratch[pivot], p);
        let mut fresh: Vec<u64> = self.scratch.iter().map(|&x| mul_mod(x, inv, p)).collect();
        fresh[pivot] = 1;
        for (_, b) in self.vectors.iter_mut() {
            let f = b[pivot];
            if f != 0 {
                for (x, &y) in b.iter_mut().zip(&fresh) {
                    *x = (*x + p - mul_mod(f, y, p)) % p;
                }
            }
        }
        debug_assert_eq!(fresh.len(), self.dim);
        self.vectors.push((pivot, fresh));
        true
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
