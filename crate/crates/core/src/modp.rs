//! Arithmetic in `Z/pZ` for word-sized primes, used by the evaluation oracles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::expr::AtomId;

/// The Mersenne prime 2^31 - 1.
pub const P31: u64 = (1 << 31) - 1;

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    add(a, p - b % p, p)
}

pub fn pow(mut base: u64, mut exp: u32, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Reduces an arbitrary integer into `[0, p)`.
pub fn reduce(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in u64")
}

/// Values for atoms, indexed by [`AtomId`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<u64>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Uniformly random residues for atoms `0..n_atoms`.
    pub fn random<R: Rng + ?Sized>(n_atoms: usize, p: u64, rng: &mut R) -> Self {
        Self {
            values: (0..n_atoms).map(|_| Some(rng.gen_range(0..p))).collect(),
        }
    }

    pub fn set(&mut self, atom: AtomId, value: u64) {
        let i = atom.index();
        if self.values.len() <= i {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(value);
    }

    pub fn with(mut self, atom: AtomId, value: u64) -> Self {
        self.set(atom, value);
        self
    }

    pub fn get(&self, atom: AtomId) -> Option<u64> {
        self.values.get(atom.index()).copied().flatten()
    }
}

impl FromIterator<(AtomId, u64)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (AtomId, u64)>>(iter: I) -> Self {
        let mut a = Assignment::new();
        for (id, v) in iter {
            a.set(id, v);
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_coefficients_reduce_into_range() {
        assert_eq!(reduce(&BigInt::from(-1), 7), 6);
        assert_eq!(reduce(&BigInt::from(-14), 7), 0);
        assert_eq!(sub(2, 5, 7), 4);
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let mut acc = 1;
        for e in 0..20 {
            assert_eq!(pow(3, e, P31), acc);
            acc = mul(acc, 3, P31);
        }
    }
}
