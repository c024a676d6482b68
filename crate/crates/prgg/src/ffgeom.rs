//! Prime fields and the geometry of F_p^d.
//!
//! Field elements are canonical residues in `0..p` stored as `u64`; all
//! arithmetic reduces through `u128` intermediates, so any prime below 2^63
//! is safe. Points carry their coordinates inline and are ordered
//! lexicographically, which fixes the vertex numbering of every graph built
//! over a field: vertex `i` is the point whose digits are `i` written in
//! base `p`, most significant coordinate first.

use crate::{Error, Result};

/// The field F_p for a prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

/// Deterministic Miller-Rabin, exact for all u64 with this witness set.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |b: u64, mut e: u64| -> u64 {
        let m = n as u128;
        let mut acc: u128 = 1;
        let mut bb = b as u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % m;
            }
            bb = bb * bb % m;
            e >>= 1;
        }
        acc as u64
    };
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let p = self.p as u128;
        ((a as u128 % p + p - b as u128 % p) % p) as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.p as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a % self.p
        }
    }

    pub fn pow(&self, b: u64, mut e: u64) -> u64 {
        let m = self.p as u128;
        let mut acc: u128 = 1 % m;
        let mut bb = b as u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % m;
            }
            bb = bb * bb % m;
            e >>= 1;
        }
        acc as u64
    }

    /// Multiplicative inverse; `a` must be nonzero mod p.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    /// Legendre symbol as 0, 1, or p-1 (for -1).
    pub fn legendre(&self, a: u64) -> u64 {
        self.pow(a, (self.p - 1) / 2)
    }

    pub fn is_square(&self, a: u64) -> bool {
        a % self.p == 0 || self.legendre(a) == 1
    }

    /// The unique multiplicative subgroup of order h, for h | p-1.
    /// Elements are returned sorted.
    pub fn multiplicative_subgroup(&self, h: u64) -> Result<Vec<u64>> {
        if h == 0 || (self.p - 1) % h != 0 {
            return Err(Error::BadSubgroupOrder { h, p: self.p });
        }
        let e = (self.p - 1) / h;
        // {x^e : x in F_p^*} is the subgroup of index e, i.e. order h.
        let mut elems: Vec<u64> = (1..self.p).map(|x| self.pow(x, e)).collect();
        elems.sort_unstable();
        elems.dedup();
        debug_assert_eq!(elems.len() as u64, h);
        Ok(elems)
    }
}

/// A point of F_p^d with 2 <= d <= 4 coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldPoint {
    coords: [u64; 4],
    dim: usize,
}

impl FieldPoint {
    pub fn new(coords: &[u64], field: &PrimeField) -> Result<Self> {
        if coords.len() < 2 || coords.len() > 4 {
            return Err(Error::DimensionMismatch(format!(
                "point dimension {} (expected 2..=4)",
                coords.len()
            )));
        }
        let mut c = [0u64; 4];
        for (i, &x) in coords.iter().enumerate() {
            c[i] = x % field.order();
        }
        Ok(FieldPoint {
            coords: c,
            dim: coords.len(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords[..self.dim]
    }

    /// Index of this point in the lexicographic enumeration of F_p^d.
    pub fn index(&self, field: &PrimeField) -> usize {
        let p = field.order() as usize;
        self.coords().iter().fold(0, |acc, &c| acc * p + c as usize)
    }

    /// Inverse of [`FieldPoint::index`].
    pub fn from_index(mut idx: usize, dim: usize, field: &PrimeField) -> Result<Self> {
        let p = field.order() as usize;
        let mut c = vec![0u64; dim];
        for slot in c.iter_mut().rev() {
            *slot = (idx % p) as u64;
            idx /= p;
        }
        if idx != 0 {
            return Err(Error::VertexOutOfRange(idx, p.pow(dim as u32)));
        }
        FieldPoint::new(&c, field)
    }
}

/// Sum of squared coordinate differences, ||x - y||^2 in F_p.
pub fn quadratic_distance(field: &PrimeField, x: &FieldPoint, y: &FieldPoint) -> Result<u64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "distance between dim {} and dim {}",
            x.dim(),
            y.dim()
        )));
    }
    let mut acc = 0u64;
    for (&a, &b) in x.coords().iter().zip(y.coords()) {
        let d = field.sub(a, b);
        acc = field.add(acc, field.mul(d, d));
    }
    Ok(acc)
}

/// Bilinear dot product x . y in F_p.
pub fn dot(field: &PrimeField, x: &FieldPoint, y: &FieldPoint) -> Result<u64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "dot of dim {} and dim {}",
            x.dim(),
            y.dim()
        )));
    }
    let mut acc = 0u64;
    for (&a, &b) in x.coords().iter().zip(y.coords()) {
        acc = field.add(acc, field.mul(a, b));
    }
    Ok(acc)
}

/// All points of F_p^d in index order.
pub fn all_points(field: &PrimeField, dim: usize) -> Result<Vec<FieldPoint>> {
    let p = field.order() as usize;
    let n = p
        .checked_pow(dim as u32)
        .ok_or_else(|| Error::InvalidParameter(format!("p^{dim} overflows usize")))?;
    (0..n)
        .map(|i| FieldPoint::from_index(i, dim, field))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_accepts_primes() {
        for p in [2u64, 3, 5, 13, 29, 101, 7919] {
            assert!(PrimeField::new(p).is_ok(), "{p} is prime");
        }
        for c in [0u64, 1, 4, 9, 15, 100, 561, 1105] {
            assert!(PrimeField::new(c).is_err(), "{c} is not prime");
        }
    }

    #[test]
    fn field_axioms_small() {
        let f = PrimeField::new(13).unwrap();
        for a in 0..13 {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            for b in 0..13 {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
            }
        }
    }

    #[test]
    fn legendre_counts_squares() {
        let f = PrimeField::new(29).unwrap();
        let squares: Vec<u64> = (1..29).filter(|&a| f.is_square(a)).collect();
        assert_eq!(squares.len(), 14);
        // -1 is a square mod 29 since 29 = 1 mod 4.
        assert!(f.is_square(28));
    }

    #[test]
    fn subgroup_of_order_four_mod_thirteen() {
        let f = PrimeField::new(13).unwrap();
        let h = f.multiplicative_subgroup(4).unwrap();
        // Oracle: brute force {x : x^4 = 1 mod 13}.
        let brute: Vec<u64> = (1..13).filter(|&x| f.pow(x, 4) == 1).collect();
        assert_eq!(h, brute);
        assert_eq!(h, vec![1, 5, 8, 12]);
        // Contains -1, so the difference set is symmetric.
        assert!(h.contains(&12));
    }

    #[test]
    fn subgroup_order_must_divide() {
        let f = PrimeField::new(13).unwrap();
        assert!(f.multiplicative_subgroup(5).is_err());
        assert_eq!(f.multiplicative_subgroup(12).unwrap().len(), 12);
        assert_eq!(f.multiplicative_subgroup(1).unwrap(), vec![1]);
    }

    #[test]
    fn point_index_round_trip() {
        let f = PrimeField::new(5).unwrap();
        for dim in 2..=4 {
            let pts = all_points(&f, dim).unwrap();
            assert_eq!(pts.len(), 5usize.pow(dim as u32));
            for (i, pt) in pts.iter().enumerate() {
                assert_eq!(pt.index(&f), i);
                assert_eq!(FieldPoint::from_index(i, dim, &f).unwrap(), *pt);
            }
            // Lexicographic: consecutive indices differ in the last digit first.
            assert_eq!(pts[1].coords()[dim - 1], 1);
        }
    }

    #[test]
    fn distance_and_dot_agree_with_defs() {
        let f = PrimeField::new(7).unwrap();
        let x = FieldPoint::new(&[2, 6], &f).unwrap();
        let y = FieldPoint::new(&[5, 1], &f).unwrap();
        // (2-5)^2 + (6-1)^2 = 9 + 25 = 34 = 6 mod 7
        assert_eq!(quadratic_distance(&f, &x, &y).unwrap(), 6);
        // 2*5 + 6*1 = 16 = 2 mod 7
        assert_eq!(dot(&f, &x, &y).unwrap(), 2);
        assert_eq!(quadratic_distance(&f, &x, &x).unwrap(), 0);
    }
}
