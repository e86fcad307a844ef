//! Tabulated arithmetic in GF(r^d) together with the cyclic quotient
//! `C = F* / K` and the induced action of the Frobenius group on it.
//!
//! Elements are encoded as integers `sum c_i r^i` where `c_i` is the
//! coefficient of `x^i` in the polynomial representative. Zero encodes as 0
//! and one as 1.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default upper bound on the field order.
pub const DEFAULT_ORDER_BOUND: u64 = 1 << 16;

/// Field element encoding.
pub type Elem = u32;

#[derive(Debug, Clone)]
pub struct FiniteField {
    char: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    primitive: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl FiniteField {
    /// Builds GF(r^d) with the default order bound.
    pub fn new(r: u64, d: u32) -> Result<Self> {
        Self::with_bound(r, d, DEFAULT_ORDER_BOUND)
    }

    /// Builds GF(r^d) over the lexicographically smallest monic primitive
    /// polynomial of degree `d` (coefficients compared from the constant
    /// term upwards). The distinguished primitive element is the smallest
    /// encoded element of order `q - 1`.
    pub fn with_bound(r: u64, d: u32, bound: u64) -> Result<Self> {
        if !is_prime(r) {
            return Err(Error::NotPrime(r));
        }
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = r
            .checked_pow(d)
            .filter(|&q| q <= bound && q <= u32::MAX as u64)
            .ok_or(Error::FieldTooLarge {
                order: r.saturating_pow(d),
                bound,
            })?;
        let r = r as u32;
        let q = order as u32;
        let (modulus, x_powers) = smallest_primitive_polynomial(r, d);

        let units = q - 1;
        let mut x_log = vec![u32::MAX; q as usize];
        for (i, &p) in x_powers.iter().enumerate() {
            x_log[p as usize] = i as u32;
        }
        // smallest element whose x-logarithm is a unit mod q-1
        let primitive = (1..q)
            .find(|&y| gcd(x_log[y as usize] as u64, units as u64) == 1)
            .expect("a primitive element exists");
        let step = x_log[primitive as usize] as u64;
        let mut exp = Vec::with_capacity(units as usize);
        let mut log = vec![u32::MAX; q as usize];
        for i in 0..units as u64 {
            let y = x_powers[((i * step) % units as u64) as usize];
            exp.push(y);
            log[y as usize] = i as u32;
        }

        Ok(FiniteField {
            char: r,
            degree: d,
            order: q,
            modulus,
            primitive,
            exp,
            log,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.char
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients of the defining polynomial, constant term first; the
    /// last entry is the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive_element(&self) -> Elem {
        self.primitive
    }

    pub fn elements(&self) -> core::ops::Range<Elem> {
        0..self.order
    }

    /// Discrete logarithm to the base of the primitive element.
    pub fn log(&self, x: Elem) -> Option<u32> {
        match self.log.get(x as usize) {
            Some(&l) if l != u32::MAX => Some(l),
            _ => None,
        }
    }

    /// `rho^i` for the primitive element `rho`; `i` is reduced mod `q - 1`.
    pub fn exp(&self, i: u64) -> Elem {
        self.exp[(i % (self.order as u64 - 1)) as usize]
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.char == 2 {
            return a ^ b;
        }
        self.digitwise(a, b, |x, y| (x + y) % self.char)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if self.char == 2 {
            return a ^ b;
        }
        self.digitwise(a, b, |x, y| (x + self.char - y) % self.char)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(0, a)
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp(s)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        let l = self.log(a)? as u64;
        Some(self.exp(self.order as u64 - 1 - l))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        Some(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        match self.log(a) {
            None => 0,
            Some(l) => self.exp((l as u64 * (e % (self.order as u64 - 1))) % (self.order as u64 - 1)),
        }
    }

    /// The `i`-th power of the Frobenius automorphism, `x -> x^(r^i)`.
    pub fn frobenius(&self, a: Elem, i: u32) -> Elem {
        let units = self.order as u64 - 1;
        let mut e = 1u64;
        for _ in 0..(i % self.degree) {
            e = e * self.char as u64 % units;
        }
        if units == 1 {
            return a;
        }
        self.pow(a, e)
    }

    fn digitwise(&self, mut a: Elem, mut b: Elem, op: impl Fn(u32, u32) -> u32) -> Elem {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.degree {
            out += op(a % self.char, b % self.char) * place;
            a /= self.char;
            b /= self.char;
            place *= self.char;
        }
        out
    }
}

/// Returns the smallest monic primitive polynomial of degree `d` over GF(r)
/// (low-to-high coefficients, leading 1 included) and the successive powers
/// `x^0 .. x^(q-2)` of `x` modulo it, encoded as field elements.
fn smallest_primitive_polynomial(r: u32, d: u32) -> (Vec<u32>, Vec<Elem>) {
    let q = r.pow(d);
    let units = q - 1;
    let mut low = vec![0u32; d as usize];
    // Enumerate coefficient tuples (c_0, ..., c_{d-1}) in lexicographic order,
    // c_0 being the most significant position.
    for idx in 0..q {
        let mut t = idx;
        for k in (0..d as usize).rev() {
            low[k] = t % r;
            t /= r;
        }
        if low[0] == 0 {
            continue;
        }
        if let Some(powers) = x_powers_if_primitive(r, d, &low, units) {
            let mut modulus = low.clone();
            modulus.push(1);
            return (modulus, powers);
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

fn x_powers_if_primitive(r: u32, d: u32, low: &[u32], units: u32) -> Option<Vec<Elem>> {
    let d = d as usize;
    let mut cur = vec![0u32; d];
    cur[0] = 1;
    let mut powers = Vec::with_capacity(units as usize);
    for i in 0..units {
        let code = encode(&cur, r);
        if i > 0 && code == 1 {
            return None;
        }
        powers.push(code);
        // multiply by x and reduce by x^d = -(c_0 + ... + c_{d-1} x^{d-1})
        let top = cur[d - 1];
        for k in (1..d).rev() {
            cur[k] = cur[k - 1];
        }
        cur[0] = 0;
        for k in 0..d {
            cur[k] = (cur[k] + (r - low[k]) * top) % r;
        }
    }
    (encode(&cur, r) == 1).then_some(powers)
}

fn encode(coeffs: &[u32], r: u32) -> Elem {
    coeffs.iter().rev().fold(0, |acc, &c| acc * r + c)
}

/// The index-`n` subgroup `K` of `F*` and the cyclic quotient `C = F*/K`,
/// with `C` written additively as `Z/n` via the discrete logarithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetStructure {
    n: u32,
    m: u32,
    coset: Vec<u32>,
}

impl CosetStructure {
    pub fn new(field: &FiniteField, n: u32) -> Result<Self> {
        let q = field.order() as u64;
        if n == 0 || (q - 1) % n as u64 != 0 {
            return Err(Error::IndexNotDivisor { q, n: n as u64 });
        }
        if (q * (q - 1) / n as u64) % 2 != 0 {
            return Err(Error::OddArity { q, n: n as u64 });
        }
        let m = ((q - 1) / n as u64) as u32;
        let coset = field
            .elements()
            .map(|x| field.log(x).map_or(u32::MAX, |l| l % n))
            .collect();
        Ok(CosetStructure { n, m, coset })
    }

    /// Index of `K` in `F*`, equal to `|C|`.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `|K|`.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// The identity coset `e = K`.
    pub fn identity(&self) -> u32 {
        0
    }

    pub fn coset_of(&self, x: Elem) -> Option<u32> {
        match self.coset.get(x as usize) {
            Some(&c) if c != u32::MAX => Some(c),
            _ => None,
        }
    }

    /// Elements of `K`.
    pub fn subgroup(&self, field: &FiniteField) -> Vec<Elem> {
        (0..self.m as u64).map(|j| field.exp(j * self.n as u64)).collect()
    }

    pub fn add(&self, g: u32, h: u32) -> u32 {
        (g + h) % self.n
    }

    pub fn neg(&self, g: u32) -> u32 {
        (self.n - g % self.n) % self.n
    }
}

/// The Frobenius group `Sigma = Aut(F)` acting on `C`, and its kernel
/// `Sigma_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrobeniusData {
    /// `|Sigma|`.
    pub d: u32,
    /// `|Sigma_0|`.
    pub d0: u32,
    /// Multiplicative order of the characteristic modulo `n`.
    pub order_mod_n: u32,
    /// `action_on_c[i] = r^i mod n`: `Frob^i` acts on `C` as `g -> r^i g`.
    pub action_on_c: Vec<u32>,
}

impl FrobeniusData {
    pub fn new(field: &FiniteField, cosets: &CosetStructure) -> Self {
        let n = cosets.n() as u64;
        let r = field.characteristic() as u64;
        let d = field.degree();
        let mut action_on_c = Vec::with_capacity(d as usize);
        let mut p = 1 % n;
        for _ in 0..d {
            action_on_c.push(p as u32);
            p = p * r % n;
        }
        let d0 = action_on_c.iter().filter(|&&a| a as u64 == 1 % n).count() as u32;
        FrobeniusData {
            d,
            d0,
            order_mod_n: multiplicative_order(r, n).expect("r is a unit mod n") as u32,
            action_on_c,
        }
    }

    /// Smallest `i` in `0..d` with `r^i = u (mod n)`.
    pub fn exponent_for(&self, u: u32) -> Option<u32> {
        self.action_on_c.iter().position(|&a| a == u).map(|i| i as u32)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Splits `q` as `r^d` with `r` prime.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let r = (2..=q).find(|p| q % p == 0).expect("q has a prime divisor");
    let (mut rest, mut d) = (q, 0);
    while rest % r == 0 {
        rest /= r;
        d += 1;
    }
    if rest == 1 {
        Ok((r, d))
    } else {
        Err(Error::NotPrimePower(q))
    }
}

/// Euler totient by trial factorisation.
pub fn euler_phi(n: u64) -> u64 {
    let (mut rest, mut phi) = (n, n);
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if rest > 1 {
        phi -= phi / rest;
    }
    phi
}

/// Order of `a` in `(Z/n)*`; `None` when `gcd(a, n) != 1`. The unit group
/// modulo 1 is trivial, so every `a` has order 1 there.
pub fn multiplicative_order(a: u64, n: u64) -> Option<u64> {
    if n == 0 || gcd(a, n) != 1 {
        return None;
    }
    if n == 1 {
        return Some(1);
    }
    let a = a % n;
    let (mut x, mut k) = (a, 1);
    while x != 1 {
        x = x * a % n;
        k += 1;
    }
    Some(k)
}

/// Whether `r` generates `(Z/n)*`. Every unit counts as a primitive root
/// modulo 1 and modulo 2.
pub fn is_primitive_root(r: u64, n: u64) -> Result<bool> {
    let ord = multiplicative_order(r, n).ok_or(Error::NotCoprime { r, n })?;
    Ok(n <= 2 || ord == euler_phi(n))
}
