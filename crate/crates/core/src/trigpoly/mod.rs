//! Sparse trigonometric polynomials on the unit torus with exact coefficients.
//!
//! A [`TrigPoly`] is a finite sum `Σ c_{m,n} e^{iπ(mx + ny)}`. Frequencies are
//! counted in units of π, so `sin(πx)` is representable even though it is not
//! 1-periodic; functions on the unit torus carry only even keys.

mod numeric;
mod scalar;

pub use numeric::NumericTrigPoly;
pub use scalar::{rat, rat_to_f64, GaussRat, PiRational};

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Frequency `(m, n)` of the monomial `e^{iπ(mx + ny)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreqKey {
    pub m: i32,
    pub n: i32,
}

impl std::ops::Neg for FreqKey {
    type Output = FreqKey;

    fn neg(self) -> FreqKey {
        FreqKey::new(-self.m, -self.n)
    }
}

impl FreqKey {
    pub const ZERO: FreqKey = FreqKey { m: 0, n: 0 };

    pub const fn new(m: i32, n: i32) -> Self {
        FreqKey { m, n }
    }

    pub fn is_even(self) -> bool {
        self.m % 2 == 0 && self.n % 2 == 0
    }

    /// `max(|m|, |n|)`.
    pub fn max_abs(self) -> u32 {
        self.m.unsigned_abs().max(self.n.unsigned_abs())
    }
}

impl std::ops::Add for FreqKey {
    type Output = FreqKey;
    fn add(self, rhs: FreqKey) -> FreqKey {
        FreqKey::new(self.m + rhs.m, self.n + rhs.n)
    }
}

/// Differentiation direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
    /// `∂z = ½(∂x − i∂y)`
    Z,
    /// `∂z̄ = ½(∂x + i∂y)`
    Zbar,
}

/// Exact sparse Fourier series. Zero coefficients are never stored and keys
/// iterate in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigPoly {
    coeffs: BTreeMap<FreqKey, PiRational>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn one() -> Self {
        TrigPoly::constant(PiRational::one())
    }

    pub fn constant(c: PiRational) -> Self {
        TrigPoly::monomial(FreqKey::ZERO, c)
    }

    pub fn monomial(key: FreqKey, c: PiRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(key, c);
        }
        TrigPoly { coeffs }
    }

    /// `cos(π(mx + ny))`.
    pub fn cos(m: i32, n: i32) -> Self {
        let half = PiRational::from_ratio(1, 2);
        let mut p = TrigPoly::monomial(FreqKey::new(m, n), half.clone());
        p.add_coeff(FreqKey::new(-m, -n), &half);
        p
    }

    /// `sin(π(mx + ny))`.
    pub fn sin(m: i32, n: i32) -> Self {
        // (e^{iθ} − e^{−iθ}) / 2i = −i/2·e^{iθ} + i/2·e^{−iθ}
        let c = PiRational::from_gauss(GaussRat::new(rat(0, 1), rat(-1, 2)), 0);
        let mut p = TrigPoly::monomial(FreqKey::new(m, n), c.clone());
        p.add_coeff(FreqKey::new(-m, -n), &-&c);
        p
    }

    pub fn from_coeffs<I: IntoIterator<Item = (FreqKey, PiRational)>>(iter: I) -> Self {
        let mut p = TrigPoly::zero();
        for (k, c) in iter {
            p.add_coeff(k, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, key: FreqKey) -> Option<&PiRational> {
        self.coeffs.get(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (FreqKey, &PiRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn keys(&self) -> impl Iterator<Item = FreqKey> + '_ {
        self.coeffs.keys().copied()
    }

    /// Largest `max(|m|, |n|)` over the support; 0 for the zero polynomial.
    pub fn max_frequency(&self) -> u32 {
        self.coeffs.keys().map(|k| k.max_abs()).max().unwrap_or(0)
    }

    pub fn add_coeff(&mut self, key: FreqKey, c: &PiRational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&key) {
            Some(slot) => {
                slot.add_assign_ref(c);
                if slot.is_zero() {
                    self.coeffs.remove(&key);
                }
            }
            None => {
                self.coeffs.insert(key, c.clone());
            }
        }
    }

    pub fn add(&self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn add_assign(&mut self, rhs: &TrigPoly) {
        for (k, c) in &rhs.coeffs {
            self.add_coeff(*k, c);
        }
    }

    pub fn sub(&self, rhs: &TrigPoly) -> TrigPoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scale(&self, s: &PiRational) -> TrigPoly {
        if s.is_zero() {
            return TrigPoly::zero();
        }
        let mut out = TrigPoly::zero();
        for (k, c) in &self.coeffs {
            out.add_coeff(*k, &(c * s));
        }
        out
    }

    /// `Σ scalar_i · p_i`.
    pub fn linear_combine(pairs: &[(PiRational, &TrigPoly)]) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (s, p) in pairs {
            if s.is_zero() {
                continue;
            }
            for (k, c) in &p.coeffs {
                out.add_coeff(*k, &(c * s));
            }
        }
        out
    }

    /// Exact product.
    ///
    /// Each operand is brought to a common denominator so the support
    /// convolution runs over big integers; the single normalizing division
    /// happens per output coefficient.
    pub fn mul(&self, rhs: &TrigPoly) -> TrigPoly {
        if self.is_zero() || rhs.is_zero() {
            return TrigPoly::zero();
        }
        let (la, ea) = integer_entries(self);
        let (lb, eb) = integer_entries(rhs);
        let mut acc: HashMap<(FreqKey, i32), (BigInt, BigInt)> =
            HashMap::with_capacity(ea.len().max(eb.len()) * 4);
        for a in &ea {
            for b in &eb {
                let slot = acc
                    .entry((a.key + b.key, a.power + b.power))
                    .or_insert_with(|| (BigInt::zero(), BigInt::zero()));
                complex_mul_acc(slot, a, b);
            }
        }
        let den = la * lb;
        let mut coeffs: BTreeMap<FreqKey, PiRational> = BTreeMap::new();
        let mut sorted: Vec<_> = acc.into_iter().collect();
        sorted.sort_by_key(|x| x.0);
        for ((key, power), (re, im)) in sorted {
            if re.is_zero() && im.is_zero() {
                continue;
            }
            let g = GaussRat::new(
                BigRational::new(re, den.clone()),
                BigRational::new(im, den.clone()),
            );
            coeffs
                .entry(key)
                .or_default()
                .add_term(power, &g);
        }
        coeffs.retain(|_, c| !c.is_zero());
        TrigPoly { coeffs }
    }

    /// `self^k`, with `p^0 = 1`.
    pub fn pow(&self, k: u32) -> TrigPoly {
        let mut out = TrigPoly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn diff(&self, dir: Direction) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (k, c) in &self.coeffs {
            let (m, n) = (i64::from(k.m), i64::from(k.n));
            let factor = match dir {
                Direction::X => GaussRat::new(rat(0, 1), rat(m, 1)),
                Direction::Y => GaussRat::new(rat(0, 1), rat(n, 1)),
                Direction::Z => GaussRat::new(rat(n, 2), rat(m, 2)),
                Direction::Zbar => GaussRat::new(rat(-n, 2), rat(m, 2)),
            };
            out.add_coeff(*k, &c.scale_shift(&factor, 1));
        }
        out
    }

    /// Pointwise complex conjugate: `(m, n) ↦ (−m, −n)` with conjugated coefficient.
    pub fn conjugate(&self) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (-*k, c.conj())).collect(),
        }
    }

    /// The function is real-valued: `c(−m, −n) = conj(c(m, n))`.
    pub fn is_real(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(k, c)| self.coeffs.get(&-*k).is_some_and(|d| *d == c.conj()))
    }

    /// Every key is even, i.e. the function is 1-periodic in x and y.
    pub fn is_periodic(&self) -> bool {
        self.coeffs.keys().all(|k| k.is_even())
    }

    /// Real part `(p + conj p)/2`.
    pub fn real_part(&self) -> TrigPoly {
        self.add(&self.conjugate()).scale(&PiRational::from_ratio(1, 2))
    }

    /// Imaginary part `(p − conj p)/2i`, itself a real function.
    pub fn imag_part(&self) -> TrigPoly {
        let minus_half_i = PiRational::from_gauss(GaussRat::new(rat(0, 1), rat(-1, 2)), 0);
        self.sub(&self.conjugate()).scale(&minus_half_i)
    }

    /// Set of π-powers appearing anywhere in the coefficients.
    pub fn pi_powers(&self) -> std::collections::BTreeSet<i32> {
        self.coeffs.values().flat_map(|c| c.pi_powers()).collect()
    }

    /// True when every coefficient is a rational multiple of a Gaussian
    /// rational with π-power 0.
    pub fn has_rational_coefficients(&self) -> bool {
        self.pi_powers().iter().all(|p| *p == 0)
    }

    /// Σ over coefficients of their magnitude bound (the coefficient 1-norm).
    pub fn norm1(&self) -> f64 {
        self.coeffs.values().map(PiRational::abs_bound).sum()
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let pi = std::f64::consts::PI;
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let phase = pi * (f64::from(k.m) * x + f64::from(k.n) * y);
                c.to_complex() * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Double-precision copy for repeated evaluation.
    pub fn to_numeric(&self) -> NumericTrigPoly {
        NumericTrigPoly::new(self.iter().map(|(k, c)| (k, c.to_complex())))
    }

    /// One line per `(key, π-power)`:
    /// `m n re_num/re_den im_num/im_den pi_power`, keys in lexicographic order.
    pub fn to_debug_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in &self.coeffs {
            for (p, g) in c.terms() {
                let _ = writeln!(
                    s,
                    "{} {} {}/{} {}/{} {}",
                    k.m,
                    k.n,
                    g.re.numer(),
                    g.re.denom(),
                    g.im.numer(),
                    g.im.denom(),
                    p
                );
            }
        }
        s
    }
}

struct IntEntry {
    key: FreqKey,
    power: i32,
    re: BigInt,
    im: BigInt,
}

/// Common denominator and integer numerators of every `(key, π-power)` term.
fn integer_entries(p: &TrigPoly) -> (BigInt, Vec<IntEntry>) {
    let mut lcm = BigInt::one();
    for c in p.coeffs.values() {
        for (_, g) in c.terms() {
            lcm = lcm.lcm(g.re.denom());
            lcm = lcm.lcm(g.im.denom());
        }
    }
    let mut entries = Vec::new();
    for (k, c) in &p.coeffs {
        for (power, g) in c.terms() {
            let re = g.re.numer() * (&lcm / g.re.denom());
            let im = g.im.numer() * (&lcm / g.im.denom());
            entries.push(IntEntry { key: *k, power, re, im });
        }
    }
    (lcm, entries)
}

fn complex_mul_acc(slot: &mut (BigInt, BigInt), a: &IntEntry, b: &IntEntry) {
    let a_im = !a.im.is_zero();
    let b_im = !b.im.is_zero();
    if !a.re.is_zero() {
        if !b.re.is_zero() {
            slot.0 += &a.re * &b.re;
        }
        if b_im {
            slot.1 += &a.re * &b.im;
        }
    }
    if a_im {
        if b_im {
            slot.0 -= &a.im * &b.im;
        }
        if !b.re.is_zero() {
            slot.1 += &a.im * &b.re;
        }
    }
}
