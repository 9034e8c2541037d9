//! Exact scalar coefficients: Gaussian rationals and finite sums of
//! Gaussian rationals times powers of π.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `re + i·im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(rat(re, 1), rat(im, 1))
    }

    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    pub fn zero() -> Self {
        GaussRat::from_ints(0, 0)
    }

    pub fn one() -> Self {
        GaussRat::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussRat::new(&self.re * r, &self.im * r)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

/// Shorthand for an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    // Ratio<BigInt>::to_f64 handles numerators/denominators beyond f64 range.
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Finite sum `Σ_p g_p · π^p` with Gaussian-rational `g_p` and integer `p`.
///
/// π is transcendental, so two values are equal iff their stored terms are
/// equal; zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PiRational {
    terms: BTreeMap<i32, GaussRat>,
}

impl PiRational {
    pub fn zero() -> Self {
        PiRational::default()
    }

    pub fn one() -> Self {
        PiRational::from_gauss(GaussRat::one(), 0)
    }

    pub fn i() -> Self {
        PiRational::from_gauss(GaussRat::i(), 0)
    }

    pub fn pi() -> Self {
        PiRational::from_gauss(GaussRat::one(), 1)
    }

    pub fn from_rational(r: BigRational) -> Self {
        PiRational::from_gauss(GaussRat::real(r), 0)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        PiRational::from_rational(rat(num, den))
    }

    /// `g · π^power`.
    pub fn from_gauss(g: GaussRat, power: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(power, g);
        }
        PiRational { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, GaussRat)>>(iter: I) -> Self {
        let mut out = PiRational::zero();
        for (p, g) in iter {
            out.add_term(p, &g);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&0)
                .is_some_and(|g| g.re.is_one() && g.im.is_zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &GaussRat)> {
        self.terms.iter().map(|(p, g)| (*p, g))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of `π^power`, if non-zero.
    pub fn term(&self, power: i32) -> Option<&GaussRat> {
        self.terms.get(&power)
    }

    /// Set of π-powers carrying a non-zero coefficient.
    pub fn pi_powers(&self) -> impl Iterator<Item = i32> + '_ {
        self.terms.keys().copied()
    }

    pub fn add_term(&mut self, power: i32, g: &GaussRat) {
        if g.is_zero() {
            return;
        }
        match self.terms.get_mut(&power) {
            Some(slot) => {
                *slot = &*slot + g;
                if slot.is_zero() {
                    self.terms.remove(&power);
                }
            }
            None => {
                self.terms.insert(power, g.clone());
            }
        }
    }

    pub fn add_assign_ref(&mut self, rhs: &PiRational) {
        for (p, g) in &rhs.terms {
            self.add_term(*p, g);
        }
    }

    pub fn conj(&self) -> Self {
        PiRational {
            terms: self.terms.iter().map(|(p, g)| (*p, g.conj())).collect(),
        }
    }

    /// True when every Gaussian coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussRat::is_real)
    }

    /// Multiply by a Gaussian rational and shift the π-power.
    pub fn scale_shift(&self, g: &GaussRat, shift: i32) -> Self {
        if g.is_zero() {
            return PiRational::zero();
        }
        PiRational {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p + shift, c * g))
                .collect(),
        }
    }

    /// Multiplicative inverse, defined only for a single non-zero term `g·π^p`.
    pub fn monomial_inverse(&self) -> Option<PiRational> {
        if self.terms.len() != 1 {
            return None;
        }
        let (p, g) = self.terms.iter().next()?;
        let norm = &g.re * &g.re + &g.im * &g.im;
        let inv = GaussRat::new(&g.re / &norm, -(&g.im / &norm));
        Some(PiRational::from_gauss(inv, -p))
    }

    pub fn to_complex(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(p, g)| g.to_complex() * std::f64::consts::PI.powi(*p))
            .sum()
    }

    /// Σ |re| + |im| of the numeric value of each term; a crude magnitude bound.
    pub fn abs_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, g)| {
                (rat_to_f64(&g.re).abs() + rat_to_f64(&g.im).abs())
                    * std::f64::consts::PI.powi(*p)
            })
            .sum()
    }
}

impl Add for &PiRational {
    type Output = PiRational;
    fn add(self, rhs: &PiRational) -> PiRational {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &PiRational {
    type Output = PiRational;
    fn sub(self, rhs: &PiRational) -> PiRational {
        let mut out = self.clone();
        for (p, g) in &rhs.terms {
            out.add_term(*p, &-g);
        }
        out
    }
}

impl Mul for &PiRational {
    type Output = PiRational;
    fn mul(self, rhs: &PiRational) -> PiRational {
        let mut out = PiRational::zero();
        for (pa, ga) in &self.terms {
            for (pb, gb) in &rhs.terms {
                out.add_term(pa + pb, &(ga * gb));
            }
        }
        out
    }
}

impl Neg for &PiRational {
    type Output = PiRational;
    fn neg(self) -> PiRational {
        PiRational {
            terms: self.terms.iter().map(|(p, g)| (*p, -g)).collect(),
        }
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, g) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({} + {}i)", g.re, g.im)?;
            match p {
                0 => {}
                1 => write!(f, "·π")?,
                _ => write!(f, "·π^{p}")?,
            }
        }
        Ok(())
    }
}
