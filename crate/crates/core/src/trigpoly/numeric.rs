use num_complex::Complex64;

use super::FreqKey;

/// Floating-point image of a [`super::TrigPoly`], terms in key order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumericTrigPoly {
    terms: Vec<(FreqKey, Complex64)>,
}

impl NumericTrigPoly {
    pub fn new<I: IntoIterator<Item = (FreqKey, Complex64)>>(terms: I) -> Self {
        NumericTrigPoly {
            terms: terms.into_iter().collect(),
        }
    }

    pub fn terms(&self) -> &[(FreqKey, Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let pi = std::f64::consts::PI;
        self.terms
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, pi * (f64::from(k.m) * x + f64::from(k.n) * y)))
            .sum()
    }

    /// Terms grouped by `n`: `(n, [(m, c), ...])`, both in increasing order.
    pub fn by_column(&self) -> Vec<(i32, Vec<(i32, Complex64)>)> {
        let mut out: Vec<(i32, Vec<(i32, Complex64)>)> = Vec::new();
        let mut sorted = self.terms.clone();
        sorted.sort_by_key(|(k, _)| (k.n, k.m));
        for (k, c) in sorted {
            match out.last_mut() {
                Some((n, v)) if *n == k.n => v.push((k.m, c)),
                _ => out.push((k.n, vec![(k.m, c)])),
            }
        }
        out
    }
}
