//! Multivariate polynomials with exact rational coefficients.
//!
//! Exponent vectors are unique (map keys) and zero coefficients are pruned
//! after every operation, so equality of representations is equality of
//! polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::rat::{rat_to_f64, Rat};

/// An affine form `linear . y + constant` used for substitutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub linear: Vec<Rat>,
    pub constant: Rat,
}

impl AffineForm {
    pub fn new(linear: Vec<Rat>, constant: Rat) -> Self {
        AffineForm { linear, constant }
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (c, x) in self.linear.iter().zip(point) {
            acc += c * x;
        }
        acc
    }

    pub fn to_poly(&self, nvars: usize) -> Polynomial {
        let mut p = Polynomial::constant(nvars, self.constant.clone());
        for (i, c) in self.linear.iter().enumerate() {
            if !c.is_zero() {
                let mut expo = vec![0u32; nvars];
                expo[i] = 1;
                p.add_term(c.clone(), expo);
            }
        }
        p
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The coordinate variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut expo = vec![0u32; nvars];
        expo[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(expo, Rat::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: Vec<(Rat, Vec<u32>)>) -> Self {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(c, e);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, c: Rat, expo: Vec<u32>) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(expo).or_insert_with(Rat::zero);
        *entry += c;
        // Prune if the sum cancelled.
        let expo_keys: Vec<Vec<u32>> = self
            .terms
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(k, _)| k.clone())
            .collect();
        for k in expo_keys {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Polynomial {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let expo: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(ca * cb, expo);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut expo = e.clone();
            expo[i] -= 1;
            out.add_term(c * Rat::from_integer(e[i].into()), expo);
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = rat_to_f64(c);
            for (i, &k) in e.iter().enumerate() {
                term *= point[i].powi(k as i32);
            }
            acc += term;
        }
        acc
    }

    /// Substitute `x_i = forms[i](y)`, producing a polynomial in the `y`
    /// variables. Every form must share the same target dimension.
    pub fn substitute_affine(&self, forms: &[AffineForm], target_nvars: usize) -> Polynomial {
        assert_eq!(forms.len(), self.nvars);
        for f in forms {
            assert_eq!(f.linear.len(), target_nvars);
        }
        let form_polys: Vec<Polynomial> = forms.iter().map(|f| f.to_poly(target_nvars)).collect();
        // Memoize powers of each substituted variable.
        let mut powers: Vec<Vec<Polynomial>> = form_polys
            .iter()
            .map(|p| vec![Polynomial::one(target_nvars), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target_nvars);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target_nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&form_polys[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize]);
            }
            out = out.add(&term);
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            format!("x{}", i)
                        } else {
                            format!("x{}^{}", i, k)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("{}", c)
                } else {
                    format!("{}*{}", c, vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    #[test]
    fn arithmetic_and_pruning() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = x.add(&y).mul(&x.sub(&y)); // x^2 - y^2
        assert_eq!(p.num_terms(), 2);
        let q = p.add(&y.mul(&y)); // x^2
        assert_eq!(q, x.mul(&x));
        assert!(q.sub(&q).is_zero());
    }

    #[test]
    fn evaluation() {
        // 1 + 2*x0*x1^2
        let p = Polynomial::from_terms(
            2,
            vec![(rat_i(1), vec![0, 0]), (rat_i(2), vec![1, 2])],
        );
        assert_eq!(p.eval(&[rat(1, 2), rat_i(3)]), rat_i(10));
        assert!((p.eval_f64(&[0.5, 3.0]) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn affine_substitution() {
        // p(x) = x^2 with x = 2y0 + y1 - 1.
        let p = Polynomial::from_terms(1, vec![(rat_i(1), vec![2])]);
        let sub = p.substitute_affine(
            &[AffineForm::new(vec![rat_i(2), rat_i(1)], rat_i(-1))],
            2,
        );
        let expect = AffineForm::new(vec![rat_i(2), rat_i(1)], rat_i(-1))
            .to_poly(2)
            .pow(2);
        assert_eq!(sub, expect);
    }

    #[test]
    fn derivatives() {
        // d/dx0 (x0^3 x1) = 3 x0^2 x1
        let p = Polynomial::from_terms(2, vec![(rat_i(1), vec![3, 1])]);
        let d = p.derivative(0);
        assert_eq!(d, Polynomial::from_terms(2, vec![(rat_i(3), vec![2, 1])]));
    }
}
