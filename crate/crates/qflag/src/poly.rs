//! Exact multivariate and univariate polynomial arithmetic.
//!
//! `MPoly` is a sparse multivariate polynomial over the rationals with a
//! fixed variable count, used for cohomology classes on the Abelianized
//! variety. `UPoly` and `RatFn` provide dense univariate polynomials and
//! reduced rational functions in the scalar-extraction parameter used by
//! the period computation.

use crate::linalg::{rat, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Sparse multivariate polynomial with rational coefficients; keys are
/// exponent vectors of a fixed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u16>, Rat>,
}

impl MPoly {
    pub fn zero(vars: usize) -> MPoly {
        MPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: Rat) -> MPoly {
        let mut p = MPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars], c);
        }
        p
    }

    pub fn one(vars: usize) -> MPoly {
        MPoly::constant(vars, Rat::one())
    }

    /// The variable `x_i`.
    pub fn var(vars: usize, i: usize) -> MPoly {
        let mut expt = vec![0u16; vars];
        expt[i] = 1;
        let mut p = MPoly::zero(vars);
        p.terms.insert(expt, Rat::one());
        p
    }

    /// A linear form with integer coefficients plus a rational constant.
    pub fn linear(vars: usize, coeffs: &[i64], constant: Rat) -> MPoly {
        let mut p = MPoly::constant(vars, constant);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                p.add_term(
                    {
                        let mut e = vec![0u16; vars];
                        e[i] = 1;
                        e
                    },
                    rat(c),
                );
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, expt: Vec<u16>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(expt) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.vars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| (e.clone(), v * c))
            .collect();
        MPoly {
            vars: self.vars,
            terms,
        }
    }

    /// Product, truncated to terms of total degree at most `cutoff` when
    /// one is given.
    pub fn mul(&self, other: &MPoly, cutoff: Option<u32>) -> MPoly {
        let mut out = MPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            let da: u32 = ea.iter().map(|&x| x as u32).sum();
            for (eb, cb) in &other.terms {
                if let Some(max) = cutoff {
                    let db: u32 = eb.iter().map(|&x| x as u32).sum();
                    if da + db > max {
                        continue;
                    }
                }
                let e: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Discards terms of total degree above `max`.
    pub fn truncate(&self, max: u32) -> MPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>() <= max)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        MPoly {
            vars: self.vars,
            terms,
        }
    }

    /// The homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> MPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>() == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        MPoly {
            vars: self.vars,
            terms,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient(&self, expt: &[u16]) -> Rat {
        self.terms.get(expt).cloned().unwrap_or_else(Rat::zero)
    }

    /// Applies a permutation of the variables: variable `i` becomes
    /// `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> MPoly {
        let mut out = MPoly::zero(self.vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0u16; self.vars];
            for (i, &x) in e.iter().enumerate() {
                ne[perm[i]] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }
}

/// Dense univariate polynomial over the rationals; index = degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly(pub Vec<Rat>);

impl UPoly {
    pub fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    pub fn constant(c: Rat) -> UPoly {
        if c.is_zero() {
            UPoly::zero()
        } else {
            UPoly(vec![c])
        }
    }

    pub fn one() -> UPoly {
        UPoly::constant(Rat::one())
    }

    /// `a + b x`.
    pub fn linear(a: Rat, b: Rat) -> UPoly {
        let mut p = UPoly(vec![a, b]);
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        let mut p = UPoly(out);
        p.normalize();
        p
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut p = UPoly(out);
        p.normalize();
        p
    }

    pub fn scale(&self, c: &Rat) -> UPoly {
        if c.is_zero() {
            return UPoly::zero();
        }
        UPoly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn eval0(&self) -> Rat {
        self.0.first().cloned().unwrap_or_else(Rat::zero)
    }

    /// Polynomial remainder of `self` by `other` (exact, rational).
    fn rem(&self, other: &UPoly) -> UPoly {
        let mut r = self.clone();
        let d = other.degree();
        let lead = other.0.last().expect("nonzero divisor");
        while !r.is_zero() && r.degree() >= d {
            let shift = r.degree() - d;
            let factor = r.0.last().unwrap() / lead;
            for i in 0..=d {
                let sub = &other.0[i] * &factor;
                r.0[i + shift] -= sub;
            }
            r.normalize();
        }
        r
    }

    /// Monic greatest common divisor. Every remainder is rescaled to monic
    /// to keep the coefficient sizes from compounding across steps.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let lead = b.0.last().unwrap().clone();
            if !lead.is_one() {
                b = b.scale(&(Rat::one() / lead));
            }
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.0.last().unwrap().clone();
        a.scale(&(Rat::one() / lead))
    }

    /// First `count` coefficients of the power series inverse; the constant
    /// term must be nonzero.
    pub fn series_inverse(&self, count: usize) -> Vec<Rat> {
        let a0 = self.eval0();
        assert!(!a0.is_zero(), "series inverse needs a unit constant term");
        let mut inv = Vec::with_capacity(count);
        inv.push(Rat::one() / &a0);
        for n in 1..count {
            let mut acc = Rat::zero();
            for k in 1..=n.min(self.degree()) {
                acc += &self.0[k] * &inv[n - k];
            }
            inv.push(-acc / &a0);
        }
        inv
    }

    /// First `count` coefficients of `self / den` as a power series; the
    /// denominator's constant term must be nonzero.
    pub fn series_quotient(&self, den: &UPoly, count: usize) -> Vec<Rat> {
        let inv = den.series_inverse(count);
        (0..count)
            .map(|n| {
                let mut acc = Rat::zero();
                for k in 0..=n.min(self.0.len().saturating_sub(1)) {
                    if let Some(c) = self.0.get(k) {
                        acc += c * &inv[n - k];
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact division; panics when not divisible (internal use only).
    pub fn div_exact(&self, other: &UPoly) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut r = self.clone();
        let d = other.degree();
        let lead = other.0.last().expect("nonzero divisor");
        let mut q = vec![Rat::zero(); self.0.len() - other.0.len() + 1];
        while !r.is_zero() && r.degree() >= d {
            let shift = r.degree() - d;
            let factor = r.0.last().unwrap() / lead;
            q[shift] = factor.clone();
            for i in 0..=d {
                let sub = &other.0[i] * &factor;
                r.0[i + shift] -= sub;
            }
            r.normalize();
        }
        assert!(r.is_zero(), "div_exact: remainder is nonzero");
        let mut p = UPoly(q);
        p.normalize();
        p
    }
}

/// Reduced rational function in one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: UPoly,
    pub den: UPoly,
}

impl RatFn {
    pub fn from_rat(c: Rat) -> RatFn {
        RatFn {
            num: UPoly::constant(c),
            den: UPoly::one(),
        }
    }

    pub fn new(num: UPoly, den: UPoly) -> RatFn {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut f = RatFn { num, den };
        f.reduce();
        f
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = UPoly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() > 0 {
            self.num = self.num.div_exact(&g);
            self.den = self.den.div_exact(&g);
        }
        // Canonical form: monic denominator.
        let lead = self.den.0.last().unwrap().clone();
        if !lead.is_one() {
            let inv = Rat::one() / lead;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        RatFn::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn mul_poly(&self, p: &UPoly) -> RatFn {
        RatFn::new(self.num.mul(p), self.den.clone())
    }

    pub fn div_poly(&self, p: &UPoly) -> RatFn {
        RatFn::new(self.num.clone(), self.den.mul(p))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Value at zero; `None` when there is a pole.
    pub fn eval0(&self) -> Option<Rat> {
        let d0 = self.den.eval0();
        if d0.is_zero() {
            return None;
        }
        Some(self.num.eval0() / d0)
    }
}

/// Exact factorial as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut f = BigInt::one();
    for k in 2..=n as u64 {
        f *= k;
    }
    Rat::from(f)
}

/// Bernoulli numbers `B_0..B_n` with the convention `B_1 = -1/2`, by the
/// standard recurrence.
pub fn bernoulli(n: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0.
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += binomial(m + 1, j) * bj;
        }
        b.push(-acc / binomial(m + 1, m));
    }
    b
}

pub fn binomial(n: usize, k: usize) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rat::new(num, den)
}

impl std::fmt::Display for MPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    write!(f, "*x{}^{}", i, x)?;
                }
            }
        }
        Ok(())
    }
}

/// Formats a rational without a denominator when integral.
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the output of [`rat_to_string`].
pub fn rat_from_string(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().ok()?;
        let denom: BigInt = d.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        Some(Rat::new(numer, denom))
    } else {
        let numer: BigInt = s.parse().ok()?;
        Some(Rat::from(numer))
    }
}
