//! Exact Laurent polynomials in `x1, …, xn` with big-integer coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vector, so the term order is
//! lexicographic and two equal polynomials always have identical storage.
//! That makes the derived `Ord` and `Hash` usable as canonical keys.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Exponents = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPolynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

fn check_same(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::NvarsMismatch { left: a, right: b })
    }
}

fn add_term(terms: &mut BTreeMap<Exponents, BigInt>, exps: Exponents, coeff: BigInt) {
    if coeff.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(exps) {
        Entry::Vacant(v) => {
            v.insert(coeff);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += coeff;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl LaurentPolynomial {
    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The generator `x_{i+1}`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::monomial(nvars, exps, 1)
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        add_term(&mut terms, exps, c.into());
        LaurentPolynomial { nvars, terms }
    }

    /// Sums the given terms; repeated exponent vectors are combined.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, BigInt)>,
    {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            add_term(&mut map, e, c);
        }
        LaurentPolynomial { nvars, terms: map }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|(e, c)| c.is_one() && e.iter().all(|&v| v == 0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn coefficient(&self, exps: &[i64]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    /// True iff every stored coefficient is positive.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(Signed::is_positive)
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(self.nvars, other.nvars)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            add_term(&mut terms, e.clone(), c.clone());
        }
        Ok(LaurentPolynomial { nvars: self.nvars, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same(self.nvars, other.nvars)?;
        let mut terms = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                add_term(&mut terms, e, c1 * c2);
            }
        }
        Ok(LaurentPolynomial { nvars: self.nvars, terms })
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = LaurentPolynomial::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    fn shift(&self, by: &[i64]) -> Self {
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Componentwise minimum exponent; all zeros for the zero polynomial.
    pub fn min_exponents(&self) -> Exponents {
        let mut mins: Option<Exponents> = None;
        for e in self.terms.keys() {
            mins = Some(match mins {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        mins.unwrap_or_else(|| vec![0; self.nvars])
    }

    fn max_exponents(&self) -> Exponents {
        let mut maxs = vec![i64::MIN; self.nvars];
        for e in self.terms.keys() {
            for (m, v) in maxs.iter_mut().zip(e) {
                *m = (*m).max(*v);
            }
        }
        maxs
    }

    /// Exact quotient `self / divisor` in the Laurent ring, or `None` when
    /// the divisor does not divide.
    ///
    /// Both operands are shifted by monomials until no variable divides them;
    /// the quotient of the resulting polynomials is then found by long
    /// division in lex order, with every quotient term confined to the box
    /// of degrees an exact quotient would need.
    pub fn div_exact(&self, divisor: &Self) -> Result<Option<Self>> {
        check_same(self.nvars, divisor.nvars)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(self.clone()));
        }
        if divisor.is_monomial() {
            let (de, dc) = divisor.terms.iter().next().unwrap();
            let mut terms = BTreeMap::new();
            for (e, c) in &self.terms {
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return Ok(None);
                }
                terms.insert(e.iter().zip(de).map(|(a, b)| a - b).collect(), q);
            }
            return Ok(Some(LaurentPolynomial { nvars: self.nvars, terms }));
        }

        let alpha = self.min_exponents();
        let beta = divisor.min_exponents();
        let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let p = self.shift(&neg(&alpha));
        let q = divisor.shift(&neg(&beta));

        let bound: Vec<i64> = p.max_exponents().iter().zip(q.max_exponents()).map(|(a, b)| a - b).collect();
        if bound.iter().any(|&b| b < 0) {
            return Ok(None);
        }
        let (lead_e, lead_c) = q.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut rem = p.terms;
        let mut quot = BTreeMap::new();
        while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            let qe: Exponents = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            if qe.iter().zip(&bound).any(|(v, b)| *v < 0 || v > b) {
                return Ok(None);
            }
            let (qc, r) = c.div_rem(&lead_c);
            if !r.is_zero() {
                return Ok(None);
            }
            for (de, dc) in &q.terms {
                let te = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
                add_term(&mut rem, te, -(dc * &qc));
            }
            quot.insert(qe, qc);
        }
        let shift: Vec<i64> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
        Ok(Some(LaurentPolynomial { nvars: self.nvars, terms: quot }.shift(&shift)))
    }

    /// Ring substitution `x_i ↦ images[i]`.
    ///
    /// Negative powers are handled by clearing denominators: the numerator is
    /// substituted as a polynomial and then divided exactly by the substituted
    /// monomial denominator. Returns `None` if that division is inexact, i.e.
    /// the value is not a Laurent polynomial.
    pub fn substitute(&self, images: &[LaurentPolynomial]) -> Result<Option<Self>> {
        check_same(self.nvars, images.len())?;
        let Some(first) = images.first() else {
            return Ok(Some(self.clone()));
        };
        let target = first.nvars;
        for (i, img) in images.iter().enumerate() {
            check_same(target, img.nvars)?;
            if img.is_zero() {
                return Err(Error::ZeroImage { index: i });
            }
        }
        if self.is_zero() {
            return Ok(Some(LaurentPolynomial::zero(target)));
        }

        let lift: Vec<i64> = self.min_exponents().iter().map(|&m| (-m).max(0)).collect();
        let top: Vec<i64> = self.max_exponents().iter().zip(&lift).map(|(a, b)| (a + b).max(*b)).collect();
        let powers: Vec<Vec<LaurentPolynomial>> = images
            .iter()
            .zip(&top)
            .map(|(img, &t)| {
                let mut row = vec![LaurentPolynomial::one(target)];
                for _ in 0..t {
                    let next = row.last().unwrap().mul(img).expect("same ring");
                    row.push(next);
                }
                row
            })
            .collect();

        let mut numerator = LaurentPolynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = LaurentPolynomial::constant(target, c.clone());
            for (i, (v, l)) in e.iter().zip(&lift).enumerate() {
                let k = (v + l) as usize;
                if k > 0 {
                    term = term.mul(&powers[i][k])?;
                }
            }
            numerator = numerator.add(&term)?;
        }
        let mut denominator = LaurentPolynomial::one(target);
        for (i, &l) in lift.iter().enumerate() {
            if l > 0 {
                denominator = denominator.mul(&powers[i][l as usize])?;
            }
        }
        numerator.div_exact(&denominator)
    }

    /// Parses the rendering produced by `Display`, e.g. `x1^-1 + x1^-1*x2`.
    pub fn parse(input: &str, nvars: usize) -> Result<Self> {
        Parser { input, chars: input.char_indices().peekable(), nvars }.expression()
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            match (idx, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(i, &v)| if v == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, v) })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    input: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    nvars: usize,
}

impl Parser<'_> {
    fn fail<T>(&self, reason: impl Into<String>) -> Result<T> {
        Err(Error::Parse { input: self.input.to_string(), reason: reason.into() })
    }

    fn skip_ws(&mut self) {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|(_, c)| *c)
    }

    fn digits(&mut self) -> Result<String> {
        let mut s = String::new();
        while let Some((_, c)) = self.chars.next_if(|(_, c)| c.is_ascii_digit()) {
            s.push(c);
        }
        if s.is_empty() {
            return self.fail("expected digits");
        }
        Ok(s)
    }

    fn expression(mut self) -> Result<LaurentPolynomial> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.peek() == Some('-') {
            self.chars.next();
            negative = true;
        }
        loop {
            let (e, c) = self.term()?;
            terms.push((e, if negative { -c } else { c }));
            match self.peek() {
                None => break,
                Some('+') => negative = false,
                Some('-') => negative = true,
                Some(c) => return self.fail(format!("unexpected {c:?}")),
            }
            self.chars.next();
        }
        Ok(LaurentPolynomial::from_terms(self.nvars, terms))
    }

    fn term(&mut self) -> Result<(Exponents, BigInt)> {
        let mut exps = vec![0i64; self.nvars];
        let mut coeff = BigInt::one();
        loop {
            match self.peek() {
                Some('x') => {
                    self.chars.next();
                    let idx: usize = self.digits()?.parse().map_err(|_| Error::Parse {
                        input: self.input.to_string(),
                        reason: "variable index too large".into(),
                    })?;
                    if idx == 0 || idx > self.nvars {
                        return self.fail(format!("variable x{idx} outside x1..x{}", self.nvars));
                    }
                    let mut power = 1i64;
                    if self.peek() == Some('^') {
                        self.chars.next();
                        let neg = self.chars.next_if(|(_, c)| *c == '-').is_some();
                        let d: i64 = self.digits()?.parse().map_err(|_| Error::Parse {
                            input: self.input.to_string(),
                            reason: "exponent too large".into(),
                        })?;
                        power = if neg { -d } else { d };
                    }
                    exps[idx - 1] += power;
                }
                Some(c) if c.is_ascii_digit() => {
                    let d: BigInt = self.digits()?.parse().expect("digits");
                    coeff *= d;
                }
                Some(c) => return self.fail(format!("unexpected {c:?}")),
                None => return self.fail("unexpected end of input"),
            }
            if self.peek() == Some('*') {
                self.chars.next();
            } else {
                return Ok((exps, coeff));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(s: &str, n: usize) -> LaurentPolynomial {
        LaurentPolynomial::parse(s, n).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(lp("x2", 2).add(&lp("1", 2)).unwrap(), lp("1 + x2", 2));
        let p = lp("3*x1^-2*x2 - x2", 2);
        assert_eq!(p.add(&LaurentPolynomial::zero(2)).unwrap(), p);
        assert!(lp("x1", 2).add(&lp("-x1", 2)).unwrap().is_zero());
        assert!(lp("x1", 2).add(&lp("x1", 3)).is_err());
    }

    #[test]
    fn mul_examples() {
        assert!(lp("x1^-1", 2).mul(&lp("x1", 2)).unwrap().is_one());
        assert_eq!(lp("1 + x2", 2).mul(&lp("x1^-1", 2)).unwrap(), lp("x1^-1 + x1^-1*x2", 2));
        assert_eq!(lp("1 + x1", 1).mul(&lp("1 - x1", 1)).unwrap(), lp("1 - x1^2", 1));
        assert!(lp("x1", 1).mul(&lp("x1", 2)).is_err());
    }

    #[test]
    fn div_exact_examples() {
        assert_eq!(lp("x1*x2 + x1", 2).div_exact(&lp("x1", 2)).unwrap(), Some(lp("x2 + 1", 2)));
        assert_eq!(lp("1 - x1^2", 2).div_exact(&lp("1 + x1", 2)).unwrap(), Some(lp("1 - x1", 2)));
        assert_eq!(lp("1 + x1 + x2", 2).div_exact(&lp("1 + x1", 2)).unwrap(), None);
        assert_eq!(lp("x1", 2).div_exact(&LaurentPolynomial::zero(2)), Err(Error::DivisionByZero));
    }

    #[test]
    fn div_exact_laurent_shifts_and_coefficients() {
        // (x1^-1 + x2)(x1^2 x2^-1 - 3) expanded.
        let a = lp("x1^-1 + x2", 2);
        let b = lp("x1^2*x2^-1 - 3", 2);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.div_exact(&a).unwrap(), Some(b.clone()));
        assert_eq!(p.div_exact(&b).unwrap(), Some(a));
        assert_eq!(lp("3*x1", 1).div_exact(&lp("2", 1)).unwrap(), None);
        assert_eq!(lp("1 + x1^3", 1).div_exact(&lp("1 + x1", 1)).unwrap(), Some(lp("1 - x1 + x1^2", 1)));
        assert_eq!(lp("1 + x1^2", 1).div_exact(&lp("1 + x1", 1)).unwrap(), None);
    }

    #[test]
    fn substitute_examples() {
        let p = lp("x1^-1 + x1^-1*x2 + 5*x1^2", 2);
        let id = [lp("x1", 2), lp("x2", 2)];
        assert_eq!(p.substitute(&id).unwrap(), Some(p.clone()));

        let q = lp("x1^-1 + x1^-1*x2", 2);
        let swap = [lp("x2", 2), lp("x1", 2)];
        assert_eq!(q.substitute(&swap).unwrap(), Some(lp("x2^-1 + x1*x2^-1", 2)));

        let images = [lp("x1^-1 + x1^-1*x2", 2), lp("x2", 2)];
        assert_eq!(lp("x1^-1", 2).substitute(&images).unwrap(), None);

        let bad = [LaurentPolynomial::zero(2), lp("x2", 2)];
        assert_eq!(p.substitute(&bad), Err(Error::ZeroImage { index: 0 }));
        assert!(p.substitute(&[lp("x1", 2)]).is_err());
    }

    #[test]
    fn nonnegativity() {
        assert!(lp("1 + x2", 2).is_nonnegative());
        assert!(!lp("1 - x1", 2).is_nonnegative());
        assert!(LaurentPolynomial::zero(2).is_nonnegative());
    }

    #[test]
    fn rendering() {
        assert_eq!(lp("x1^-1*x2 + x1^-1", 2).to_string(), "x1^-1 + x1^-1*x2");
        assert_eq!(lp("-2 - x1 + 3*x1^-2*x2^4", 2).to_string(), "3*x1^-2*x2^4 - 2 - x1");
        assert_eq!(lp("-x1", 1).to_string(), "-x1");
        assert_eq!(LaurentPolynomial::zero(3).to_string(), "0");
        assert_eq!(lp("2*3*x1*x1", 1).to_string(), "6*x1^2");
        assert!(LaurentPolynomial::parse("x3", 2).is_err());
        assert!(LaurentPolynomial::parse("x1 +", 2).is_err());
        assert!(LaurentPolynomial::parse("x1 ? 2", 2).is_err());
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = LaurentPolynomial> {
        prop::collection::vec((prop::collection::vec(-3i64..=3, n), -5i64..=5), 0..=5)
            .prop_map(move |ts| LaurentPolynomial::from_terms(n, ts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
    }

    fn arb_triple() -> impl Strategy<Value = (LaurentPolynomial, LaurentPolynomial, LaurentPolynomial)> {
        (1usize..=4).prop_flat_map(|n| (arb_poly(n), arb_poly(n), arb_poly(n)))
    }

    proptest! {
        #[test]
        fn ring_axioms((p, q, r) in arb_triple()) {
            prop_assert_eq!(p.add(&q).unwrap(), q.add(&p).unwrap());
            prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap());
            prop_assert_eq!(p.add(&q).unwrap().add(&r).unwrap(), p.add(&q.add(&r).unwrap()).unwrap());
            prop_assert_eq!(p.mul(&q).unwrap().mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
            prop_assert_eq!(
                p.mul(&q.add(&r).unwrap()).unwrap(),
                p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap()
            );
        }

        #[test]
        fn div_exact_recovers_factor_and_is_sound((p, q, r) in arb_triple()) {
            if !q.is_zero() {
                let prod = p.mul(&q).unwrap();
                prop_assert_eq!(prod.div_exact(&q).unwrap(), Some(p.clone()));
                if let Some(quot) = r.div_exact(&q).unwrap() {
                    prop_assert_eq!(q.mul(&quot).unwrap(), r);
                }
            }
        }

        #[test]
        fn rendering_parses_back(p in (1usize..=4).prop_flat_map(arb_poly)) {
            prop_assert_eq!(LaurentPolynomial::parse(&p.to_string(), p.nvars()).unwrap(), p);
        }

        #[test]
        fn substitute_is_a_ring_homomorphism(
            (p, q, a, b) in (
                arb_poly(2), arb_poly(2),
                prop::collection::vec((prop::collection::vec(-2i64..=2, 2), 1i64..=3), 1..=2),
                prop::collection::vec((prop::collection::vec(-2i64..=2, 2), 1i64..=3), 1..=2),
            )
        ) {
            let mk = |ts: Vec<(Vec<i64>, i64)>| {
                LaurentPolynomial::from_terms(2, ts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
            };
            let images = [mk(a), mk(b)];
            prop_assume!(images.iter().all(|i| !i.is_zero()));
            let sp = p.substitute(&images).unwrap();
            let sq = q.substitute(&images).unwrap();
            if let (Some(sp), Some(sq)) = (sp, sq) {
                if let Some(sum) = p.add(&q).unwrap().substitute(&images).unwrap() {
                    prop_assert_eq!(sum, sp.add(&sq).unwrap());
                }
                if let Some(prod) = p.mul(&q).unwrap().substitute(&images).unwrap() {
                    prop_assert_eq!(prod, sp.mul(&sq).unwrap());
                }
            }
        }
    }
}
