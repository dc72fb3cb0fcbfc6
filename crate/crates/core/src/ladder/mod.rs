//! Normal-ordered polynomials in the ladder operators.
//!
//! The algebra is dimensionless (`ħ = μ = ω = 1`): `x̃ = (a + a†)/√2` and
//! `p̃ = i(a† − a)/√2`. A monomial `(r, s)` stands for `a†^r a^s`.

mod scalar;

pub use scalar::{ExactScalar, QSqrt2};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Longest operator word accepted by [`expand_word`].
pub const MAX_WORD_LEN: usize = 16;

/// Dimensionless position or momentum operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    X,
    P,
}

/// The word `X^k P^l`.
pub fn xp_word(k: usize, l: usize) -> Vec<Symbol> {
    let mut w = vec![Symbol::X; k];
    w.extend(std::iter::repeat_n(Symbol::P, l));
    w
}

/// Scalars a [`LadderPolynomial`] may carry.
pub trait Coefficient: Clone + std::fmt::Debug {
    fn to_complex(&self) -> Complex64;
    fn is_zero(&self) -> bool;
}

impl Coefficient for ExactScalar {
    fn to_complex(&self) -> Complex64 {
        ExactScalar::to_complex(self)
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
}

impl Coefficient for Complex64 {
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
}

/// Single normal-ordered term `coeff · a†^r a^s`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderMonomial<C = ExactScalar> {
    pub r: u32,
    pub s: u32,
    pub coeff: C,
}

/// A sum of normal-ordered monomials keyed by `(r, s)`. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderPolynomial<C = ExactScalar> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coefficient> LadderPolynomial<C> {
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), C)>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { terms }
    }

    pub fn get(&self, r: u32, s: u32) -> Option<&C> {
        self.terms.get(&(r, s))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `r + s` over the stored terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(r, s)| r + s).max().unwrap_or(0)
    }

    pub fn monomials(&self) -> impl Iterator<Item = LadderMonomial<C>> + '_ {
        self.terms.iter().map(|(&(r, s), c)| LadderMonomial { r, s, coeff: c.clone() })
    }

    pub fn to_numeric(&self) -> LadderPolynomial<Complex64> {
        LadderPolynomial {
            terms: self.terms.iter().map(|(k, c)| (*k, c.to_complex())).collect(),
        }
    }

    /// Heisenberg rotation by phase `theta`: `a → a e^{−iθ}`, `a† → a† e^{iθ}`.
    pub fn rotate(&self, theta: f64) -> LadderPolynomial<Complex64> {
        let terms = self.terms.iter().map(|(&(r, s), c)| {
            let phase = Complex64::from_polar(1.0, (r as f64 - s as f64) * theta);
            ((r, s), c.to_complex() * phase)
        });
        LadderPolynomial::from_terms(terms)
    }

    /// `⟨m| poly |n⟩`.
    pub fn matrix_element(&self, m: usize, n: usize) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(r, s), c)| c.to_complex() * ladder_element(r as usize, s as usize, m, n))
            .sum()
    }

    /// `⟨bra| poly |ket⟩` for number-basis coefficient vectors.
    pub fn sandwich(&self, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (&(r, s), c) in &self.terms {
            let (r, s) = (r as usize, s as usize);
            let mut acc = Complex64::new(0.0, 0.0);
            // a†^r a^s |n⟩ lands on |n − s + r⟩
            for (n, &kn) in ket.iter().enumerate().skip(s) {
                let m = n - s + r;
                if m >= bra.len() {
                    break;
                }
                if kn.norm_sqr() == 0.0 {
                    continue;
                }
                acc += bra[m].conj() * kn * sqrt_falling(n, s) * sqrt_falling(m, r);
            }
            total += c.to_complex() * acc;
        }
        total
    }

    /// `⟨ψ| poly |ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        self.sandwich(psi, psi)
    }
}

impl LadderPolynomial<ExactScalar> {
    pub fn identity() -> Self {
        Self::from_terms([((0, 0), ExactScalar::one())])
    }

    fn add_term(terms: &mut BTreeMap<(u32, u32), ExactScalar>, key: (u32, u32), c: ExactScalar) {
        let entry = terms.entry(key).or_insert_with(ExactScalar::zero);
        *entry += &c;
    }

    /// Right-multiply by `a`.
    fn mul_lowering(&self, factor: &ExactScalar) -> BTreeMap<(u32, u32), ExactScalar> {
        self.terms.iter().map(|(&(r, s), c)| ((r, s + 1), c * factor)).collect()
    }

    /// Right-multiply by `a†`, using `a^s a† = a† a^s + s a^{s−1}`.
    fn mul_raising(&self, factor: &ExactScalar) -> BTreeMap<(u32, u32), ExactScalar> {
        let mut out = BTreeMap::new();
        for (&(r, s), c) in &self.terms {
            let c = c * factor;
            if s > 0 {
                Self::add_term(&mut out, (r, s - 1), &c * s as i128);
            }
            Self::add_term(&mut out, (r + 1, s), c);
        }
        out
    }

    /// Right-multiply by `α a + β a†`.
    fn mul_linear(&self, alpha: &ExactScalar, beta: &ExactScalar) -> Self {
        let mut terms = self.mul_lowering(alpha);
        for (k, c) in self.mul_raising(beta) {
            Self::add_term(&mut terms, k, c);
        }
        Self::from_terms(terms)
    }

    pub fn mul_symbol(&self, sym: Symbol) -> Self {
        let h = ExactScalar::inv_sqrt2();
        match sym {
            Symbol::X => self.mul_linear(&h, &h),
            Symbol::P => {
                let ih = &ExactScalar::i() * &h;
                self.mul_linear(&(-&ih), &ih)
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            Self::add_term(&mut terms, *k, -c);
        }
        Self::from_terms(terms)
    }
}

impl<C: Coefficient + std::fmt::Display> std::fmt::Display for LadderPolynomial<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(r, s), c)| format!("[{c}]·a†^{r} a^{s}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exact normal-ordered expansion of a product of `x̃` and `p̃` taken in the
/// order given.
pub fn expand_word(word: &[Symbol]) -> Result<LadderPolynomial> {
    if word.len() > MAX_WORD_LEN {
        return Err(Error::WordTooLong { len: word.len(), max: MAX_WORD_LEN });
    }
    Ok(word.iter().fold(LadderPolynomial::identity(), |acc, &sym| acc.mul_symbol(sym)))
}

/// Expansion of the word with `X → x̃ cos θ + p̃ sin θ` and
/// `P → p̃ cos θ − x̃ sin θ`.
///
/// In ladder form the substitution is `a → a e^{−iθ}`, which commutes with
/// normal ordering, so each term of the `θ = 0` expansion picks up the phase
/// `e^{i(r−s)θ}`.
pub fn heisenberg_word(word: &[Symbol], theta: f64) -> Result<LadderPolynomial<Complex64>> {
    Ok(expand_word(word)?.rotate(theta))
}

/// `⟨m| poly |n⟩`.
pub fn matrix_element<C: Coefficient>(poly: &LadderPolynomial<C>, m: usize, n: usize) -> Complex64 {
    poly.matrix_element(m, n)
}

/// `√(n!/(n−s)!)` as a product of square roots of consecutive integers.
/// Zero when `s > n`.
pub fn sqrt_falling(n: usize, s: usize) -> f64 {
    if s > n {
        return 0.0;
    }
    ((n - s + 1)..=n).map(|j| (j as f64).sqrt()).product()
}

/// `⟨m| a†^r a^s |n⟩`.
pub fn ladder_element(r: usize, s: usize, m: usize, n: usize) -> f64 {
    if s > n || r > m || n - s != m - r {
        return 0.0;
    }
    sqrt_falling(n, s) * sqrt_falling(m, r)
}

type PolyCache = Mutex<HashMap<(usize, usize), Arc<LadderPolynomial<Complex64>>>>;

/// Floating-point copy of `expand_word(X^k P^l)`, memoised.
pub fn xp_polynomial(k: usize, l: usize) -> Result<Arc<LadderPolynomial<Complex64>>> {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("poly cache poisoned").get(&(k, l)) {
        return Ok(Arc::clone(p));
    }
    let poly = Arc::new(expand_word(&xp_word(k, l))?.to_numeric());
    cache.lock().expect("poly cache poisoned").insert((k, l), Arc::clone(&poly));
    Ok(poly)
}
