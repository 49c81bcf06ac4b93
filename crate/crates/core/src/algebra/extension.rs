use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::field::is_prime;
use super::AlgebraError;

/// A modular purely inseparable extension `k(t₁,…,t_r)/k` with
/// `tᵢ^{qᵢ} ∈ k`, `qᵢ = p^{eᵢ}`, given by `p` and the exponent vector.
///
/// Text form: `p=2;e=1,1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ExtensionSpec {
    p: u32,
    exponents: Vec<u32>,
}

impl ExtensionSpec {
    pub fn new(p: u32, exponents: Vec<u32>) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if exponents.is_empty() {
            return Err(AlgebraError::Parse("exponent vector is empty".into()));
        }
        if exponents.contains(&0) {
            return Err(AlgebraError::Parse("every exponent must be >= 1".into()));
        }
        // keep the degree well inside u64
        let bits: f64 = exponents.iter().map(|&e| e as f64).sum::<f64>() * (p as f64).log2();
        if bits > 62.0 {
            return Err(AlgebraError::TooLarge(format!(
                "degree {p}^{:?}",
                exponents
            )));
        }
        Ok(Self { p, exponents })
    }

    /// Primitive extension of degree `p^e`.
    pub fn primitive(p: u32, e: u32) -> Result<Self, AlgebraError> {
        Self::new(p, vec![e])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Number of generators `r`.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// `qᵢ = p^{eᵢ}`.
    pub fn q(&self, i: usize) -> u64 {
        (self.p as u64).pow(self.exponents[i])
    }

    pub fn qs(&self) -> Vec<u64> {
        (0..self.rank()).map(|i| self.q(i)).collect()
    }

    /// `[k':k] = ∏ qᵢ`.
    pub fn degree(&self) -> u64 {
        self.qs().iter().product()
    }

    /// Exponent of the extension: `max eᵢ`.
    pub fn extension_exponent(&self) -> u32 {
        *self.exponents.iter().max().unwrap()
    }

    pub fn is_primitive(&self) -> bool {
        self.exponents.len() == 1
    }
}

impl fmt::Display for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        write!(f, "p={};e={}", self.p, es.join(","))
    }
}

impl FromStr for ExtensionSpec {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::Parse(format!("expected `p=<prime>;e=<e1,...>`, got `{s}`"));
        let (p_part, e_part) = s.trim().split_once(';').ok_or_else(bad)?;
        let p: u32 = p_part
            .trim()
            .strip_prefix("p=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(bad)?;
        let es = e_part.trim().strip_prefix("e=").ok_or_else(bad)?;
        let exponents = es
            .split(',')
            .map(|e| e.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(p, exponents)
    }
}

impl TryFrom<String> for ExtensionSpec {
    type Error = AlgebraError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ExtensionSpec> for String {
    fn from(e: ExtensionSpec) -> String {
        e.to_string()
    }
}
