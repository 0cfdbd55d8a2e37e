//! Named residual collections.

use alloc::vec::Vec;

/// Ordered list of `(name, value)` residuals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Residuals {
    pub entries: Vec<(&'static str, f64)>,
}

impl Residuals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &'static str, value: f64) {
        self.entries.push((name, value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    /// Largest residual; NaN counts as infinite.
    pub fn max(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, v)| if v.is_nan() { f64::INFINITY } else { v.abs() })
            .fold(0.0, f64::max)
    }

    /// Name and value of the largest residual.
    pub fn worst(&self) -> Option<(&'static str, f64)> {
        let mut best: Option<(&'static str, f64)> = None;
        for &(n, v) in &self.entries {
            let a = if v.is_nan() { f64::INFINITY } else { v.abs() };
            if best.map_or(true, |(_, b)| a > b) {
                best = Some((n, a));
            }
        }
        best
    }

    pub fn extend(&mut self, other: Residuals) {
        self.entries.extend(other.entries);
    }

    pub fn iter(&self) -> impl Iterator<Item = &(&'static str, f64)> {
        self.entries.iter()
    }
}

/// `|sum of terms| / max |term|`, or 0 when every term vanishes.
pub fn normalized(terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let sum: f64 = terms.iter().sum();
    if scale == 0.0 {
        0.0
    } else {
        sum.abs() / scale
    }
}

/// Complex version of [`normalized`].
pub fn normalized_c(terms: &[crate::Complex64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.norm()));
    let sum: crate::Complex64 = terms.iter().sum();
    if scale == 0.0 {
        0.0
    } else {
        sum.norm() / scale
    }
}
