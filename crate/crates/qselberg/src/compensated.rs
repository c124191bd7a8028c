//! Compensated (Neumaier) summation of complex terms.
//!
//! Real and imaginary parts are accumulated independently, each with its
//! own running correction.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Running compensated sum of complex numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: Neumaier,
    im: Neumaier,
    abs_total: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
        self.abs_total += z.norm();
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }

    /// Sum of the moduli of every term added so far.
    pub fn magnitude(&self) -> f64 {
        self.abs_total
    }
}

impl Extend<C64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = C64>>(&mut self, iter: I) {
        for z in iter {
            self.add(z);
        }
    }
}

/// Compensated sum of an iterator of complex terms.
pub fn csum<I: IntoIterator<Item = C64>>(iter: I) -> C64 {
    let mut s = CompensatedSum::new();
    s.extend(iter);
    s.value()
}
