use num_complex::Complex64;

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

#[inline]
fn two_sum(acc: f64, x: f64, comp: &mut f64) -> f64 {
    let t = acc + x;
    if acc.abs() >= x.abs() {
        *comp += (acc - t) + x;
    } else {
        *comp += (x - t) + acc;
    }
    t
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

impl Extend<Complex64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = Complex64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        acc.extend(iter);
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0].map(|x| Complex64::new(x, -x));
        let s: CompensatedSum = terms.into_iter().collect();
        assert_eq!(s.value(), Complex64::new(2.0, -2.0));
    }
}
