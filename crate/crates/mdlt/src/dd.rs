//! Double-double (compensated) accumulation for badly cancelling sums.
//!
//! A `Dd` carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 32 significant decimal digits. Only the operations the
//! series evaluators need are implemented.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn add(self, x: f64) -> Dd {
        let (s1, e1) = two_sum(self.hi, x);
        let (s2, e2) = two_sum(s1, self.lo + e1);
        Dd { hi: s2, lo: e2 }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Complex accumulator built from two real double-double parts.
#[derive(Debug, Clone, Copy, Default)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn add(self, z: Complex64) -> DdComplex {
        DdComplex {
            re: self.re.add(z.re),
            im: self.im.add(z.im),
        }
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}
