//! Double-double arithmetic for the small-wavenumber expansion checks.
//!
//! Extracting the quartic error coefficient from the low-mode symbol means
//! evaluating `Q̂₁ + ω²` where the two terms agree to a relative `(hω)⁴`:
//! at `hω = 10⁻²` roughly sixteen decimal digits cancel, which is exactly
//! the precision of an `f64`. An unevaluated pair `hi + lo` of doubles
//! carries ~32 significant digits, so the cancellation still leaves ~16
//! good digits. Only the handful of operations the evaluation needs are
//! implemented, and the trigonometric functions are small-angle Taylor
//! series that assert their argument range.

/// An unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

/// Error-free sum: returns `(fl(a+b), exact residual)`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Error-free sum assuming `|a| ≥ |b|`.
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Error-free product via fused multiply-add.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact for integers below 2⁵³.
    pub fn from_int(n: i64) -> Dd {
        Dd {
            hi: n as f64,
            lo: 0.0,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * x);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }

    /// One double-double Newton correction on the hardware square root.
    pub fn sqrt(self) -> Dd {
        assert!(self.hi >= 0.0, "square root of a negative double-double");
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let inv = 1.0 / self.hi.sqrt();
        let approx = Dd::from_f64(self.hi * inv);
        let defect = self.sub(approx.mul(approx));
        approx.add(Dd::from_f64(defect.hi * (inv * 0.5)))
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::ONE;
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Taylor sine; the series is truncated once terms fall below the
    /// double-double precision. Valid only for `|x| ≤ 0.5`.
    pub fn sin_small(self) -> Dd {
        assert!(
            self.hi.abs() <= 0.5,
            "small-angle sine called outside |x| <= 0.5"
        );
        let x2 = self.mul(self);
        let mut term = self;
        let mut sum = self;
        let mut k = 1i64;
        while term.hi.abs() > 1e-36 * sum.hi.abs().max(f64::MIN_POSITIVE) {
            let denom = -((2 * k) as f64 * (2 * k + 1) as f64);
            term = term.mul(x2).div(Dd::from_f64(denom));
            sum = sum.add(term);
            k += 1;
        }
        sum
    }

    /// Taylor cosine; same range contract as [`Dd::sin_small`].
    pub fn cos_small(self) -> Dd {
        assert!(
            self.hi.abs() <= 0.5,
            "small-angle cosine called outside |x| <= 0.5"
        );
        let x2 = self.mul(self);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut k = 1i64;
        while term.hi.abs() > 1e-36 * sum.hi.abs().max(f64::MIN_POSITIVE) {
            let denom = -((2 * k - 1) as f64 * (2 * k) as f64);
            term = term.mul(x2).div(Dd::from_f64(denom));
            sum = sum.add(term);
            k += 1;
        }
        sum
    }
}

/// The scaled low-mode defect `(Q̂₁ + ω²)·2880(2−c)/(ω⁶h⁴)`, a function of
/// `y = hω` and `c` alone. As `y → 0` it converges (quadratically in `y`) to
/// the quartic error coefficient `4 + 13c`.
pub(crate) fn scaled_defect(y: f64, c: f64) -> f64 {
    assert!(y != 0.0, "scaled defect is undefined at y = 0");
    assert!(
        y.abs() <= 0.5,
        "scaled defect evaluation limited to |h\u{3c9}| <= 0.5"
    );
    let yd = Dd::from_f64(y);
    let cd = Dd::from_f64(c);
    let cos_y = yd.cos_small();
    let half = yd.mul_f64(0.5);
    let cos_h = half.cos_small();
    let sin_h = half.sin_small();

    // Ω = −cos(y/2)(16 − (7+cos y)c), Δ = sqrt(Ω² + 4c² sin⁶(y/2)).
    let big_omega = cos_h
        .mul(Dd::from_int(16).sub(Dd::from_int(7).add(cos_y).mul(cd)))
        .neg();
    let delta = big_omega
        .mul(big_omega)
        .add(cd.mul(cd).mul(sin_h.powi(6)).mul_f64(4.0))
        .sqrt();

    // A = −(15+cos y) + (5+3cos y)c + Δ, so that Q̂₁ = 2A/(3h²).
    let a = Dd::from_int(15)
        .add(cos_y)
        .neg()
        .add(Dd::from_int(5).add(cos_y.mul_f64(3.0)).mul(cd))
        .add(delta);

    // (Q̂₁ + ω²)·2880(2−c)/(ω⁶h⁴) = (2A/(3y²) + 1)·2880(2−c)/y⁴.
    let y2 = yd.mul(yd);
    let inner = a.mul_f64(2.0).div(y2.mul_f64(3.0)).add(Dd::ONE);
    let scale = Dd::from_int(2).sub(cd).mul_f64(2880.0).div(y2.mul(y2));
    inner.mul(scale).to_f64()
}
