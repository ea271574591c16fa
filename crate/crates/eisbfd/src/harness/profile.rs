//! The smooth wave profile `f(s) = exp(cos(a·s))` used by the manufactured
//! traveling-wave solutions, with closed-form derivatives through order six.
//!
//! Every derivative has the form `a^k · e^{cos y} · (A_k(cos y) + sin y ·
//! B_k(cos y))` with `y = a·s`; the polynomials were generated symbolically
//! and are evaluated in Horner form.

/// `f(s) = exp(cos(scale · s))` with analytic derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ExpCosProfile {
    /// Frequency `a` in `exp(cos(a·s))`.
    pub scale: f64,
}

impl ExpCosProfile {
    pub fn new(scale: f64) -> ExpCosProfile {
        ExpCosProfile { scale }
    }

    /// `f(s)`.
    pub fn value(&self, s: f64) -> f64 {
        self.deriv(0, s)
    }

    /// `(f′(s), f″(s))` from a single transcendental evaluation — the pair
    /// the manufactured heat forcing `−f′ − d·f″` needs at every node.
    pub fn first_two(&self, s: f64) -> (f64, f64) {
        let y = self.scale * s;
        let (sn, cs) = y.sin_cos();
        let e = cs.exp();
        let a = self.scale;
        (a * e * (-sn), a * a * e * (1.0 - cs * (1.0 + cs)))
    }

    /// All derivatives `f⁽⁰⁾(s) … f⁽⁶⁾(s)` from a single transcendental
    /// evaluation (the polynomial parts share the same powers of `cos`).
    pub fn derivs_through_six(&self, s: f64) -> [f64; 7] {
        let y = self.scale * s;
        let (sn, cs) = y.sin_cos();
        let e = cs.exp();
        let p = [
            1.0,
            -sn,
            1.0 - cs * (1.0 + cs),
            sn * cs * (cs + 3.0),
            (((cs + 6.0) * cs + 5.0) * cs - 5.0) * cs - 3.0,
            sn * (((((-cs - 10.0) * cs) - 23.0) * cs - 5.0) * cs + 8.0),
            (((((-cs - 15.0) * cs - 62.0) * cs - 60.0) * cs + 51.0) * cs + 59.0) * cs - 3.0,
        ];
        let mut out = [0.0; 7];
        let mut ak = 1.0;
        for (o, pk) in out.iter_mut().zip(p) {
            *o = ak * e * pk;
            ak *= self.scale;
        }
        out
    }

    /// `k`-th derivative of `f` at `s`, for `k ≤ 6`.
    pub fn deriv(&self, k: usize, s: f64) -> f64 {
        let y = self.scale * s;
        let (sn, cs) = y.sin_cos();
        let e = cs.exp();
        let p = match k {
            0 => 1.0,
            1 => -sn,
            2 => 1.0 - cs * (1.0 + cs),
            3 => sn * cs * (cs + 3.0),
            4 => (((cs + 6.0) * cs + 5.0) * cs - 5.0) * cs - 3.0,
            5 => sn * (((((-cs - 10.0) * cs) - 23.0) * cs - 5.0) * cs + 8.0),
            6 => {
                (((((-cs - 15.0) * cs - 62.0) * cs - 60.0) * cs + 51.0) * cs + 59.0) * cs
                    - 3.0
            }
            _ => panic!("derivative order {k} not implemented (max 6)"),
        };
        self.scale.powi(k as i32) * e * p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_frozen_reference_values() {
        // Reference values of d^k/ds^k exp(cos s) at s = 0.7, generated
        // symbolically and frozen.
        let expect = [
            2.148_655_262_776_123_7,
            -1.384_201_724_056_727_7,
            -0.751_654_957_559_768_2,
            3.985_822_890_957_641,
            -1.874_844_848_206_782_5,
            -19.510_655_511_451_382,
            42.482_567_345_780_78,
        ];
        let p = ExpCosProfile::new(1.0);
        for (k, &want) in expect.iter().enumerate() {
            let got = p.deriv(k, 0.7);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "k={k}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn chain_rule_scaling_matches_finite_differences() {
        // For scale 2π, check each derivative against a fourth-order central
        // difference of the previous order at a few points.
        let scale = 2.0 * std::f64::consts::PI;
        let p = ExpCosProfile::new(scale);
        let d = 1e-3;
        for &s in &[0.13, 0.4, 0.77] {
            for k in 1..=6 {
                let f = |x: f64| p.deriv(k - 1, x);
                let fd = (-f(s + 2.0 * d) + 8.0 * f(s + d) - 8.0 * f(s - d) + f(s - 2.0 * d))
                    / (12.0 * d);
                let exact = p.deriv(k, s);
                // Derivatives grow like scaleᵏ·e^{cos}; the FD truncation for
                // the highest orders reaches ~1e-8 relative to that magnitude.
                let tol = 1e-7 * exact.abs().max(scale.powi(k as i32) * 2.8);
                assert!(
                    (fd - exact).abs() <= tol,
                    "k={k}, s={s}: fd {fd} vs exact {exact}"
                );
            }
        }
    }

    #[test]
    fn fused_evaluations_match_the_single_derivative_path() {
        for &scale in &[1.0, 2.0 * std::f64::consts::PI] {
            let p = ExpCosProfile::new(scale);
            for &s in &[0.0, 0.13, 0.7, -0.4, 1.9] {
                let all = p.derivs_through_six(s);
                for (k, &got) in all.iter().enumerate() {
                    let want = p.deriv(k, s);
                    assert!(
                        (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                        "k={k}, s={s}"
                    );
                }
                let (d1, d2) = p.first_two(s);
                assert!((d1 - all[1]).abs() <= 1e-13 * all[1].abs().max(1.0));
                assert!((d2 - all[2]).abs() <= 1e-13 * all[2].abs().max(1.0));
            }
        }
    }

    #[test]
    fn periodicity_of_unit_scale_profile() {
        let p = ExpCosProfile::new(1.0);
        let two_pi = 2.0 * std::f64::consts::PI;
        for k in 0..=6 {
            let a = p.deriv(k, 0.3);
            let b = p.deriv(k, 0.3 + two_pi);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
