//! Shallue–van de Woestijne map to a short Weierstrass curve.
//!
//! This is the generic curve map of RFC 9380 §6.6.1: it works for every
//! curve `y² = x³ + Ax + B` over any field, including the `A = 0` curves
//! used by pairing-friendly families, where the simplified SWU map does not
//! apply. Constants are derived once per curve from the curve coefficients,
//! following the `find_z_svdw` procedure of RFC 9380 appendix H.3.

use ark_ec::short_weierstrass::{Affine, SWCurveConfig};
use ark_ff::{BigInteger, Field, LegendreSymbol, One, PrimeField, Zero};

/// Precomputed map constants for one curve.
pub struct SvdwMap<C: SWCurveConfig> {
    z: C::BaseField,
    c1: C::BaseField,
    c2: C::BaseField,
    c3: C::BaseField,
    c4: C::BaseField,
}

fn curve_poly<C: SWCurveConfig>(x: C::BaseField) -> C::BaseField {
    (x.square() + C::COEFF_A) * x + C::COEFF_B
}

fn is_square<F: Field>(x: &F) -> bool {
    x.is_zero() || x.legendre() == LegendreSymbol::QuadraticResidue
}

fn inv0<F: Field>(x: F) -> F {
    x.inverse().unwrap_or_else(F::zero)
}

/// Parity of a field element, extended to extension fields coefficient-wise
/// (RFC 9380 §4.1).
pub(crate) fn sgn0<F: Field>(x: &F) -> bool {
    let mut sign = false;
    let mut zero = true;
    for c in x.to_base_prime_field_elements() {
        let sign_i = c.into_bigint().is_odd();
        let zero_i = c.is_zero();
        sign = sign || (zero && sign_i);
        zero = zero && zero_i;
    }
    sign
}

/// Smallest-magnitude Z satisfying the four SVDW criteria.
fn find_z<C: SWCurveConfig>() -> C::BaseField {
    let four = C::BaseField::from(4u64);
    let three = C::BaseField::from(3u64);
    let half = C::BaseField::from(2u64)
        .inverse()
        .expect("field characteristic is odd");
    let mut ctr = 1u64;
    loop {
        let base = C::BaseField::from_base_prime_field(
            <C::BaseField as Field>::BasePrimeField::from(ctr),
        );
        for cand in [base, -base] {
            let gz = curve_poly::<C>(cand);
            if gz.is_zero() {
                continue;
            }
            let t = three * cand.square() + four * C::COEFF_A;
            if t.is_zero() {
                continue;
            }
            let h = -t * inv0(four * gz);
            if h.is_zero() || !is_square(&h) {
                continue;
            }
            if is_square(&gz) || is_square(&curve_poly::<C>(-cand * half)) {
                return cand;
            }
        }
        ctr += 1;
    }
}

impl<C: SWCurveConfig> SvdwMap<C> {
    pub fn new() -> Self {
        let z = find_z::<C>();
        let gz = curve_poly::<C>(z);
        let t = C::BaseField::from(3u64) * z.square() + C::BaseField::from(4u64) * C::COEFF_A;
        let c1 = gz;
        let c2 = -z * C::BaseField::from(2u64)
            .inverse()
            .expect("field characteristic is odd");
        let mut c3 = (-gz * t)
            .sqrt()
            .expect("-g(Z)·(3Z²+4A) is square by choice of Z");
        if sgn0(&c3) {
            c3 = -c3;
        }
        let c4 = -C::BaseField::from(4u64) * gz * t.inverse().expect("3Z²+4A ≠ 0 by choice of Z");
        Self { z, c1, c2, c3, c4 }
    }

    /// Maps a field element to a point on the curve (not necessarily in the
    /// prime-order subgroup; the caller clears the cofactor).
    pub fn map_to_curve(&self, u: C::BaseField) -> Affine<C> {
        let tv1 = u.square() * self.c1;
        let tv2 = C::BaseField::one() + tv1;
        let tv1 = C::BaseField::one() - tv1;
        let tv3 = inv0(tv1 * tv2);
        let tv4 = u * tv1 * tv3 * self.c3;

        let x1 = self.c2 - tv4;
        let x2 = self.c2 + tv4;
        let x3 = self.z + self.c4 * (tv2.square() * tv3).square();

        let x = if is_square(&curve_poly::<C>(x1)) {
            x1
        } else if is_square(&curve_poly::<C>(x2)) {
            x2
        } else {
            x3
        };
        let gx = curve_poly::<C>(x);
        let mut y = gx.sqrt().expect("one of the three candidates is square");
        if sgn0(&u) != sgn0(&y) {
            y = -y;
        }
        Affine::new_unchecked(x, y)
    }
}
