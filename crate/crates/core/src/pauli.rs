//! Pauli matrices and Bloch-vector operators on ℂ².

use crate::linalg::{Operator, C64, I, ONE, ZERO};

pub fn x() -> Operator {
    Operator::from_rows(2, &[ZERO, ONE, ONE, ZERO]).expect("2x2")
}

pub fn y() -> Operator {
    Operator::from_rows(2, &[ZERO, -I, I, ZERO]).expect("2x2")
}

pub fn z() -> Operator {
    Operator::from_rows(2, &[ONE, ZERO, ZERO, -ONE]).expect("2x2")
}

/// `c₀·I + c·σ`
pub fn combination(c0: f64, c: [f64; 3]) -> Operator {
    let r = |x: f64| C64::new(x, 0.0);
    Operator::from_rows(
        2,
        &[
            r(c0 + c[2]),
            C64::new(c[0], -c[1]),
            C64::new(c[0], c[1]),
            r(c0 - c[2]),
        ],
    )
    .expect("2x2")
}

/// Coordinates `(tr A, tr Aσ_x, tr Aσ_y, tr Aσ_z)` of a Hermitian 2×2 operator.
///
/// `A = ½(t₀ I + t·σ)` for the returned `(t₀, t)`.
pub fn coordinates(a: &Operator) -> (f64, [f64; 3]) {
    assert_eq!(a.dim(), 2, "qubit operator expected");
    let t0 = a.trace().re;
    let tx = (a * &x()).trace().re;
    let ty = (a * &y()).trace().re;
    let tz = (a * &z()).trace().re;
    (t0, [tx, ty, tz])
}
