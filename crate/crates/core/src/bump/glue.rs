//! Flat-gluing primitives.
//!
//! All transitions are built from e(x) = exp(-c / sqrt(x)) for x > 0 (zero
//! otherwise), which vanishes to all orders at 0. The square-root form keeps
//! third derivatives small enough for the centered finite-difference oracle
//! at step 1e-5 and keeps values representable in f64 much closer to the
//! junction than exp(-c/x) would.
//!
//! Two constants are used. `GLUE_C` shapes every profile transition.
//! `WALL_C` shapes the walls of the sign field k; it is chosen so that the
//! band where e underflows to exact zero is narrower than 1e-6, which is
//! what makes the sampled zero set of f hug its nominal zero set at that
//! tolerance.

pub const GLUE_C: f64 = 0.8;
pub const WALL_C: f64 = 0.74;

/// exp(-c/sqrt(x)) for x > 0, else 0.
#[inline]
pub fn e_flat(x: f64, c: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-c / x.sqrt()).exp()
    }
}

/// d/dx of [`e_flat`].
#[inline]
pub fn e_flat_d(x: f64, c: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        let s = x.sqrt();
        (0.5 * c / (s * x)) * (-c / s).exp()
    }
}

/// Smooth step: 0 for x <= 0, 1 for x >= 1, strictly increasing between,
/// flat to all orders at both ends. s(x) + s(1-x) = 1.
#[inline]
pub fn step(x: f64, c: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = e_flat(x, c);
        let b = e_flat(1.0 - x, c);
        a / (a + b)
    }
}

/// d/dx of [`step`].
#[inline]
pub fn step_d(x: f64, c: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let a = e_flat(x, c);
        let b = e_flat(1.0 - x, c);
        let da = e_flat_d(x, c);
        let db = -e_flat_d(1.0 - x, c);
        let denom = a + b;
        (da * b - a * db) / (denom * denom)
    }
}

/// Smooth bump: positive exactly on (0, 1), flat-zero outside.
#[inline]
pub fn bump(x: f64, c: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        e_flat(x, c) * e_flat(1.0 - x, c)
    }
}

/// d/dx of [`bump`].
#[inline]
pub fn bump_d(x: f64, c: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        e_flat_d(x, c) * e_flat(1.0 - x, c) - e_flat(x, c) * e_flat_d(1.0 - x, c)
    }
}

/// Symmetric hump with exact unit-interval integral 1/2: step(2x)*step(2-2x).
/// Equals step(2x) on [0, 1/2] and step(2-2x) on [1/2, 1].
#[inline]
pub fn hump_half_integral(x: f64, c: f64) -> f64 {
    step(2.0 * x, c) * step(2.0 - 2.0 * x, c)
}

#[inline]
pub fn hump_half_integral_d(x: f64, c: f64) -> f64 {
    2.0 * step_d(2.0 * x, c) * step(2.0 - 2.0 * x, c)
        - 2.0 * step(2.0 * x, c) * step_d(2.0 - 2.0 * x, c)
}

/// Width (in x) of the band next to 0 where [`e_flat`] underflows to exact
/// zero in f64: the sampled zero set of any wall is fattened by this much.
pub fn exact_zero_width(c: f64) -> f64 {
    // exp(u) == 0.0 in f64 for u < ~-745.2
    let u = 745.2;
    (c / u) * (c / u)
}
