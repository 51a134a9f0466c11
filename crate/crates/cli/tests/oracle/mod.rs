//! Brute-force computation of `T(1,2)` on `T*P^1` and both composites with
//! its adjoint, written out entry by entry.
//!
//! Variables are `(x1, x2, q)`. The two fixed points are the coordinate lines
//! `{1}` and `{2}`. At the line `e_a` (with `b` the other index) the tangent
//! weights are `x_b - x_a` along the zero section and `x_a - x_b + h` along the
//! cotangent fibre.

use flopcalc::exactalg::{ExponentVector, LaurentPoly, RationalFn};

pub const NVARS: usize = 3;

fn w(x1: i32, x2: i32, h: i32) -> ExponentVector {
    ExponentVector::from_vec(vec![x1, x2, h])
}

fn e(x1: i32, x2: i32, h: i32) -> LaurentPoly {
    LaurentPoly::exp(&w(x1, x2, h))
}

/// `1 - e^{-weight}`.
fn euler(x1: i32, x2: i32, h: i32) -> LaurentPoly {
    &LaurentPoly::one(NVARS) - &e(-x1, -x2, -h)
}

/// `x_a - x_b` as a coefficient pair.
fn ab(a: usize) -> (i32, i32) {
    if a == 0 {
        (1, -1)
    } else {
        (-1, 1)
    }
}

/// `λ_{-1}(T^∨)` at the fixed point `a`.
pub fn lambda(a: usize) -> LaurentPoly {
    let (p, m) = ab(a);
    &euler(-p, -m, 0) * &euler(p, m, 1)
}

/// `[O_{P^1}]` at `a`: one Euler factor for the cotangent direction.
fn zero_section(a: usize) -> LaurentPoly {
    let (p, m) = ab(a);
    euler(p, m, 1)
}

fn unit_x(a: usize) -> (i32, i32) {
    if a == 0 {
        (1, 0)
    } else {
        (0, 1)
    }
}

/// `E^(1)` from `Y(1,2)` to the point: twisted by `x_a - x_1 - x_2`.
fn e_entry(a: usize) -> LaurentPoly {
    let (u1, u2) = unit_x(a);
    &zero_section(a) * &e(u1 - 1, u2 - 1, 0)
}

/// `F^(1)` from the point to `Y(1,2)`: twisted by `x_c`.
fn f_entry(c: usize) -> LaurentPoly {
    let (u1, u2) = unit_x(c);
    &zero_section(c) * &e(u1, u2, 0)
}

/// `T = [O_Δ] + E^(1) * F^(1)`; the convolution over a point has no denominator.
pub fn t_matrix() -> [[RationalFn; 2]; 2] {
    let entry = |a: usize, c: usize| {
        let diag = if a == c { lambda(a) } else { LaurentPoly::zero(NVARS) };
        RationalFn::from_poly(&diag + &(&e_entry(a) * &f_entry(c)))
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// Transposed bar involution times `e^{-h}`; the sign `(-1)^2` is trivial.
pub fn adjoint_matrix(t: &[[RationalFn; 2]; 2]) -> [[RationalFn; 2]; 2] {
    let omega = w(0, 0, -1);
    let entry = |c: usize, a: usize| t[a][c].bar().shift(&omega);
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// `Σ_m P(a,m) Q(m,c) / λ_m`.
pub fn compose(p: &[[RationalFn; 2]; 2], q: &[[RationalFn; 2]; 2]) -> [[RationalFn; 2]; 2] {
    let entry = |a: usize, c: usize| {
        let t0 = (&p[a][0] * &q[0][c]).div_poly(&lambda(0)).unwrap();
        let t1 = (&p[a][1] * &q[1][c]).div_poly(&lambda(1)).unwrap();
        &t0 + &t1
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

pub fn diagonal() -> [[RationalFn; 2]; 2] {
    let z = RationalFn::zero(NVARS);
    [
        [RationalFn::from_poly(lambda(0)), z.clone()],
        [z, RationalFn::from_poly(lambda(1))],
    ]
}
