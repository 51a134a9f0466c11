//! Divisor-class lattice of `Z̃^o(k,N)` and of its components `Z^o_s(k,N)`.
//!
//! Ambient classes are integer combinations of the components `Z_0..Z_k` and
//! of `a = c1 det(C^N/V_1)`, `b = c1 det(V_2)`, modulo
//! `R1: Σ Z_s = 0` and `R2: b - a = Σ s Z_s`. A class on `Z^o_s` combines the
//! boundary divisors `D_{s,s-1}`, `D_{s,s+1}` with `a`, `b`, modulo
//! `b - a = D_{s,s+1} - D_{s,s-1}`. Missing boundary divisors at `s = 0` and
//! `s = k` are the zero class.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    #[error("component index {s} out of range 0..={k}")]
    IndexOutOfRange { s: usize, k: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("lattice class mismatch: {0}")]
    Mismatch(String),
}

pub const BOUNDARY_CONVENTION: &str = "D_{0,-1} = D_{k,k+1} = 0";

/// A class on `Z̃^o(k,N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmbientDivClass {
    pub zcoef: Vec<i64>,
    pub a: i64,
    pub b: i64,
}

impl AmbientDivClass {
    pub fn zero(k: usize) -> Self {
        AmbientDivClass {
            zcoef: vec![0; k + 1],
            a: 0,
            b: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.zcoef.len() - 1
    }

    /// `Σ_s f(s) Z_s`.
    pub fn components<F: Fn(i64) -> i64>(k: usize, f: F) -> Self {
        AmbientDivClass {
            zcoef: (0..=k as i64).map(f).collect(),
            a: 0,
            b: 0,
        }
    }

    pub fn global(k: usize, a: i64, b: i64) -> Self {
        AmbientDivClass {
            zcoef: vec![0; k + 1],
            a,
            b,
        }
    }

    /// `L = det(C^N/V_1)^∨ ⊗ det V_2`, i.e. `b - a`.
    pub fn l_bundle(k: usize) -> Self {
        Self::global(k, -1, 1)
    }

    pub fn r1(k: usize) -> Self {
        Self::components(k, |_| 1)
    }

    /// `(b - a) - Σ s Z_s`.
    pub fn r2(k: usize) -> Self {
        AmbientDivClass {
            zcoef: (0..=k as i64).map(|s| -s).collect(),
            a: -1,
            b: 1,
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        AmbientDivClass {
            zcoef: self.zcoef.iter().map(|z| z * c).collect(),
            a: self.a * c,
            b: self.b * c,
        }
    }

    /// Representative with `Z_0` eliminated through `R1`.
    pub fn canonical(&self) -> Self {
        let z0 = self.zcoef[0];
        self - &Self::r1(self.k()).scale(z0)
    }

    /// Representative with `Z_0` and `Z_1` eliminated; unique modulo `R1`, `R2`.
    pub fn normal_form(&self) -> Self {
        let c = self.canonical();
        if c.k() == 0 {
            return c;
        }
        let z1 = c.zcoef[1];
        &c + &Self::r2(c.k()).scale(z1)
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        self.k() == other.k() && self.normal_form() == other.normal_form()
    }

    /// True when the class is a combination of `a` and `b` modulo relations.
    pub fn is_global(&self) -> bool {
        self.normal_form().zcoef.iter().all(|&z| z == 0)
    }
}

impl Add for &AmbientDivClass {
    type Output = AmbientDivClass;
    fn add(self, rhs: &AmbientDivClass) -> AmbientDivClass {
        assert_eq!(self.k(), rhs.k(), "component counts differ");
        AmbientDivClass {
            zcoef: self.zcoef.iter().zip(&rhs.zcoef).map(|(x, y)| x + y).collect(),
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl Sub for &AmbientDivClass {
    type Output = AmbientDivClass;
    fn sub(self, rhs: &AmbientDivClass) -> AmbientDivClass {
        self + &rhs.scale(-1)
    }
}

impl Neg for &AmbientDivClass {
    type Output = AmbientDivClass;
    fn neg(self) -> AmbientDivClass {
        self.scale(-1)
    }
}

impl fmt::Display for AmbientDivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .zcoef
            .iter()
            .enumerate()
            .filter(|(_, &z)| z != 0)
            .map(|(s, z)| format!("{z}·Z{s}"))
            .collect();
        if self.a != 0 {
            parts.push(format!("{}·a", self.a));
        }
        if self.b != 0 {
            parts.push(format!("{}·b", self.b));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// A class on the component `Z^o_s(k,N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentDivClass {
    pub k: usize,
    pub s: usize,
    pub dminus: i64,
    pub dplus: i64,
    pub a: i64,
    pub b: i64,
}

impl ComponentDivClass {
    /// Coefficients of absent boundary divisors are dropped.
    pub fn new(k: usize, s: usize, dminus: i64, dplus: i64, a: i64, b: i64) -> Result<Self, PicardError> {
        if s > k {
            return Err(PicardError::IndexOutOfRange { s, k });
        }
        Ok(ComponentDivClass {
            k,
            s,
            dminus: if s == 0 { 0 } else { dminus },
            dplus: if s == k { 0 } else { dplus },
            a,
            b,
        })
    }

    pub fn zero(k: usize, s: usize) -> Self {
        ComponentDivClass {
            k,
            s,
            dminus: 0,
            dplus: 0,
            a: 0,
            b: 0,
        }
    }

    /// `(b - a) - (D_{s,s+1} - D_{s,s-1})`, the generator of the component relation.
    pub fn relation(k: usize, s: usize) -> Self {
        Self::new(k, s, 1, -1, -1, 1).expect("s checked by caller")
    }

    fn compatible(&self, other: &Self) {
        assert_eq!(
            (self.k, self.s),
            (other.k, other.s),
            "classes live on different components"
        );
    }

    pub fn scale(&self, c: i64) -> Self {
        ComponentDivClass {
            dminus: self.dminus * c,
            dplus: self.dplus * c,
            a: self.a * c,
            b: self.b * c,
            ..*self
        }
    }

    /// Representative with no `b` term.
    pub fn canonical(&self) -> Self {
        self - &Self::relation(self.k, self.s).scale(self.b)
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        (self.k, self.s) == (other.k, other.s) && self.canonical() == other.canonical()
    }
}

impl Add for &ComponentDivClass {
    type Output = ComponentDivClass;
    fn add(self, rhs: &ComponentDivClass) -> ComponentDivClass {
        self.compatible(rhs);
        ComponentDivClass {
            dminus: self.dminus + rhs.dminus,
            dplus: self.dplus + rhs.dplus,
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            ..*self
        }
    }
}

impl Sub for &ComponentDivClass {
    type Output = ComponentDivClass;
    fn sub(self, rhs: &ComponentDivClass) -> ComponentDivClass {
        self + &rhs.scale(-1)
    }
}

impl fmt::Display for ComponentDivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.s as i64;
        let mut parts = Vec::new();
        if self.dminus != 0 {
            parts.push(format!("{}·D{},{}", self.dminus, s, s - 1));
        }
        if self.dplus != 0 {
            parts.push(format!("{}·D{},{}", self.dplus, s, s + 1));
        }
        if self.a != 0 {
            parts.push(format!("{}·a", self.a));
        }
        if self.b != 0 {
            parts.push(format!("{}·b", self.b));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Restriction to `Z^o_s`: neighbours become boundary divisors, `Z_s` itself
/// becomes `-(D_{s,s-1} + D_{s,s+1})`, distant components vanish.
pub fn restrict(c: &AmbientDivClass, s: usize) -> Result<ComponentDivClass, PicardError> {
    let k = c.k();
    if s > k {
        return Err(PicardError::IndexOutOfRange { s, k });
    }
    let zs = c.zcoef[s];
    let below = if s > 0 { c.zcoef[s - 1] } else { 0 };
    let above = if s < k { c.zcoef[s + 1] } else { 0 };
    Ok(ComponentDivClass::new(k, s, below - zs, above - zs, c.a, c.b)?.canonical())
}

/// First Chern classes of tautological determinants over the flag
/// `W_1 ⊂ V_1, V_2 ⊂ W_2 ⊂ C^N`, with `c1(C^N)` kept as a formal symbol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernClass {
    pub c: i64,
    pub w1: i64,
    pub v1: i64,
    pub v2: i64,
    pub w2: i64,
}

/// A bundle in the Chern lattice: rank and determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub rank: i64,
    pub c1: ChernClass,
}

impl ChernClass {
    pub const C: ChernClass = ChernClass {
        c: 1,
        w1: 0,
        v1: 0,
        v2: 0,
        w2: 0,
    };
    pub const W1: ChernClass = ChernClass {
        c: 0,
        w1: 1,
        v1: 0,
        v2: 0,
        w2: 0,
    };
    pub const V1: ChernClass = ChernClass {
        c: 0,
        w1: 0,
        v1: 1,
        v2: 0,
        w2: 0,
    };
    pub const V2: ChernClass = ChernClass {
        c: 0,
        w1: 0,
        v1: 0,
        v2: 1,
        w2: 0,
    };
    pub const W2: ChernClass = ChernClass {
        c: 0,
        w1: 0,
        v1: 0,
        v2: 0,
        w2: 1,
    };

    pub fn scale(self, m: i64) -> Self {
        ChernClass {
            c: self.c * m,
            w1: self.w1 * m,
            v1: self.v1 * m,
            v2: self.v2 * m,
            w2: self.w2 * m,
        }
    }

    /// Rewrites `x·C + y·V_1 + z·V_2` as `x·a + z·b`; only possible when
    /// `y = -x` and the `W` symbols are absent.
    pub fn to_ab(self) -> Option<(i64, i64)> {
        (self.w1 == 0 && self.w2 == 0 && self.v1 == -self.c).then_some((self.c, self.v2))
    }
}

impl Add for ChernClass {
    type Output = ChernClass;
    fn add(self, o: ChernClass) -> ChernClass {
        ChernClass {
            c: self.c + o.c,
            w1: self.w1 + o.w1,
            v1: self.v1 + o.v1,
            v2: self.v2 + o.v2,
            w2: self.w2 + o.w2,
        }
    }
}

impl Sub for ChernClass {
    type Output = ChernClass;
    fn sub(self, o: ChernClass) -> ChernClass {
        self + o.scale(-1)
    }
}

impl Neg for ChernClass {
    type Output = ChernClass;
    fn neg(self) -> ChernClass {
        self.scale(-1)
    }
}

impl Bundle {
    pub fn new(rank: i64, c1: ChernClass) -> Self {
        Bundle { rank, c1 }
    }

    /// `self / sub`.
    pub fn quotient(self, sub: Bundle) -> Bundle {
        Bundle {
            rank: self.rank - sub.rank,
            c1: self.c1 - sub.c1,
        }
    }

    /// `c1(Hom(self, target)) = rk(self)·c1(target) - rk(target)·c1(self)`.
    pub fn hom_c1(self, target: Bundle) -> ChernClass {
        target.c1.scale(self.rank) - self.c1.scale(target.rank)
    }
}

/// Canonical class of the Grassmannian bundle `G(r, E)` with tautological
/// sub `S` and quotient `Q`: `(rk Q)·c1(S) - r·c1(Q)`.
pub fn grassmannian_relative_canonical(sub: Bundle, ambient: Bundle) -> ChernClass {
    let q = ambient.quotient(sub);
    sub.c1.scale(q.rank) - q.c1.scale(sub.rank)
}

/// The seven lattice identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityName {
    KernelLedger,
    MainLedger,
    LRelation,
    SlPrime,
    InverseTwist,
    Dualizing,
    ComponentCanonical,
}

impl IdentityName {
    pub const ALL: [IdentityName; 7] = [
        IdentityName::KernelLedger,
        IdentityName::MainLedger,
        IdentityName::LRelation,
        IdentityName::SlPrime,
        IdentityName::InverseTwist,
        IdentityName::Dualizing,
        IdentityName::ComponentCanonical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityName::KernelLedger => "kernel_ledger",
            IdentityName::MainLedger => "main_ledger",
            IdentityName::LRelation => "L_relation",
            IdentityName::SlPrime => "sL_prime",
            IdentityName::InverseTwist => "inverse_twist",
            IdentityName::Dualizing => "dualizing",
            IdentityName::ComponentCanonical => "component_canonical",
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityName {
    type Err = PicardError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IdentityName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| PicardError::UnknownIdentity(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentResult {
    pub s: usize,
    pub ok: bool,
    pub lhs: ComponentDivClass,
    pub rhs: ComponentDivClass,
    /// Canonical form of `lhs - rhs`.
    pub residual: ComponentDivClass,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<SubCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub boundary_convention: String,
    pub results: Vec<ComponentResult>,
    pub all_ok: bool,
}

fn check_params(k: usize, n: usize) -> Result<(), PicardError> {
    if k == 0 || 2 * k > n {
        return Err(PicardError::InvalidParameters(format!(
            "need 1 ≤ k and 2k ≤ N, got k={k}, N={n}"
        )));
    }
    Ok(())
}

fn binom2(x: i64) -> i64 {
    x * (x - 1) / 2
}

/// `L̃ = Σ C(s+1,2) Z_s`.
pub fn l_tilde(k: usize) -> AmbientDivClass {
    AmbientDivClass::components(k, |s| binom2(s + 1))
}

/// `L̃' = Σ C(s,2) Z_s + (N-2k)(b - a)`.
pub fn l_tilde_prime(k: usize, n: usize) -> AmbientDivClass {
    let t = n as i64 - 2 * k as i64;
    &AmbientDivClass::components(k, binom2) + &AmbientDivClass::l_bundle(k).scale(t)
}

/// `ω = Σ s² Z_s + (N-2k)(b - a)`.
pub fn omega_ambient(k: usize, n: usize) -> AmbientDivClass {
    let t = n as i64 - 2 * k as i64;
    &AmbientDivClass::components(k, |s| s * s) + &AmbientDivClass::l_bundle(k).scale(t)
}

/// Twist carried by `Θ_s`: `det(C^N/V')^{-s} det(V_1)^s det(V_2/V')^s`,
/// with `V'` in the role of `W_1`.
pub fn theta_twist(s: i64) -> ChernClass {
    let c_mod_vp = ChernClass::C - ChernClass::W1;
    let v2_mod_vp = ChernClass::V2 - ChernClass::W1;
    c_mod_vp.scale(-s) + ChernClass::V1.scale(s) + v2_mod_vp.scale(s)
}

/// `ω_p + ω_W` for `Z''_s → W^{N-2k+2s}(k-s,N)`, together with the two
/// summands.
pub fn component_canonical_routes(k: usize, n: usize, s: usize) -> (ChernClass, ChernClass, ChernClass) {
    let (k, n, s) = (k as i64, n as i64, s as i64);
    let cn = Bundle::new(n, ChernClass::C);
    let w1 = Bundle::new(k - s, ChernClass::W1);
    let w2 = Bundle::new(n - k + s, ChernClass::W2);
    let v1 = Bundle::new(k, ChernClass::V1);
    let v2 = Bundle::new(n - k, ChernClass::V2);
    let fibre = w2.quotient(w1);
    let omega_p = grassmannian_relative_canonical(v1.quotient(w1), fibre)
        + grassmannian_relative_canonical(v2.quotient(w1), fibre);
    // W is the total space of Hom(C^N/W_2, W_1) over the flag W_1 ⊂ W_2.
    let tangent_flag = w1.hom_c1(fibre) + w1.hom_c1(cn.quotient(w2)) + fibre.hom_c1(cn.quotient(w2));
    let omega_w = -tangent_flag - cn.quotient(w2).hom_c1(w1);
    (omega_p + omega_w, omega_p, omega_w)
}

fn compare(s: usize, lhs: ComponentDivClass, rhs: ComponentDivClass, checks: Vec<SubCheck>) -> ComponentResult {
    let residual = (&lhs - &rhs).canonical();
    let ok = lhs.equivalent(&rhs) && checks.iter().all(|c| c.ok);
    ComponentResult {
        s,
        ok,
        lhs,
        rhs,
        residual,
        checks,
    }
}

fn identity_at(name: IdentityName, k: usize, n: usize, s: usize) -> Result<ComponentResult, PicardError> {
    let si = s as i64;
    let m = n as i64 - 2 * k as i64 + 2 * si;
    let comp = |dminus, dplus, a, b| ComponentDivClass::new(k, s, dminus, dplus, a, b);
    Ok(match name {
        IdentityName::KernelLedger => {
            let (a, b) = theta_twist(si)
                .to_ab()
                .ok_or_else(|| PicardError::Mismatch("Θ_s twist does not collapse to det classes".into()))?;
            let lhs = comp(0, 1, a, b)?;
            let rhs = comp(0, 1, -si, si)?;
            let mut checks = vec![SubCheck {
                name: "theta_twist_collapse".into(),
                ok: (a, b) == (-si, si),
            }];
            if s >= 1 {
                // On Z_{s-1} the restriction also reads as the Θ_s twist plus the lower divisor.
                let lower = ComponentDivClass::new(k, s - 1, 0, 1, -(si - 1), si - 1)?;
                let via_next = ComponentDivClass::new(k, s - 1, 1, 0, -si, si)?;
                checks.push(SubCheck {
                    name: "lower_neighbour_form".into(),
                    ok: lower.equivalent(&via_next),
                });
            }
            compare(s, lhs, rhs, checks)
        }
        IdentityName::MainLedger => compare(s, restrict(&l_tilde(k), s)?, comp(0, 1, -si, si)?, vec![]),
        IdentityName::LRelation => {
            let lhs = restrict(&AmbientDivClass::components(k, |t| t), s)?;
            compare(s, lhs, comp(0, 0, -1, 1)?, vec![])
        }
        IdentityName::SlPrime => {
            let lhs = restrict(&(&l_tilde(k) - &AmbientDivClass::l_bundle(k)), s)?;
            let rhs = restrict(&AmbientDivClass::components(k, binom2), s)?;
            compare(s, lhs, rhs, vec![])
        }
        IdentityName::InverseTwist => {
            let lhs = restrict(&(&omega_ambient(k, n) - &l_tilde(k)), s)?;
            let rhs = restrict(&l_tilde_prime(k, n), s)?;
            compare(s, lhs, rhs, vec![])
        }
        IdentityName::Dualizing => {
            let lhs = restrict(&omega_ambient(k, n), s)?;
            let rhs = comp(1, 1, -m, m)?;
            compare(s, lhs, rhs, vec![])
        }
        IdentityName::ComponentCanonical => {
            let (total, omega_p, omega_w) = component_canonical_routes(k, n, s);
            let stated_p = (ChernClass::V1 + ChernClass::V2 - ChernClass::C).scale(m)
                - (ChernClass::W1 + ChernClass::W2 - ChernClass::C).scale(m);
            let stated_w = (ChernClass::W1 + ChernClass::W2 - ChernClass::C).scale(m);
            let checks = vec![
                SubCheck {
                    name: "relative_canonical".into(),
                    ok: omega_p == stated_p,
                },
                SubCheck {
                    name: "base_canonical".into(),
                    ok: omega_w == stated_w,
                },
                SubCheck {
                    name: "total_in_det_classes".into(),
                    ok: total.to_ab().is_some(),
                },
            ];
            let (a, b) = total.to_ab().unwrap_or((0, 0));
            compare(s, comp(0, 0, a, b)?, comp(0, 0, -m, m)?, checks)
        }
    })
}

/// Checks an identity on every component of `Z^o(k,N)`.
pub fn verify_identity(name: IdentityName, k: usize, n: usize) -> Result<IdentityReport, PicardError> {
    check_params(k, n)?;
    let results = (0..=k)
        .map(|s| identity_at(name, k, n, s))
        .collect::<Result<Vec<_>, _>>()?;
    let all_ok = results.iter().all(|r| r.ok);
    Ok(IdentityReport {
        identity: name.as_str().to_string(),
        k,
        n,
        boundary_convention: BOUNDARY_CONVENTION.to_string(),
        results,
        all_ok,
    })
}

/// Every admissible `(k,N)` with `1 ≤ k`, `2k ≤ N ≤ max_n`, in `(N,k)` order.
pub fn admissible_pairs(max_n: usize) -> Vec<(usize, usize)> {
    (2..=max_n).flat_map(|n| (1..=n / 2).map(move |k| (k, n))).collect()
}

pub fn sweep(name: IdentityName, max_n: usize) -> Result<Vec<IdentityReport>, PicardError> {
    admissible_pairs(max_n)
        .into_par_iter()
        .map(|(k, n)| verify_identity(name, k, n))
        .collect()
}

/// `L̃ - L̃'` and how it compares with `(N-2k-1)(a+b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistDifference {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub difference: AmbientDivClass,
    pub is_global: bool,
    pub exponent: i64,
    /// Whether the difference equals `exponent·(a + b)` modulo relations.
    pub matches_a_plus_b: bool,
    /// Whether the difference equals `exponent·(a - b)` modulo relations.
    pub matches_a_minus_b: bool,
}

pub fn twist_difference(k: usize, n: usize) -> Result<TwistDifference, PicardError> {
    check_params(k, n)?;
    let diff = (&l_tilde(k) - &l_tilde_prime(k, n)).normal_form();
    let e = n as i64 - 2 * k as i64 - 1;
    Ok(TwistDifference {
        k,
        n,
        is_global: diff.is_global(),
        exponent: e,
        matches_a_plus_b: diff.equivalent(&AmbientDivClass::global(k, e, e)),
        matches_a_minus_b: diff.equivalent(&AmbientDivClass::global(k, e, -e)),
        difference: diff,
    })
}
