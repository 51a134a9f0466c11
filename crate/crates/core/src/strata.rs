//! Dimension bookkeeping for the components `Z_s(k,N)`, their resolutions
//! and the loci removed to form `Z^o_s(k,N)`.
//!
//! Each locus is described by a tower: the conormal bundle of a two-step flag
//! `W_1 ⊂ W_2 ⊂ C^N` (where `X C^N ⊂ W_1` and `X W_2 = 0`) followed by
//! Grassmannian fibrations for the remaining subspaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("malformed tower: {0}")]
    MalformedTower(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

/// A flag-fibration description of a variety.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    /// `dim W_1`.
    pub w1_dim: i64,
    /// `codim W_2`.
    pub w2_codim: i64,
    /// Fibre Grassmannians `G(p, q)`.
    pub fibres: Vec<(i64, i64)>,
}

impl TowerSpec {
    pub fn validate(&self, n: i64) -> Result<(), StrataError> {
        if self.w1_dim < 0 || self.w2_codim < 0 || self.w1_dim + self.w2_codim > n {
            return Err(StrataError::MalformedTower(format!(
                "W_1 of dim {} and W_2 of codim {} do not nest in C^{n}",
                self.w1_dim, self.w2_codim
            )));
        }
        for &(p, q) in &self.fibres {
            if p < 0 || p > q {
                return Err(StrataError::MalformedTower(format!("G({p},{q}) is empty")));
            }
        }
        Ok(())
    }
}

/// `dim G(a,N) + dim G(N-b,N)` for the conormal base plus `Σ p(q-p)` over fibres.
pub fn dim_tower(t: &TowerSpec, n: usize) -> Result<i64, StrataError> {
    let n = n as i64;
    t.validate(n)?;
    let base = t.w1_dim * (n - t.w1_dim) + t.w2_codim * (n - t.w2_codim);
    Ok(base + t.fibres.iter().map(|&(p, q)| p * (q - p)).sum::<i64>())
}

/// `dim W^r(k,N) = k(N-k) + (k+r)(N-k-r)`.
pub fn dim_w(k: usize, r: usize, n: usize) -> Result<usize, StrataError> {
    if k + r > n {
        return Err(StrataError::InvalidParameters(format!(
            "k + r = {} exceeds N = {n}",
            k + r
        )));
    }
    Ok(k * (n - k) + (k + r) * (n - k - r))
}

/// `dim Y(k,N) = 2k(N-k)`, also the dimension of every `Z_s(k,N)`.
pub fn dim_y(k: usize, n: usize) -> i64 {
    2 * (k as i64) * (n as i64 - k as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Piece {
    /// The resolution `Z''_s`.
    Resolution,
    /// `dim V_1 ∩ V_2 ≥ k-s+2` inside `Z'_s`.
    Piece1,
    /// `dim V_1 ∩ V_2 ≥ k-s+1` and `dim ker X ≥ N-k+s+1` inside `Z'_s`.
    Piece2,
    /// `dim ker X ≥ N-k+s+2` inside `Z'_s`.
    Piece3,
    /// The second piece inside `Z_s` itself.
    Replacement,
}

impl Piece {
    pub const ALL: [Piece; 5] = [
        Piece::Resolution,
        Piece::Piece1,
        Piece::Piece2,
        Piece::Piece3,
        Piece::Replacement,
    ];

    /// Whether the locus is nonempty.
    pub fn applies(self, k: i64, s: i64) -> bool {
        match self {
            Piece::Resolution => true,
            Piece::Piece1 => s >= 2,
            Piece::Piece2 | Piece::Replacement => s >= 1 && s < k,
            Piece::Piece3 => s + 2 <= k,
        }
    }

    /// The claimed codimension.
    pub fn stated_codim(self, k: i64, n: i64, s: i64) -> i64 {
        match self {
            Piece::Resolution => 0,
            Piece::Piece1 | Piece::Piece3 => 4,
            Piece::Piece2 => 2,
            Piece::Replacement => 2 * (n - 2 * k + 2 * s),
        }
    }

    /// Lower bound needed by the extension argument: two inside `Z'_s`, four inside `Z_s`.
    pub fn required_bound(self) -> i64 {
        match self {
            Piece::Resolution => 0,
            Piece::Piece2 => 2,
            Piece::Piece1 | Piece::Piece3 | Piece::Replacement => 4,
        }
    }

    /// Dimension as written out term by term, where an explicit sum is given.
    pub fn transcribed_dim(self, k: i64, n: i64, s: i64) -> i64 {
        match self {
            Piece::Resolution => 2 * (k - s) * (n - k + s) + 2 * s * (n - 2 * k + s),
            Piece::Piece1 => {
                2 * (s - 2) * (n - 2 * k + s - 2)
                    + 2 * (n - 2 * k + 2 * s - 4)
                    + (k - s + 2) * (n - k + s - 2)
                    + (n - k + s) * (k - s)
            }
            _ => 2 * k * (n - k) - self.stated_codim(k, n, s),
        }
    }

    pub fn tower(self, k: i64, n: i64, s: i64) -> TowerSpec {
        let e = n - 2 * k;
        match self {
            Piece::Resolution => {
                let m = e + 2 * s;
                TowerSpec {
                    w1_dim: k - s,
                    w2_codim: k - s,
                    fibres: vec![(s, m), (e + s, m)],
                }
            }
            // W_1 ⊂ W_1' (step 2) ⊂ V_1, V_2 ⊂ W_2.
            Piece::Piece1 => {
                let m = e + 2 * s - 2;
                TowerSpec {
                    w1_dim: k - s,
                    w2_codim: k - s + 2,
                    fibres: vec![(2, m), (s - 2, m - 2), (e + s - 2, m - 2)],
                }
            }
            // W_1 ⊂ W_1' (step 1) ⊂ V_1, V_2 ⊂ V_1 + V_2 ⊂ W_2.
            Piece::Piece2 => {
                let m = e + 2 * s + 1;
                TowerSpec {
                    w1_dim: k - s,
                    w2_codim: k - s - 1,
                    fibres: vec![
                        (1, m),
                        (e + 2 * s - 2, m - 1),
                        (s - 1, e + 2 * s - 2),
                        (e + s - 1, e + 2 * s - 2),
                    ],
                }
            }
            Piece::Piece3 => {
                let m = e + 2 * s + 2;
                TowerSpec {
                    w1_dim: k - s,
                    w2_codim: k - s - 2,
                    fibres: vec![(s, m), (e + s, m)],
                }
            }
            Piece::Replacement => {
                let m = e + 2 * s;
                TowerSpec {
                    w1_dim: k - s + 1,
                    w2_codim: k - s - 1,
                    fibres: vec![(s - 1, m), (e + s - 1, m)],
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceResult {
    pub s: usize,
    pub piece: Piece,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerSpec>,
    pub stated_codim: Option<i64>,
    pub computed_codim: Option<i64>,
    pub transcribed_dim: Option<i64>,
    pub tower_dim: Option<i64>,
    /// Tower codimension equals the stated one.
    pub exact_ok: Option<bool>,
    /// Tower codimension meets the bound the extension argument needs.
    pub bound_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimReport {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub results: Vec<PieceResult>,
    /// Every non-skipped stated codimension reproduced exactly.
    pub all_ok: bool,
    /// Every non-skipped locus meets its required bound.
    pub bounds_ok: bool,
}

fn piece_result(piece: Piece, k: usize, n: usize, s: usize) -> Result<PieceResult, StrataError> {
    let (ki, ni, si) = (k as i64, n as i64, s as i64);
    if !piece.applies(ki, si) {
        return Ok(PieceResult {
            s,
            piece,
            status: CheckStatus::Skipped,
            tower: None,
            stated_codim: None,
            computed_codim: None,
            transcribed_dim: None,
            tower_dim: None,
            exact_ok: None,
            bound_ok: None,
        });
    }
    let tower = piece.tower(ki, ni, si);
    let tower_dim = dim_tower(&tower, n)?;
    let total = dim_y(k, n);
    let stated = piece.stated_codim(ki, ni, si);
    let transcribed = piece.transcribed_dim(ki, ni, si);
    let computed = total - tower_dim;
    let exact_ok = computed == stated && transcribed == total - stated;
    let bound_ok = computed >= piece.required_bound();
    Ok(PieceResult {
        s,
        piece,
        status: if exact_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        tower: Some(tower),
        stated_codim: Some(stated),
        computed_codim: Some(computed),
        transcribed_dim: Some(transcribed),
        tower_dim: Some(tower_dim),
        exact_ok: Some(exact_ok),
        bound_ok: Some(bound_ok),
    })
}

/// Evaluates every tower for every component of `Z(k,N)`.
pub fn verify_codim_report(k: usize, n: usize) -> Result<CodimReport, StrataError> {
    if k == 0 || 2 * k > n {
        return Err(StrataError::InvalidParameters(format!(
            "need 1 ≤ k and 2k ≤ N, got k={k}, N={n}"
        )));
    }
    let mut results = Vec::new();
    for s in 0..=k {
        for piece in Piece::ALL {
            results.push(piece_result(piece, k, n, s)?);
        }
    }
    let active = || results.iter().filter(|r| r.status != CheckStatus::Skipped);
    let all_ok = active().all(|r| r.exact_ok == Some(true));
    let bounds_ok = active().all(|r| r.bound_ok == Some(true));
    Ok(CodimReport {
        k,
        n,
        results,
        all_ok,
        bounds_ok,
    })
}

/// Reports for every `1 ≤ k`, `2k ≤ N ≤ max_n`.
pub fn sweep(max_n: usize) -> Result<Vec<CodimReport>, StrataError> {
    let pairs: Vec<(usize, usize)> = (2..=max_n).flat_map(|n| (1..=n / 2).map(move |k| (k, n))).collect();
    pairs.into_par_iter().map(|(k, n)| verify_codim_report(k, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_has_full_dimension() {
        for n in 2..=12usize {
            for k in 1..=n / 2 {
                for s in 0..=k {
                    let t = Piece::Resolution.tower(k as i64, n as i64, s as i64);
                    assert_eq!(dim_tower(&t, n).unwrap(), dim_y(k, n));
                }
            }
        }
    }

    #[test]
    fn dim_w_examples() {
        assert_eq!(dim_w(2, 0, 5).unwrap(), 12);
        assert_eq!(dim_w(2, 1, 5).unwrap(), 2 * 3 + 3 * 2);
        assert_eq!(dim_w(1, 1, 3).unwrap(), 4);
        assert!(dim_w(3, 3, 5).is_err());
    }

    #[test]
    fn piece1_at_24() {
        let r = piece_result(Piece::Piece1, 2, 4, 2).unwrap();
        assert_eq!(r.computed_codim, Some(4));
        assert_eq!(r.status, CheckStatus::Pass);
    }

    #[test]
    fn piece2_in_resolution_of_z1_24() {
        // {V_1 = V_2, W_1 ⊂ V, X = 0} has dimension 5.
        let r = piece_result(Piece::Piece2, 2, 4, 1).unwrap();
        assert_eq!(r.tower_dim, Some(5));
        assert_eq!(r.computed_codim, Some(3));
        assert_eq!(r.bound_ok, Some(true));
    }

    #[test]
    fn replacement_at_25_is_a_flag_variety() {
        // V_1 ⊂ V_2 with X = 0: the flag variety F(2,3;5) of dimension 8.
        let r = piece_result(Piece::Replacement, 2, 5, 1).unwrap();
        assert_eq!(r.tower_dim, Some(8));
        assert_eq!(r.stated_codim, Some(6));
    }

    #[test]
    fn k1_skips_interior_pieces() {
        let rep = verify_codim_report(1, 2).unwrap();
        assert!(rep
            .results
            .iter()
            .filter(|r| r.piece != Piece::Resolution)
            .all(|r| r.status == CheckStatus::Skipped));
        assert!(rep.all_ok);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(verify_codim_report(3, 5).is_err());
        assert!(verify_codim_report(0, 5).is_err());
        let bad = TowerSpec {
            w1_dim: 3,
            w2_codim: 3,
            fibres: vec![],
        };
        assert!(dim_tower(&bad, 5).is_err());
    }
}
