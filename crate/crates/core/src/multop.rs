//! Multiplication matrices J_a on a single arc: a(x, y) P(x, y) = P(x, y) J_a.
//!
//! With a = b₂(σ) + y b₁(σ), where b₂ = Σ a_{n2} P⁻_n and b₁ = Σ a_{n1} P⁺_{n−1}:
//!
//!   M₂₂ = b₂(J⁻),  M₂₁ = b₂(J⁺),  M₁₂ = R b₁(J⁻),  M₁₁ = (1 − h)² L b₁(J⁺),
//!
//! where R converts P⁻ to P⁺ and L is the weighted conversion
//! w⁺P⁺ = w⁻P⁻L. The polynomial-of-a-matrix evaluations use Clenshaw's
//! algorithm on a padded dense section that is cropped afterwards, so the
//! retained entries are exact.

use crate::arcpoly::ArcBasis;
use crate::banded::BandedOperator;
use crate::error::Result;
use crate::semijacobi::{self, RecurrenceCoeffs, WeightTag};
use nalgebra::DMatrix;

/// The four blocks of a multiplication operator, each k×k.
#[derive(Clone, Debug)]
pub struct MultBlocks {
    pub m11: DMatrix<f64>,
    pub m12: DMatrix<f64>,
    pub m21: DMatrix<f64>,
    pub m22: DMatrix<f64>,
    pub alpha1: usize,
    pub alpha2: usize,
}

impl MultBlocks {
    /// Half-bandwidth α = 2 max{α₁, α₂} + 1[α₁ ≥ α₂] of the interlaced J_a.
    pub fn bandwidth(&self) -> usize {
        2 * self.alpha1.max(self.alpha2) + usize::from(self.alpha1 >= self.alpha2)
    }
}

/// (α₁, α₂) read off the length L of an interlaced coefficient vector:
/// α₂ is the top p-degree and α₁ the top q-degree that fit in L slots.
pub fn alphas(len: usize) -> (usize, usize) {
    if len == 0 {
        return (0, 0);
    }
    let last = len - 1;
    let alpha2 = last / 2;
    let last_odd = if last % 2 == 1 { last } else { last.saturating_sub(1) };
    let alpha1 = if last == 0 { 0 } else { last_odd.div_ceil(2) };
    (alpha1, alpha2)
}

/// Σ f_k P_k(J) for the family with recurrence `rc`, J a K×K tridiagonal section.
pub fn clenshaw_matrix(rc: &RecurrenceCoeffs, f: &[f64], j: &BandedOperator) -> DMatrix<f64> {
    let k = j.rows;
    let n = f.len();
    let jd = j.to_dense();
    let mut u1 = DMatrix::<f64>::zeros(k, k);
    let mut u2 = DMatrix::<f64>::zeros(k, k);
    for idx in (0..n).rev() {
        // u = f_k I + (J − a_k I) u1 / b_k − (c_{k+1}/b_{k+1}) u2
        let mut u = &jd * &u1;
        u -= &u1 * rc.a[idx];
        u /= rc.b[idx];
        if idx + 2 <= n {
            u -= &u2 * (rc.c[idx + 1] / rc.b[idx + 1]);
        }
        for d in 0..k {
            u[(d, d)] += f[idx];
        }
        u2 = u1;
        u1 = u;
    }
    u1
}

/// Blocks of J_a for the arc `arc` (b ∈ {−1, 0}) and the interlaced
/// expansion `a`, cropped to k×k.
pub fn mult_blocks(arc: &ArcBasis, a: &[f64], k: usize) -> Result<MultBlocks> {
    let (alpha1, alpha2) = alphas(a.len());
    let f2: Vec<f64> = a.iter().step_by(2).copied().collect();
    let f1: Vec<f64> = a.iter().skip(1).step_by(2).copied().collect();
    let big = k + alpha1.max(alpha2) + 4;
    let pm = arc.params_p();
    let pp = arc.params_q();
    let fam_m = arc.fam_p(big + f2.len() + 2)?;
    let fam_p = arc.fam_q(big + f1.len() + 2)?;
    let jm = fam_m.rc.jacobi_matrix(big);
    let jp = fam_p.rc.jacobi_matrix(big);
    let crop = |m: &DMatrix<f64>| m.view((0, 0), (k, k)).into_owned();

    let m22 = clenshaw_matrix(&fam_m.rc, &f2, &jm);
    let m21 = clenshaw_matrix(&fam_m.rc, &f2, &jp);
    let (m12, m11) = if f1.is_empty() {
        (DMatrix::zeros(big, big), DMatrix::zeros(big, big))
    } else {
        let b1m = clenshaw_matrix(&fam_p.rc, &f1, &jm);
        let b1p = clenshaw_matrix(&fam_p.rc, &f1, &jp);
        let r = semijacobi::connection_matrix(&pm, &pp, big)?.to_dense();
        let l = semijacobi::weighted_connection(&pp, &pm, big, &[WeightTag::A, WeightTag::C])?.to_dense();
        let omh = arc.one_minus_h();
        (r * b1m, l * b1p * (omh * omh))
    };
    Ok(MultBlocks { m11: crop(&m11), m12: crop(&m12), m21: crop(&m21), m22: crop(&m22), alpha1, alpha2 })
}

/// Interlace the blocks into the n×n banded J_a.
pub fn build_ja(blocks: &MultBlocks, n: usize) -> BandedOperator {
    let w = blocks.bandwidth() as isize;
    let mut ja = BandedOperator::zeros(n, n, w, w);
    let k = blocks.m22.nrows();
    for col in 0..n {
        let j = col / 2;
        for row in ja.col_range(col) {
            let i = row / 2;
            if i >= k || j >= k {
                continue;
            }
            let v = match (row % 2, col % 2) {
                (0, 0) => blocks.m22[(i, j)],
                (1, 0) => blocks.m12[(i, j)],
                (0, 1) => blocks.m11[(i, j)],
                _ => blocks.m21[(i, j)],
            };
            ja.set(row, col, v);
        }
    }
    ja
}

/// n×n multiplication matrix for the interlaced expansion `a` on `arc`.
pub fn multiplication_matrix(arc: &ArcBasis, a: &[f64], n: usize) -> Result<BandedOperator> {
    let blocks = mult_blocks(arc, a, n / 2 + 2)?;
    Ok(build_ja(&blocks, n))
}
