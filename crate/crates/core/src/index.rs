//! Hypocoercivity index of a semi-dissipative generator.
//!
//! The index is computed eight ways: four definiteness chains (`T_m > 0`) and
//! four Kalman-type rank conditions. In exact arithmetic all eight coincide, so
//! [`compute_index`] treats any disagreement as a tolerance failure and
//! reports it instead of voting.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    general_eigenvalues, hermitian_eigen, singular_values, spectral_norm, ComplexMatrix, SemiDissipativeSystem, C64,
    HERMITIAN_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IndexVariant {
    /// `sum B_A^j B_H (B_A^*)^j > 0`
    #[serde(rename = "T_anti")]
    TAnti,
    /// `sum B^j B_H (B^*)^j > 0`
    #[serde(rename = "T_forward")]
    TForward,
    /// `sum (B^*)^j B_H B^j > 0`
    #[serde(rename = "T_adjoint")]
    TAdjoint,
    /// `sum C_j^* C_j > 0`
    #[serde(rename = "T_commutator")]
    TCommutator,
    /// `rank [sqrt(B_H), B_A sqrt(B_H), ...] = n`
    #[serde(rename = "K_anti")]
    KAnti,
    /// `rank [sqrt(B_H), B sqrt(B_H), ...] = n`
    #[serde(rename = "K_forward")]
    KForward,
    /// `rank [sqrt(B_H), B^* sqrt(B_H), ...] = n`
    #[serde(rename = "K_adjoint")]
    KAdjoint,
    /// `rank [C_0, C_1, ...] = n`
    #[serde(rename = "K_commutator")]
    KCommutator,
}

impl IndexVariant {
    pub const ALL: [IndexVariant; 8] = [
        IndexVariant::TAnti,
        IndexVariant::TForward,
        IndexVariant::TAdjoint,
        IndexVariant::TCommutator,
        IndexVariant::KAnti,
        IndexVariant::KForward,
        IndexVariant::KAdjoint,
        IndexVariant::KCommutator,
    ];

    pub fn is_definiteness(self) -> bool {
        matches!(self, Self::TAnti | Self::TForward | Self::TAdjoint | Self::TCommutator)
    }

    pub fn is_rank(self) -> bool {
        !self.is_definiteness()
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::TAnti => "T_anti",
            Self::TForward => "T_forward",
            Self::TAdjoint => "T_adjoint",
            Self::TCommutator => "T_commutator",
            Self::KAnti => "K_anti",
            Self::KForward => "K_forward",
            Self::KAdjoint => "K_adjoint",
            Self::KCommutator => "K_commutator",
        }
    }
}

impl fmt::Display for IndexVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Hypocoercivity index; `Infinite` for non-hypocoercive generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcIndex {
    Finite(usize),
    Infinite,
}

impl HcIndex {
    pub fn finite(self) -> Option<usize> {
        match self {
            HcIndex::Finite(m) => Some(m),
            HcIndex::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, HcIndex::Finite(_))
    }
}

impl fmt::Display for HcIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HcIndex::Finite(m) => write!(f, "{m}"),
            HcIndex::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for HcIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HcIndex::Finite(m) => s.serialize_u64(*m as u64),
            HcIndex::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// Numerical thresholds shared by the index computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank and kernel decisions.
    pub rank: f64,
    /// Relative eigenvalue cutoff for semi-definiteness and definiteness.
    pub psd: f64,
    /// Relative (to `|B|_2`) threshold separating `Re(lambda) > 0` from the imaginary axis.
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank: 1e-10, psd: 1e-12, spectral: 1e-8 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub m_hc: HcIndex,
    pub per_variant: BTreeMap<IndexVariant, HcIndex>,
    /// `lambda_min` of the adjoint chain at `m_hc`; zero when the index is infinite.
    pub kappa: f64,
    /// Ranks of `[sqrt(B_H), ..., B_A^m sqrt(B_H)]` for `m = 0, 1, ...` until saturation.
    pub rank_trace: Vec<usize>,
    pub hypocoercive_spectral: bool,
    pub min_real_part: f64,
    pub spectrum: Vec<C64>,
    /// Some rank or definiteness decision fell within a factor 10 of its threshold.
    pub low_confidence: bool,
}

fn check_n(sys: &SemiDissipativeSystem, m_cap: Option<usize>) -> usize {
    let n = sys.dim();
    m_cap.unwrap_or(n - 1).min(n - 1)
}

/// `(C_0, ..., C_m)` with `C_0 = sqrt(B_H)` and `C_{j+1} = C_j B_A - B_A C_j`.
pub fn commutator_chain(sys: &SemiDissipativeSystem, m: usize, tol_psd: f64) -> Result<Vec<ComplexMatrix>> {
    let ba = sys.anti_hermitian();
    let mut chain = Vec::with_capacity(m + 1);
    chain.push(sys.sqrt_hermitian(tol_psd)?);
    for j in 0..m {
        let c = &chain[j];
        let next = &(c * ba) - &(ba * c);
        chain.push(next);
    }
    // Every C_j is Hermitian by induction; round-off grows like (2|B_A|)^j |C_0|.
    let step = 2.0 * spectral_norm(ba);
    let base = chain[0].max_abs();
    for (j, c) in chain.iter().enumerate() {
        let tol = HERMITIAN_TOL * (base * step.powi(j as i32)).max(c.max_abs()).max(f64::MIN_POSITIVE);
        let asymmetry = c.hermitian_defect();
        if asymmetry > tol {
            return Err(Error::NotHermitian { asymmetry, tol });
        }
    }
    Ok(chain)
}

/// The blocks `M_0 sqrt(B_H), ..., M_m sqrt(B_H)` (or `C_0, ..., C_m`) whose
/// column span the rank variants test.
pub fn kalman_blocks(
    sys: &SemiDissipativeSystem,
    variant: IndexVariant,
    m: usize,
    tol_psd: f64,
) -> Result<Vec<ComplexMatrix>> {
    let root = sys.sqrt_hermitian(tol_psd)?;
    let step = match variant {
        IndexVariant::KAnti => sys.anti_hermitian().clone(),
        IndexVariant::KForward => sys.matrix().clone(),
        IndexVariant::KAdjoint => sys.matrix().adjoint(),
        IndexVariant::KCommutator => return commutator_chain(sys, m, tol_psd),
        other => return Err(Error::WrongVariant(other)),
    };
    let mut blocks = Vec::with_capacity(m + 1);
    blocks.push(root);
    for j in 0..m {
        let next = &step * &blocks[j];
        blocks.push(next);
    }
    Ok(blocks)
}

/// Horizontal concatenation of [`kalman_blocks`].
pub fn kalman_matrix(sys: &SemiDissipativeSystem, variant: IndexVariant, m: usize, tol_psd: f64) -> Result<ComplexMatrix> {
    let blocks = kalman_blocks(sys, variant, m, tol_psd)?;
    let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
    ComplexMatrix::hconcat(&refs)
}

/// Individual summands `j = 0..=m` of a definiteness chain.
///
/// `B_H` enters as `sqrt(B_H)^2`, so eigenvalues inside the PSD tolerance
/// band are exactly zero, as in the rank variants.
fn chain_terms(sys: &SemiDissipativeSystem, variant: IndexVariant, m: usize, tol_psd: f64) -> Result<Vec<ComplexMatrix>> {
    let root = sys.sqrt_hermitian(tol_psd)?;
    let bh = &(&root * &root).hermitian_part();
    let mut terms = Vec::with_capacity(m + 1);
    match variant {
        IndexVariant::TAnti | IndexVariant::TForward => {
            let step = if variant == IndexVariant::TAnti { sys.anti_hermitian() } else { sys.matrix() };
            let mut power = ComplexMatrix::identity(sys.dim());
            for j in 0..=m {
                if j > 0 {
                    power = &power * step;
                }
                terms.push(&(&power * bh) * &power.adjoint());
            }
        }
        IndexVariant::TAdjoint => {
            let b = sys.matrix();
            let mut power = ComplexMatrix::identity(sys.dim());
            for j in 0..=m {
                if j > 0 {
                    power = &power * b;
                }
                terms.push(&(&power.adjoint() * bh) * &power);
            }
        }
        IndexVariant::TCommutator => {
            for c in commutator_chain(sys, m, tol_psd)? {
                terms.push(&c.adjoint() * &c);
            }
        }
        other => return Err(Error::WrongVariant(other)),
    }
    Ok(terms)
}

/// Hermitian accumulator `T_m` of the requested definiteness variant,
/// re-symmetrized as `(T + T^*)/2`.
pub fn t_chain(sys: &SemiDissipativeSystem, variant: IndexVariant, m: usize, tol_psd: f64) -> Result<ComplexMatrix> {
    let terms = chain_terms(sys, variant, m, tol_psd)?;
    let n = sys.dim();
    let sum = terms.iter().fold(ComplexMatrix::zeros(n, n), |acc, t| &acc + t);
    Ok(sum.hermitian_part())
}

fn near_threshold(ratio: f64, tol: f64) -> bool {
    ratio >= tol / 10.0 && ratio <= tol * 10.0
}

struct Scan {
    index: HcIndex,
    low_confidence: bool,
    ranks: Vec<usize>,
}

fn scan_definiteness(sys: &SemiDissipativeSystem, variant: IndexVariant, tol_psd: f64, m_cap: Option<usize>) -> Result<Scan> {
    if !variant.is_definiteness() {
        return Err(Error::WrongVariant(variant));
    }
    let cap = check_n(sys, m_cap);
    let terms = chain_terms(sys, variant, cap, tol_psd)?;
    let n = sys.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    let mut low = false;
    for (m, term) in terms.iter().enumerate() {
        acc = &acc + term;
        let eig = hermitian_eigen(&acc.hermitian_part())?;
        let (lo, hi) = (eig.min(), eig.max());
        if hi <= 0.0 {
            continue;
        }
        let ratio = lo / hi;
        low |= near_threshold(ratio, tol_psd);
        if ratio > tol_psd {
            return Ok(Scan { index: HcIndex::Finite(m), low_confidence: low, ranks: Vec::new() });
        }
    }
    Ok(Scan { index: HcIndex::Infinite, low_confidence: low, ranks: Vec::new() })
}

fn scan_rank(sys: &SemiDissipativeSystem, variant: IndexVariant, tol_rank: f64, tol_psd: f64, m_cap: Option<usize>) -> Result<Scan> {
    if !variant.is_rank() {
        return Err(Error::WrongVariant(variant));
    }
    let n = sys.dim();
    let cap = check_n(sys, m_cap);
    let blocks = kalman_blocks(sys, variant, cap, tol_psd)?;
    let mut ranks: Vec<usize> = Vec::new();
    let mut low = false;
    for m in 0..=cap {
        let refs: Vec<&ComplexMatrix> = blocks[..=m].iter().collect();
        let k = ComplexMatrix::hconcat(&refs)?;
        let sv = singular_values(&k);
        let smax = sv.first().copied().unwrap_or(0.0);
        let rank = if smax == 0.0 {
            0
        } else {
            low |= sv.iter().any(|&s| near_threshold(s / smax, tol_rank));
            sv.iter().filter(|&&s| s > tol_rank * smax).count()
        };
        let saturated = ranks.last() == Some(&rank);
        ranks.push(rank);
        if rank == n {
            return Ok(Scan { index: HcIndex::Finite(m), low_confidence: low, ranks });
        }
        // Krylov-type spans stop growing for good once they stall.
        if saturated {
            break;
        }
    }
    Ok(Scan { index: HcIndex::Infinite, low_confidence: low, ranks })
}

/// Smallest `m` with full-rank Kalman matrix for a rank variant.
pub fn kalman_rank_index(
    sys: &SemiDissipativeSystem,
    variant: IndexVariant,
    tol_rank: f64,
    tol_psd: f64,
    m_cap: Option<usize>,
) -> Result<HcIndex> {
    Ok(scan_rank(sys, variant, tol_rank, tol_psd, m_cap)?.index)
}

/// Smallest `m` with `lambda_min(T_m) > tol_psd * lambda_max(T_m)` for a
/// definiteness variant.
pub fn definiteness_index(
    sys: &SemiDissipativeSystem,
    variant: IndexVariant,
    tol_psd: f64,
    m_cap: Option<usize>,
) -> Result<HcIndex> {
    Ok(scan_definiteness(sys, variant, tol_psd, m_cap)?.index)
}

/// Runs all eight characterizations and cross-checks them against each other
/// and against the spectrum of `B`.
pub fn compute_index(sys: &SemiDissipativeSystem, tols: &Tolerances, m_cap: Option<usize>) -> Result<IndexReport> {
    sys.validate(tols.psd)?;

    let mut per_variant = BTreeMap::new();
    let mut low_confidence = false;
    let mut rank_trace = Vec::new();
    for variant in IndexVariant::ALL {
        let scan = if variant.is_definiteness() {
            scan_definiteness(sys, variant, tols.psd, m_cap)?
        } else {
            scan_rank(sys, variant, tols.rank, tols.psd, m_cap)?
        };
        low_confidence |= scan.low_confidence;
        if variant == IndexVariant::KAnti {
            rank_trace = scan.ranks;
        }
        per_variant.insert(variant, scan.index);
    }

    let m_hc = per_variant[&IndexVariant::TAnti];
    if per_variant.values().any(|&m| m != m_hc) {
        return Err(Error::InconsistentIndex { per_variant: per_variant.into_iter().collect() });
    }

    let kappa = match m_hc {
        HcIndex::Finite(m) => hermitian_eigen(&t_chain(sys, IndexVariant::TAdjoint, m, tols.psd)?)?.min(),
        HcIndex::Infinite => 0.0,
    };

    let spectrum = general_eigenvalues(sys.matrix())?;
    let min_real_part = spectrum.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let spectral_tol = tols.spectral * sys.norm();
    let hypocoercive_spectral = min_real_part > spectral_tol;
    if hypocoercive_spectral != m_hc.is_finite() {
        return Err(Error::BorderlineSpectrum { m_hc, min_real_part, tol: spectral_tol });
    }
    if m_hc.is_finite() && min_real_part <= 10.0 * spectral_tol {
        low_confidence = true;
    }

    Ok(IndexReport { m_hc, per_variant, kappa, rank_trace, hypocoercive_spectral, min_real_part, spectrum, low_confidence })
}

/// Both sides of the imaginary-axis criterion: an eigenvector of `B_A` lying
/// in `ker(B_H)` exists iff `B` has a purely imaginary eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BorderCriterion {
    pub kernel_eigenvector: bool,
    pub imaginary_eigenvalue: bool,
}

impl BorderCriterion {
    pub fn agrees(&self) -> bool {
        self.kernel_eigenvector == self.imaginary_eigenvalue
    }
}

pub fn verify_border_criterion(sys: &SemiDissipativeSystem, tols: &Tolerances) -> Result<BorderCriterion> {
    let scale = sys.norm().max(f64::MIN_POSITIVE);
    let tol = tols.spectral * scale;

    // i B_A is Hermitian; its eigenspaces are those of B_A.
    let iba = sys.anti_hermitian().scale(C64::new(0.0, 1.0));
    let eig = hermitian_eigen(&iba)?;
    let n = sys.dim();
    let mut kernel_eigenvector = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.eigenvalues[end] - eig.eigenvalues[end - 1] <= tol {
            end += 1;
        }
        let cols: Vec<Vec<C64>> = (start..end).map(|k| eig.eigenvectors.column(k)).collect();
        let basis = ComplexMatrix::from_columns(n, &cols);
        let projected = sys.hermitian() * &basis;
        let smallest = singular_values(&projected).last().copied().unwrap_or(0.0);
        if smallest <= tol {
            kernel_eigenvector = true;
            break;
        }
        start = end;
    }

    let imaginary_eigenvalue = general_eigenvalues(sys.matrix())?.iter().any(|z| z.re.abs() <= tol);
    Ok(BorderCriterion { kernel_eigenvector, imaginary_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::linalg::spectral_norm;

    fn sys(b: ComplexMatrix) -> SemiDissipativeSystem {
        SemiDissipativeSystem::new(b).unwrap()
    }

    #[test]
    fn base_case_is_hermitian_part() {
        let s = sys(builtin::envelope());
        for v in [IndexVariant::TAnti, IndexVariant::TForward, IndexVariant::TAdjoint, IndexVariant::TCommutator] {
            let t = t_chain(&s, v, 0, 1e-12).unwrap();
            assert!(spectral_norm(&(&t - s.hermitian())) < 1e-15, "{v}");
        }
    }

    #[test]
    fn adjoint_chain_entry_for_envelope() {
        // B e_2 = (-3/10, 0), so (B^* B_H B)_{22} = 9/100.
        let s = sys(builtin::envelope());
        let t = t_chain(&s, IndexVariant::TAdjoint, 1, 1e-12).unwrap();
        assert!((t[(1, 1)].re - 0.09).abs() < 1e-15);
    }

    #[test]
    fn zero_anti_hermitian_part_keeps_base_term() {
        let s = sys(ComplexMatrix::from_diag(&[2.0, 0.0, 1.0]));
        for m in 0..3 {
            let t = t_chain(&s, IndexVariant::TAnti, m, 1e-12).unwrap();
            assert!(spectral_norm(&(&t - s.hermitian())) < 1e-14);
        }
    }

    #[test]
    fn t_chain_rejects_rank_variant() {
        let s = sys(ComplexMatrix::identity(2));
        assert!(matches!(t_chain(&s, IndexVariant::KAnti, 1, 1e-12), Err(Error::WrongVariant(_))));
        assert!(matches!(
            kalman_rank_index(&s, IndexVariant::TAnti, 1e-10, 1e-12, None),
            Err(Error::WrongVariant(_))
        ));
    }

    #[test]
    fn first_commutators_match_displayed_matrices() {
        let c1 = &commutator_chain(&sys(builtin::b1()), 1, 1e-12).unwrap()[1];
        let want1 = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, -1.0],
            &[0.0, 0.0, -1.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(spectral_norm(&(c1 - &want1)) < 1e-14);

        let c1 = &commutator_chain(&sys(builtin::b2()), 1, 1e-12).unwrap()[1];
        let mut want2 = ComplexMatrix::zeros(4, 4);
        want2[(1, 2)] = C64::new(-1.0, 0.0);
        want2[(2, 1)] = C64::new(-1.0, 0.0);
        assert!(spectral_norm(&(c1 - &want2)) < 1e-14);
    }

    #[test]
    fn commutators_vanish_without_anti_hermitian_part() {
        let chain = commutator_chain(&sys(ComplexMatrix::from_diag(&[1.0, 0.0, 3.0])), 3, 1e-12).unwrap();
        assert!(chain[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn kalman_examples() {
        let tol = Tolerances::default();
        for variant in [IndexVariant::KAnti, IndexVariant::KForward, IndexVariant::KAdjoint, IndexVariant::KCommutator] {
            assert_eq!(kalman_rank_index(&sys(builtin::b1()), variant, tol.rank, tol.psd, None).unwrap(), HcIndex::Finite(1));
            assert_eq!(kalman_rank_index(&sys(builtin::b2()), variant, tol.rank, tol.psd, None).unwrap(), HcIndex::Finite(2));
            assert_eq!(
                kalman_rank_index(&sys(ComplexMatrix::from_diag(&[1.0, 2.0])), variant, tol.rank, tol.psd, None).unwrap(),
                HcIndex::Finite(0)
            );
        }
        let k = kalman_matrix(&sys(builtin::b1()), IndexVariant::KAnti, 1, 1e-12).unwrap();
        assert_eq!(crate::linalg::rank_with_tolerance(&k, 1e-10), 4);
    }

    #[test]
    fn definiteness_examples() {
        for variant in [IndexVariant::TAnti, IndexVariant::TForward, IndexVariant::TAdjoint, IndexVariant::TCommutator] {
            assert_eq!(definiteness_index(&sys(builtin::e_k(4)), variant, 1e-12, None).unwrap(), HcIndex::Finite(3));
            assert_eq!(definiteness_index(&sys(ComplexMatrix::identity(3)), variant, 1e-12, None).unwrap(), HcIndex::Finite(0));
            let rot = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
            assert_eq!(definiteness_index(&sys(rot), variant, 1e-12, None).unwrap(), HcIndex::Infinite);
        }
    }

    #[test]
    fn report_for_ek_family() {
        for k in 2..=6 {
            let r = compute_index(&sys(builtin::e_k(k)), &Tolerances::default(), None).unwrap();
            assert_eq!(r.m_hc, HcIndex::Finite(k - 1));
            assert!(r.kappa > 0.0);
            assert!(r.hypocoercive_spectral);
            assert_eq!(r.rank_trace, (1..=k).collect::<Vec<_>>());
        }
    }

    #[test]
    fn report_for_anti_hermitian_is_infinite() {
        let rot = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[-2.0, 0.0]]).unwrap();
        let r = compute_index(&sys(rot), &Tolerances::default(), None).unwrap();
        assert_eq!(r.m_hc, HcIndex::Infinite);
        assert_eq!(r.kappa, 0.0);
        assert!(!r.hypocoercive_spectral);
        assert_eq!(r.rank_trace, vec![0, 0]);
    }

    #[test]
    fn rejects_non_semi_dissipative() {
        let r = compute_index(&sys(ComplexMatrix::from_diag(&[1.0, -1.0])), &Tolerances::default(), None);
        assert!(matches!(r, Err(Error::NotSemiDissipative { .. })));
    }

    #[test]
    fn loose_rank_tolerance_is_reported_as_disagreement() {
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[-0.5, 1e-6]]).unwrap();
        let tight = compute_index(&sys(b.clone()), &Tolerances::default(), None).unwrap();
        assert_eq!(tight.m_hc, HcIndex::Finite(0));
        let loose = Tolerances { rank: 1e-1, ..Tolerances::default() };
        assert!(matches!(compute_index(&sys(b), &loose, None), Err(Error::InconsistentIndex { .. })));
    }

    #[test]
    fn border_criterion_examples() {
        let tol = Tolerances::default();
        let ek = verify_border_criterion(&sys(builtin::e_k(4)), &tol).unwrap();
        assert_eq!(ek, BorderCriterion { kernel_eigenvector: false, imaginary_eigenvalue: false });

        let rot = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let r = verify_border_criterion(&sys(rot), &tol).unwrap();
        assert_eq!(r, BorderCriterion { kernel_eigenvector: true, imaginary_eigenvalue: true });

        let mut d = ComplexMatrix::from_diag(&[1.0, 0.0]);
        d[(1, 1)] = C64::new(0.0, 1.0);
        let r = verify_border_criterion(&sys(d), &tol).unwrap();
        assert!(r.kernel_eigenvector && r.imaginary_eigenvalue && r.agrees());
    }
}
