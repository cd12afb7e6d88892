//! Exact computation over finite discrete distributions: convolutions,
//! sums of independent families, i.i.d. powers, tail probabilities,
//! moments, and medians. This is the brute-force oracle every inequality
//! checker trusts; it never approximates and errors hard on overflow.

use serde::{Deserialize, Serialize};

use crate::dist::{regular_cover, ComponentFamily, FiniteDistribution, NormKind, Vector};
use crate::error::{Error, Result};

/// Hard cap on the product support size of a single convolution.
pub const SUPPORT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "INDEPENDENT_FAMILY")]
    IndependentFamily,
    #[serde(rename = "IID_POWER")]
    IidPower(u32),
    #[serde(rename = "RAW")]
    Raw,
}

/// Law of a sum of independent variables, tagged with how it was built.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SumLaw {
    pub law: FiniteDistribution,
    pub provenance: Provenance,
}

impl SumLaw {
    pub fn raw(law: FiniteDistribution) -> Self {
        SumLaw { law, provenance: Provenance::Raw }
    }
}

/// Law of A + B for independent A ~ a, B ~ b; atoms merged by exact
/// coordinate equality.
pub fn convolve(a: &FiniteDistribution, b: &FiniteDistribution) -> Result<FiniteDistribution> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(format!(
            "convolve dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let product = a.support_size() * b.support_size();
    if product > SUPPORT_CAP {
        return Err(Error::SupportOverflow(product, SUPPORT_CAP));
    }
    let mut atoms = Vec::with_capacity(product);
    for (va, pa) in a.atoms() {
        for (vb, pb) in b.atoms() {
            atoms.push((va.add(vb), pa * pb));
        }
    }
    FiniteDistribution::new(atoms)
}

/// Left-fold of `convolve` over the family components.
pub fn sum_family(fam: &ComponentFamily) -> Result<SumLaw> {
    let dists = fam.as_finite()?;
    let mut law = dists[0].clone();
    for d in &dists[1..] {
        law = convolve(&law, d)?;
    }
    Ok(SumLaw { law, provenance: Provenance::IndependentFamily })
}

/// n-fold self-convolution by binary exponentiation.
///
/// The linear fold is retained as `iid_sum_fold`; the test suite checks
/// both routes agree (same atom sets, probabilities to 1e-12 relative).
pub fn iid_sum(d: &FiniteDistribution, n: u32) -> Result<SumLaw> {
    assert!(n >= 1, "iid_sum needs n >= 1");
    let mut acc: Option<FiniteDistribution> = None;
    let mut base = d.clone();
    let mut k = n;
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => convolve(&a, &base)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = convolve(&base, &base)?;
    }
    Ok(SumLaw {
        law: acc.expect("n >= 1"),
        provenance: Provenance::IidPower(n),
    })
}

/// Reference linear fold for `iid_sum`.
pub fn iid_sum_fold(d: &FiniteDistribution, n: u32) -> Result<SumLaw> {
    assert!(n >= 1);
    let mut law = d.clone();
    for _ in 1..n {
        law = convolve(&law, d)?;
    }
    Ok(SumLaw { law, provenance: Provenance::IidPower(n) })
}

/// Law of the i.i.d. regular-cover sum S~_n for a family of size n.
pub fn cover_iid_sum(fam: &ComponentFamily) -> Result<SumLaw> {
    let cover = regular_cover(fam)?;
    iid_sum(&cover, fam.n() as u32)
}

/// Exact P(||X|| >= lambda) under the >= convention.
pub fn tail(law: &FiniteDistribution, lambda: f64, k: NormKind) -> f64 {
    law.atoms()
        .iter()
        .filter(|(v, _)| k.apply(v) >= lambda)
        .map(|(_, p)| p)
        .sum()
}

/// Exact E[||X||^2].
pub fn moment2(law: &FiniteDistribution, k: NormKind) -> f64 {
    law.atoms()
        .iter()
        .map(|(v, p)| {
            let x = k.apply(v);
            p * x * x
        })
        .sum()
}

/// Exact E[||X||^p] for real p >= 1.
pub fn moment_p(law: &FiniteDistribution, p: f64, k: NormKind) -> f64 {
    law.atoms()
        .iter()
        .map(|(v, pr)| pr * k.apply(v).powf(p))
        .sum()
}

/// The L_p norm ||X||_p = (E[||X||^p])^{1/p}.
pub fn lp_norm(law: &FiniteDistribution, p: f64, k: NormKind) -> f64 {
    moment_p(law, p, k).powf(1.0 / p)
}

pub fn mean(law: &FiniteDistribution) -> Vector {
    law.mean()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MedianConvention {
    #[serde(rename = "LOWER_MEDIAN")]
    LowerMedian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MedianResult {
    pub value: f64,
    pub convention: MedianConvention,
}

/// Lower median of ||X||: the smallest atom norm m with P(||X|| <= m) >= 1/2.
pub fn median_norm(law: &FiniteDistribution, k: NormKind) -> MedianResult {
    let mut norms: Vec<(f64, f64)> = law
        .atoms()
        .iter()
        .map(|(v, p)| (k.apply(v), *p))
        .collect();
    norms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    for (x, p) in &norms {
        acc += p;
        if acc >= 0.5 {
            return MedianResult { value: *x, convention: MedianConvention::LowerMedian };
        }
    }
    MedianResult {
        value: norms.last().map(|(x, _)| *x).unwrap_or(0.0),
        convention: MedianConvention::LowerMedian,
    }
}
