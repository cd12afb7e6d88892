//! Normed vectors, finite discrete distributions, continuous samplable
//! primitives, and the distribution algebra (mixture / regular cover,
//! symmetrization, truncation, affine maps, test functions).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{CheckMode, CheckReport, DetailRow};
use crate::riemann::IntegrandSpec;

/// Mass-conservation and exact-comparison tolerance for the discrete algebra.
pub const MASS_TOL: f64 = 1e-9;

/// A point in R^d standing in for an element of the Banach space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidVector("dimension 0".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidVector("non-finite coordinate".into()));
        }
        Ok(Vector { coords })
    }

    pub fn scalar(x: f64) -> Self {
        Vector { coords: vec![x] }
    }

    pub fn zero(dim: usize) -> Self {
        Vector { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|a| s * a).collect(),
        }
    }

    pub fn neg(&self) -> Vector {
        self.scale(-1.0)
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Bitwise identity key; atom merging uses exact coordinate equality.
    pub fn bits_key(&self) -> Vec<u64> {
        // normalize -0.0 to 0.0 so x and -x of a zero coordinate merge
        self.coords
            .iter()
            .map(|c| (c + 0.0).to_bits())
            .collect()
    }
}

/// Selected norm standing in for the Banach norm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L1,
    #[default]
    L2,
    #[serde(rename = "LINF")]
    Linf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::Linf];

    pub fn apply(&self, v: &Vector) -> f64 {
        match self {
            NormKind::L1 => v.coords.iter().map(|c| c.abs()).sum(),
            NormKind::L2 => v.coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
            NormKind::Linf => v.coords.iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }
}

/// `norm(v, k)`; errors on dimension 0 at `Vector` construction already,
/// kept as a free function to match the operation surface.
pub fn norm(v: &Vector, k: NormKind) -> f64 {
    k.apply(v)
}

/// Exact finite-support probability law over vectors.
///
/// Atoms are canonically ordered (lexicographic by coordinate, total order
/// on f64), merged by exact coordinate equality, all probabilities positive,
/// total mass within `MASS_TOL` of one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    atoms: Vec<(Vector, f64)>,
    dim: usize,
}

fn cmp_coords(a: &Vector, b: &Vector) -> std::cmp::Ordering {
    for (x, y) in a.coords().iter().zip(b.coords()) {
        let c = x.total_cmp(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

impl FiniteDistribution {
    pub fn new(atoms: Vec<(Vector, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let dim = atoms[0].0.dim();
        if atoms.iter().any(|(v, _)| v.dim() != dim) {
            return Err(Error::DimMismatch("atoms of mixed dimension".into()));
        }
        if atoms.iter().any(|(_, p)| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("negative or non-finite prob".into()));
        }
        // merge by exact coordinate identity, deterministically
        let mut map: std::collections::BTreeMap<Vec<u64>, (Vector, f64)> =
            std::collections::BTreeMap::new();
        for (v, p) in atoms {
            let key = v.bits_key();
            map.entry(key).and_modify(|e| e.1 += p).or_insert((v, p));
        }
        let mut merged: Vec<(Vector, f64)> =
            map.into_values().filter(|(_, p)| *p > 0.0).collect();
        merged.sort_by(|a, b| cmp_coords(&a.0, &b.0));
        if merged.is_empty() {
            return Err(Error::InvalidDistribution("zero total mass".into()));
        }
        let mass: f64 = merged.iter().map(|(_, p)| p).sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "total mass {mass} outside 1 +/- {MASS_TOL}"
            )));
        }
        Ok(FiniteDistribution { atoms: merged, dim })
    }

    pub fn point_mass(v: Vector) -> Self {
        let dim = v.dim();
        FiniteDistribution { atoms: vec![(v, 1.0)], dim }
    }

    /// Dim-1 helper: atoms given as (value, prob) pairs.
    pub fn from_scalar_atoms(pairs: &[(f64, f64)]) -> Result<Self> {
        FiniteDistribution::new(
            pairs
                .iter()
                .map(|&(x, p)| (Vector::scalar(x), p))
                .collect(),
        )
    }

    /// +-1 with probability 1/2 each.
    pub fn rademacher() -> Self {
        FiniteDistribution::from_scalar_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    pub fn atoms(&self) -> &[(Vector, f64)] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, p)| p).sum()
    }

    pub fn mean(&self) -> Vector {
        let mut m = Vector::zero(self.dim);
        for (v, p) in &self.atoms {
            m = m.add(&v.scale(*p));
        }
        m
    }

    pub fn expect(&self, g: &TestFunction) -> Result<f64> {
        let mut s = 0.0;
        for (v, p) in &self.atoms {
            s += p * g.eval(v)?;
        }
        Ok(s)
    }

    /// Pushforward under a pointwise map, merging coincident images.
    pub fn map(&self, f: impl Fn(&Vector) -> Vector) -> Result<Self> {
        FiniteDistribution::new(self.atoms.iter().map(|(v, p)| (f(v), *p)).collect())
    }

    pub fn negate(&self) -> Self {
        self.map(|v| v.neg()).expect("negation preserves validity")
    }

    /// Dim-1 cumulative distribution function P(X <= t).
    pub fn cdf_scalar(&self, t: f64) -> f64 {
        debug_assert_eq!(self.dim, 1);
        self.atoms
            .iter()
            .filter(|(v, _)| v.coords()[0] <= t)
            .map(|(_, p)| p)
            .sum()
    }

    /// One draw by inverse-CDF scan over the canonical atom order.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vector {
        let u: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        for (v, p) in &self.atoms {
            acc += p;
            if u < acc {
                return v.clone();
            }
        }
        self.atoms.last().unwrap().0.clone()
    }

    pub fn max_atom_norm(&self, k: NormKind) -> f64 {
        self.atoms
            .iter()
            .fold(0.0, |m, (v, _)| m.max(k.apply(v)))
    }
}

/// `affine(d, scale, shift)`: pushforward under x -> scale*x + shift.
pub fn affine(d: &FiniteDistribution, scale: f64, shift: &Vector) -> Result<FiniteDistribution> {
    if shift.dim() != d.dim() {
        return Err(Error::DimMismatch(format!(
            "shift dim {} vs distribution dim {}",
            shift.dim(),
            d.dim()
        )));
    }
    d.map(|v| v.scale(scale).add(shift))
}

/// Truncation at L: atoms with ||x|| < L (STRICT) kept, everything else
/// mapped to the origin. The strict inequality matters on lattice laws.
pub fn truncate(d: &FiniteDistribution, l: f64, k: NormKind) -> Result<FiniteDistribution> {
    assert!(l > 0.0, "truncation level must be positive");
    let dim = d.dim();
    d.map(|v| {
        if k.apply(v) < l {
            v.clone()
        } else {
            Vector::zero(dim)
        }
    })
}

/// Law of X - X' for independent copies: convolution of d with its negation.
pub fn symmetrize(d: &FiniteDistribution) -> Result<FiniteDistribution> {
    crate::exact::convolve(d, &d.negate())
}

/// Continuous one-dimensional samplable primitive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ContinuousSpec {
    UniformInterval { a: f64, b: f64 },
    PushforwardOfUniform { integrand: IntegrandSpec, a: f64, b: f64 },
}

impl ContinuousSpec {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = match self {
            ContinuousSpec::UniformInterval { a, b } => (*a, *b),
            ContinuousSpec::PushforwardOfUniform { a, b, .. } => (*a, *b),
        };
        if !(a < b) {
            return Err(Error::InvalidDistribution(format!(
                "interval [{a}, {b}] is empty"
            )));
        }
        Ok(())
    }

    /// One draw; integrand exceptional points trigger a resample
    /// (a probability-zero event under the uniform law).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            ContinuousSpec::UniformInterval { a, b } => rng.gen_range(*a..*b),
            ContinuousSpec::PushforwardOfUniform { integrand, a, b } => loop {
                let x = rng.gen_range(*a..*b);
                if let Some(y) = integrand.eval(x) {
                    return y;
                }
            },
        }
    }
}

/// One independent component of a family: exact law or samplable spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Component {
    Finite(FiniteDistribution),
    Continuous(ContinuousSpec),
}

impl Component {
    pub fn dim(&self) -> usize {
        match self {
            Component::Finite(d) => d.dim(),
            Component::Continuous(_) => 1,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vector {
        match self {
            Component::Finite(d) => d.sample(rng),
            Component::Continuous(c) => Vector::scalar(c.sample(rng)),
        }
    }
}

/// An ordered list of n independent components X_1, ..., X_n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentFamily {
    components: Vec<Component>,
    dim: usize,
}

impl ComponentFamily {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution("empty family".into()));
        }
        let dim = components[0].dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::DimMismatch("family components of mixed dimension".into()));
        }
        for c in &components {
            if let Component::Continuous(cs) = c {
                cs.validate()?;
            }
        }
        Ok(ComponentFamily { components, dim })
    }

    pub fn finite(dists: Vec<FiniteDistribution>) -> Result<Self> {
        ComponentFamily::new(dists.into_iter().map(Component::Finite).collect())
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// All components as exact laws; errors if any component is continuous.
    pub fn as_finite(&self) -> Result<Vec<&FiniteDistribution>> {
        self.components
            .iter()
            .map(|c| match c {
                Component::Finite(d) => Ok(d),
                Component::Continuous(_) => Err(Error::InvalidDistribution(
                    "operation requires finite-support components".into(),
                )),
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .all(|c| matches!(c, Component::Finite(_)))
    }

    /// Pointwise map of every finite component (truncation, centering).
    pub fn map_finite(
        &self,
        f: impl Fn(&FiniteDistribution) -> Result<FiniteDistribution>,
    ) -> Result<ComponentFamily> {
        let dists = self
            .as_finite()?
            .into_iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        ComponentFamily::finite(dists)
    }
}

/// Uniform mixture of the component laws: the regular cover X~.
pub fn regular_cover(fam: &ComponentFamily) -> Result<FiniteDistribution> {
    let dists = fam.as_finite()?;
    let n = dists.len() as f64;
    let mut atoms = Vec::new();
    for d in dists {
        for (v, p) in d.atoms() {
            atoms.push((v.clone(), p / n));
        }
    }
    FiniteDistribution::new(atoms)
}

/// Sense of a norm-threshold indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Geq,
    Leq,
}

/// Built-in Borel test functions pinning down moments and distribution
/// functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TestFunction {
    /// Sum of monomial terms (coefficient, exponent per coordinate),
    /// total degree <= 4.
    Polynomial { terms: Vec<(f64, Vec<u32>)> },
    NormIndicator { norm: NormKind, threshold: f64, sense: Sense },
    /// 1 iff <direction, x> <= offset; axis directions recover the
    /// distribution-function characterization in dim 1.
    HalfSpaceIndicator { direction: Vector, offset: f64 },
}

impl TestFunction {
    pub fn eval(&self, v: &Vector) -> Result<f64> {
        match self {
            TestFunction::Polynomial { terms } => {
                let mut s = 0.0;
                for (coef, exps) in terms {
                    if exps.len() != v.dim() {
                        return Err(Error::EvalFailure(format!(
                            "monomial over {} coordinates applied to dim {}",
                            exps.len(),
                            v.dim()
                        )));
                    }
                    let mut t = *coef;
                    for (x, e) in v.coords().iter().zip(exps) {
                        t *= x.powi(*e as i32);
                    }
                    s += t;
                }
                Ok(s)
            }
            TestFunction::NormIndicator { norm, threshold, sense } => {
                let x = norm.apply(v);
                let hit = match sense {
                    Sense::Geq => x >= *threshold,
                    Sense::Leq => x <= *threshold,
                };
                Ok(if hit { 1.0 } else { 0.0 })
            }
            TestFunction::HalfSpaceIndicator { direction, offset } => {
                if direction.dim() != v.dim() {
                    return Err(Error::EvalFailure(
                        "half-space direction dimension mismatch".into(),
                    ));
                }
                Ok(if direction.dot(v) <= *offset { 1.0 } else { 0.0 })
            }
        }
    }
}

fn monomial_exponents(dim: usize, max_total_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fn rec(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            if cur.iter().any(|&e| e > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(cur, i + 1, left - e, out);
        }
        cur[i] = 0;
    }
    rec(&mut cur, 0, max_total_degree, &mut out);
    out
}

/// The fixed test-function battery: every monomial of total degree <= 4
/// plus 16 indicators with thresholds scaled to `radius` (a bound on the
/// atom norms of the family under test).
pub fn test_battery(dim: usize, radius: f64) -> Vec<TestFunction> {
    let r = if radius > 0.0 { radius } else { 1.0 };
    let mut battery: Vec<TestFunction> = monomial_exponents(dim, 4)
        .into_iter()
        .map(|exps| TestFunction::Polynomial { terms: vec![(1.0, exps)] })
        .collect();
    // 8 norm indicators: 4 thresholds, both senses
    for i in 1..=4 {
        let t = r * i as f64 / 4.0;
        for sense in [Sense::Geq, Sense::Leq] {
            battery.push(TestFunction::NormIndicator {
                norm: NormKind::L2,
                threshold: t,
                sense,
            });
        }
    }
    // 8 half-space indicators along the first axis
    let mut dir = vec![0.0; dim];
    dir[0] = 1.0;
    let e1 = Vector::new(dir).unwrap();
    for i in 0..8 {
        let offset = -r + 2.0 * r * (i as f64) / 7.0;
        battery.push(TestFunction::HalfSpaceIndicator {
            direction: e1.clone(),
            offset,
        });
    }
    battery
}

/// Exact check of the covering identity E[g(X~)] = (1/n) sum_k E[g(X_k)]
/// for every supplied test function.
pub fn verify_cover(
    fam: &ComponentFamily,
    cover: &FiniteDistribution,
    gs: &[TestFunction],
) -> Result<CheckReport> {
    let dists = fam.as_finite()?;
    let n = dists.len() as f64;
    let mut max_disc: f64 = 0.0;
    let mut details = Vec::new();
    for (i, g) in gs.iter().enumerate() {
        let cover_side = cover.expect(g)?;
        let mut comp_side = 0.0;
        for d in &dists {
            comp_side += d.expect(g)?;
        }
        comp_side /= n;
        let disc = (cover_side - comp_side).abs();
        max_disc = max_disc.max(disc);
        details.push(DetailRow {
            lambda: i as f64,
            lhs: comp_side,
            rhs: cover_side,
            pass: disc <= MASS_TOL,
        });
    }
    Ok(CheckReport {
        name: "verify_cover".into(),
        lhs: max_disc,
        rhs: MASS_TOL,
        margin: MASS_TOL - max_disc,
        mode: CheckMode::Exact,
        pass: max_disc <= MASS_TOL,
        lhs_ci: None,
        rhs_ci: None,
        details,
    })
}
