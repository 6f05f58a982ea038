//! Vertex potentials: reweighting, validity audits, pointwise combination and
//! clamping of distance-derived potentials that contain infinities.

use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EdgeId, Graph, Length, VertexId};

/// Which pipeline stage produced a potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Zero,
    Johnson,
    ProperHop,
    Sandwich,
    Neutralize,
    Betweenness,
    Fallback,
    Composite,
    External,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    values: Vec<Length>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialError {
    NonFinite { vertex: VertexId },
    IndexMismatch { left: usize, right: usize },
    BigMTooSmall { required: Length, given: Length },
}

impl fmt::Display for PotentialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialError::NonFinite { vertex } => write!(f, "potential of vertex {vertex} is not finite"),
            PotentialError::IndexMismatch { left, right } => {
                write!(f, "potentials indexed over {left} and {right} vertices")
            }
            PotentialError::BigMTooSmall { required, given } => {
                write!(f, "clamp bound {given} below required {required}")
            }
        }
    }
}

impl core::error::Error for PotentialError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineMode {
    Sum,
    Max,
    Min,
}

impl Potential {
    pub fn new(values: Vec<Length>, provenance: Provenance) -> Result<Self, PotentialError> {
        if let Some(vertex) = values.iter().position(|x| !x.is_finite()) {
            return Err(PotentialError::NonFinite { vertex });
        }
        Ok(Potential { values, provenance })
    }

    pub fn zero(n: usize) -> Self {
        Potential { values: alloc::vec![0.0; n], provenance: Provenance::Zero }
    }

    /// Callers guarantee finiteness.
    pub(crate) fn from_finite(values: Vec<Length>, provenance: Provenance) -> Self {
        debug_assert!(values.iter().all(|x| x.is_finite()));
        Potential { values, provenance }
    }

    pub fn values(&self) -> &[Length] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }

    /// `ℓ(e) + φ(tail) − φ(head)`.
    pub fn reduced_length(&self, g: &Graph, e: EdgeId) -> Length {
        let edge = g.edge(e);
        edge.len + self.values[edge.tail] - self.values[edge.head]
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

impl core::ops::Index<VertexId> for Potential {
    type Output = Length;
    fn index(&self, v: VertexId) -> &Length {
        &self.values[v]
    }
}

/// Reweights every edge by `phi`. The frozen set is carried over unchanged.
pub fn reweight(g: &Graph, phi: &Potential) -> Graph {
    assert_eq!(phi.len(), g.n(), "potential indexed over a different vertex set");
    if phi.is_zero() {
        return g.clone();
    }
    g.with_lengths((0..g.m()).map(|e| phi.reduced_length(g, e)))
}

/// Edges outside the frozen set that are nonnegative in `g` but negative
/// under `phi`. Empty means `phi` is valid.
///
/// For a freshly built graph the frozen set is exactly the negative edges,
/// so this is the plain "no new negative edges" condition. Frozen edges that
/// became nonnegative mid-iteration still count as negative.
pub fn violations(g: &Graph, phi: &Potential) -> Vec<EdgeId> {
    assert_eq!(phi.len(), g.n(), "potential indexed over a different vertex set");
    (0..g.m())
        .filter(|&e| !g.is_frozen(e) && g.edge(e).len >= 0.0 && phi.reduced_length(g, e) < 0.0)
        .collect()
}

pub fn is_valid(g: &Graph, phi: &Potential) -> Result<(), Vec<EdgeId>> {
    let bad = violations(g, phi);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

pub fn combine(a: &Potential, b: &Potential, mode: CombineMode) -> Result<Potential, PotentialError> {
    if a.len() != b.len() {
        return Err(PotentialError::IndexMismatch { left: a.len(), right: b.len() });
    }
    let op: fn(Length, Length) -> Length = match mode {
        CombineMode::Sum => |x, y| x + y,
        CombineMode::Max => f64::max,
        CombineMode::Min => f64::min,
    };
    let values = a.values.iter().zip(&b.values).map(|(&x, &y)| op(x, y)).collect();
    Ok(Potential { values, provenance: Provenance::Composite })
}

impl Potential {
    /// In-place `self += other`.
    pub fn accumulate(&mut self, other: &Potential) {
        assert_eq!(self.len(), other.len());
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += y;
        }
        self.provenance = Provenance::Composite;
    }
}

/// `1 + Σ|ℓ(e)|`: no finite hop-limited distance in `g` reaches this in
/// absolute value.
pub fn big_m(g: &Graph) -> Length {
    1.0 + g.edges().iter().map(|e| libm::fabs(e.len)).sum::<Length>()
}

/// Maps `+∞ ↦ big_m`, `−∞ ↦ −big_m`, leaving finite entries alone.
///
/// `big_m` must exceed every finite entry by at least one, so the result is
/// `max(min(φ, M), −M)`; min/max with a constant potential keeps validity.
pub fn clamp(partial: &[Length], big_m: Length, provenance: Provenance) -> Result<Potential, PotentialError> {
    let widest = partial.iter().filter(|x| x.is_finite()).fold(0.0, |acc: Length, &x| acc.max(libm::fabs(x)));
    let required = 1.0 + widest;
    if !(big_m >= required) || !big_m.is_finite() {
        return Err(PotentialError::BigMTooSmall { required, given: big_m });
    }
    let values = partial
        .iter()
        .map(|&x| if x == Length::INFINITY { big_m } else if x == Length::NEG_INFINITY { -big_m } else { x })
        .collect();
    Ok(Potential { values, provenance })
}

/// Clamp with the tightest bounds: `+∞` becomes the largest finite entry and
/// `−∞` the smallest. Keeps potential magnitudes from compounding across
/// iterations.
pub fn clamp_tight(partial: &[Length], provenance: Provenance) -> Potential {
    let finite = partial.iter().copied().filter(|x| x.is_finite());
    let hi = finite.clone().fold(Length::NEG_INFINITY, f64::max);
    let lo = finite.fold(Length::INFINITY, f64::min);
    let (hi, lo) = if hi.is_finite() { (hi, lo) } else { (0.0, 0.0) };
    let values = partial
        .iter()
        .map(|&x| if x == Length::INFINITY { hi } else if x == Length::NEG_INFINITY { lo } else { x })
        .collect();
    Potential { values, provenance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::hopdist::{hop_distances, Direction};
    use alloc::vec;

    fn pot(v: &[f64]) -> Potential {
        Potential::new(v.to_vec(), Provenance::External).unwrap()
    }

    #[test]
    fn zero_potential_is_identity() {
        let g = fixtures::a();
        assert_eq!(reweight(&g, &Potential::zero(4)), g);
    }

    #[test]
    fn johnson_potential_on_fixture_a() {
        let g = fixtures::a();
        let phi = pot(&[0.0, 0.0, -5.0, -3.0]);
        let lens: Vec<_> = reweight(&g, &phi).edges().iter().map(|e| e.len).collect();
        assert_eq!(lens, vec![1.0, 0.0, 0.0]);
        assert_eq!(is_valid(&g, &phi), Ok(()));
    }

    #[test]
    fn reweight_keeps_frozen_set() {
        let g = fixtures::a();
        let h = reweight(&g, &pot(&[0.0, 0.0, -5.0, -3.0]));
        assert_eq!(h.frozen_edges(), &[1]);
        assert_eq!(h.negative_edge_count(), 0);
    }

    #[test]
    fn constant_potential_is_valid() {
        let g = fixtures::b();
        assert_eq!(is_valid(&g, &pot(&[7.0; 4])), Ok(()));
    }

    #[test]
    fn invalid_potential_reports_edges() {
        let g = fixtures::a();
        let phi = pot(&[0.0, 10.0, 0.0, 0.0]);
        // s→a becomes 1 + 0 − 10 = −9
        assert_eq!(phi.reduced_length(&g, 0), -9.0);
        assert_eq!(is_valid(&g, &phi), Err(vec![0]));
    }

    #[test]
    fn combine_algebra() {
        let a = pot(&[1.0, -2.0, 3.0]);
        assert_eq!(combine(&a, &a, CombineMode::Max).unwrap().values(), a.values());
        let neg = pot(&[-1.0, 2.0, -3.0]);
        assert!(combine(&a, &neg, CombineMode::Sum).unwrap().is_zero());
        assert_eq!(
            combine(&a, &pot(&[0.0]), CombineMode::Min),
            Err(PotentialError::IndexMismatch { left: 3, right: 1 })
        );
    }

    #[test]
    fn clamp_behaviour() {
        let finite = [1.0, -2.0];
        assert_eq!(clamp(&finite, 10.0, Provenance::External).unwrap().values(), &finite);
        assert!(matches!(
            clamp(&[5.0, f64::INFINITY], 3.0, Provenance::External),
            Err(PotentialError::BigMTooSmall { .. })
        ));

        // d^0(s, ·) on fixture A leaves b and t unreachable.
        let g = fixtures::a();
        let table = hop_distances(&g, &[fixtures::S], 0, Direction::Forward).unwrap();
        assert_eq!(table.top(), &[0.0, 1.0, f64::INFINITY, f64::INFINITY]);
        let m = big_m(&g);
        assert_eq!(m, 9.0);
        let phi = clamp(table.top(), m, Provenance::External).unwrap();
        assert_eq!(phi.values(), &[0.0, 1.0, 9.0, 9.0]);
        assert_eq!(is_valid(&g, &phi), Ok(()));

        // with one hop everything is reachable and nothing changes
        let table = hop_distances(&g, &[fixtures::S], 1, Direction::Forward).unwrap();
        let phi = clamp(table.top(), m, Provenance::External).unwrap();
        assert_eq!(phi.values(), &[0.0, 1.0, -4.0, -2.0]);
        assert_eq!(is_valid(&g, &phi), Ok(()));
    }

    #[test]
    fn tight_clamp_uses_finite_extremes() {
        let phi = clamp_tight(&[3.0, f64::INFINITY, -1.0, f64::NEG_INFINITY], Provenance::External);
        assert_eq!(phi.values(), &[3.0, 3.0, -1.0, -1.0]);
        assert!(clamp_tight(&[f64::INFINITY; 2], Provenance::External).is_zero());
    }
}
