//! Discretized su(2) connections along the path of a qubit.
//!
//! A path is a chain of segments, each carrying constant field components
//! `A^a`, a length `Δs` and the charge `q` of the travelling qubit. The
//! segment transport is `exp(i q Δs A^a σ_a/2)` and transports compose with
//! later segments on the left. Nodes sit between segments; a lattice gauge
//! transform assigns one SU(2) element per node and maps each link
//! `L_i ↦ g_{i+1} L_i g_i†`.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::frames::{oracle_access, Network, PartyId};
use crate::qmath::{Su2, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SegmentRecord", into = "SegmentRecord")]
pub struct PathSegment {
    coeffs: [f64; 3],
    length: f64,
    charge: f64,
}

#[derive(Serialize, Deserialize)]
struct SegmentRecord {
    #[serde(rename = "A")]
    a: [f64; 3],
    ds: f64,
    q: f64,
}

impl From<PathSegment> for SegmentRecord {
    fn from(s: PathSegment) -> Self {
        Self {
            a: s.coeffs,
            ds: s.length,
            q: s.charge,
        }
    }
}

impl TryFrom<SegmentRecord> for PathSegment {
    type Error = crate::Error;

    fn try_from(r: SegmentRecord) -> Result<Self> {
        Self::new(r.a, r.ds, r.q)
    }
}

impl PathSegment {
    pub fn new(coeffs: [f64; 3], length: f64, charge: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return input(format!("segment length must be positive, got {length}"));
        }
        if !charge.is_finite() || coeffs.iter().any(|x| !x.is_finite()) {
            return input("segment field and charge must be finite");
        }
        Ok(Self {
            coeffs,
            length,
            charge,
        })
    }

    pub fn coeffs(&self) -> [f64; 3] {
        self.coeffs
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    /// Rotation vector `q Δs A` of the segment's transport.
    fn rotation(&self) -> [f64; 3] {
        self.coeffs.map(|a| a * self.charge * self.length)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathRecord", into = "PathRecord")]
pub struct GaugePath {
    segments: Vec<PathSegment>,
    closed: bool,
}

#[derive(Serialize, Deserialize)]
struct PathRecord {
    segments: Vec<PathSegment>,
    closed: bool,
}

impl From<GaugePath> for PathRecord {
    fn from(p: GaugePath) -> Self {
        Self {
            segments: p.segments,
            closed: p.closed,
        }
    }
}

impl TryFrom<PathRecord> for GaugePath {
    type Error = crate::Error;

    fn try_from(r: PathRecord) -> Result<Self> {
        Self::new(r.segments, r.closed)
    }
}

impl GaugePath {
    pub fn new(segments: Vec<PathSegment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return input("a path needs at least one segment");
        }
        Ok(Self { segments, closed })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn node_count(&self) -> usize {
        self.segments.len() + 1
    }

    /// The same closed loop entered `k` segments later.
    pub fn rotated(&self, k: usize) -> Self {
        let mut segments = self.segments.clone();
        let shift = k % segments.len();
        segments.rotate_left(shift);
        Self {
            segments,
            closed: self.closed,
        }
    }

    /// Per-segment transports, the lattice link variables.
    pub fn links(&self) -> Vec<Su2> {
        self.segments.iter().map(segment_transport).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One SU(2) element per node.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeGaugeTransform {
    g: Vec<Su2>,
}

impl LatticeGaugeTransform {
    pub fn new(g: Vec<Su2>) -> Result<Self> {
        if g.len() < 2 {
            return input("a gauge transform needs at least two nodes");
        }
        Ok(Self { g })
    }

    /// Haar-random element at every node; closed paths share the end node.
    pub fn random<R: rand::Rng + ?Sized>(path: &GaugePath, rng: &mut R) -> Self {
        let mut g: Vec<Su2> = (0..path.node_count()).map(|_| Su2::haar(rng)).collect();
        if path.closed {
            g[path.segments.len()] = g[0];
        }
        Self { g }
    }

    pub fn nodes(&self) -> &[Su2] {
        &self.g
    }
}

pub fn segment_transport(seg: &PathSegment) -> Su2 {
    Su2::from_rotation_vector(seg.rotation())
}

/// Ordered product of link variables, later links on the left.
pub fn transport_of_links(links: &[Su2]) -> Su2 {
    links.iter().fold(Su2::identity(), |acc, l| *l * acc)
}

/// Path-ordered transport; for a closed path, its holonomy.
pub fn path_transport(path: &GaugePath) -> Su2 {
    transport_of_links(&path.links())
}

/// Transformed link variables `g_{i+1} L_i g_i†`.
pub fn gauge_transform(path: &GaugePath, lgt: &LatticeGaugeTransform) -> Result<Vec<Su2>> {
    if lgt.g.len() != path.node_count() {
        return input(format!(
            "gauge transform has {} nodes, path has {}",
            lgt.g.len(),
            path.node_count()
        ));
    }
    if path.closed && lgt.g[0].max_diff(&lgt.g[path.segments.len()]) > 1e-12 {
        return input("a closed path needs the same gauge element at its first and last node");
    }
    Ok(path
        .links()
        .iter()
        .enumerate()
        .map(|(i, l)| lgt.g[i + 1] * *l * lgt.g[i].adjoint())
        .collect())
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Path with every segment's field shifted by the first-order change
/// `δA^a = (1/q) ∂α^a + ε^{abc} A^b α^c`.
///
/// `alpha` holds one 3-vector per node (already scaled by the caller's ε).
/// The derivative is the forward difference across each segment, and the
/// structure-constant term uses the midpoint of the segment's two nodes.
pub fn infinitesimal_gauge_delta(path: &GaugePath, alpha: &[[f64; 3]], q: f64) -> Result<GaugePath> {
    if alpha.len() != path.node_count() {
        return input(format!(
            "need one gauge parameter per node ({}), got {}",
            path.node_count(),
            alpha.len()
        ));
    }
    if q == 0.0 || !q.is_finite() {
        return input("charge must be finite and nonzero");
    }
    let segments = path
        .segments
        .iter()
        .enumerate()
        .map(|(i, seg)| {
            let (a0, a1) = (alpha[i], alpha[i + 1]);
            let mid = [0, 1, 2].map(|k| 0.5 * (a0[k] + a1[k]));
            let rot = cross(seg.coeffs, mid);
            let coeffs = [0, 1, 2].map(|k| seg.coeffs[k] + (a1[k] - a0[k]) / (q * seg.length) + rot[k]);
            PathSegment::new(coeffs, seg.length, seg.charge)
        })
        .collect::<Result<Vec<_>>>()?;
    GaugePath::new(segments, path.closed)
}

/// Trace of the holonomy of a closed path.
pub fn wilson_loop(path: &GaugePath) -> Result<C64> {
    if !path.closed {
        return input("a Wilson loop needs a closed path");
    }
    Ok(path_transport(path).trace())
}

/// Gauge path whose transport reproduces the channels around `cycle`.
///
/// Each hop carries a constant field: the principal logarithm of the hop's
/// link variable, split evenly over `segments_per_hop` segments of length
/// `1/segments_per_hop` at unit charge. Ground truth.
pub fn channels_to_path(net: &Network, cycle: &[PartyId], segments_per_hop: usize) -> Result<GaugePath> {
    oracle_access("channel logarithms")?;
    if segments_per_hop == 0 {
        return input("need at least one segment per hop");
    }
    crate::frames::check_route(net, cycle)?;
    let ds = 1.0 / segments_per_hop as f64;
    let mut segments = Vec::new();
    for hop in cycle.windows(2) {
        let v = net.link(hop[1], hop[0]).log();
        let seg = PathSegment::new(v, ds, 1.0)?;
        segments.extend(std::iter::repeat_n(seg, segments_per_hop));
    }
    GaugePath::new(segments, true)
}
