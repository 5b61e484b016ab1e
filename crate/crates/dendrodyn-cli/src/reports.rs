//! Typed report payloads; every command emits one of these as JSON (and
//! some as CSV rows). Field order is fixed so identical runs are
//! byte-identical.

use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeomReport {
    pub kind: String,
    pub tree_vertices: usize,
    pub tree_edges: usize,
    pub points: Vec<String>,
    pub distances: Vec<DistanceRow>,
    pub hull_endpoints: Vec<String>,
    pub orders: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceRow {
    pub i: usize,
    pub j: usize,
    pub distance: String,
    pub arc_segments: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapCheckReport {
    pub kind: String,
    pub monotone: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    pub cellwise_bijective: bool,
    pub cells: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessReport {
    pub target: String,
    pub preimage_a: String,
    pub preimage_b: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaReport {
    pub kind: String,
    pub eps: String,
    pub horizon: usize,
    pub samples: Vec<OmegaSampleReport>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSampleReport {
    pub sample: String,
    pub resolved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub omega_points: Vec<String>,
    pub recurrence: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperOrbitReport {
    pub kind: String,
    pub space: String,
    pub eps: String,
    pub horizon: usize,
    pub elements: Vec<HyperOrbitRow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperOrbitRow {
    pub element: serde_json::Value,
    pub resolved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub cluster_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanionReport {
    pub kind: String,
    pub space: String,
    pub eps: String,
    pub horizon: usize,
    pub elements: Vec<CompanionRow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanionRow {
    pub element: serde_json::Value,
    pub companion: serde_json::Value,
    pub induced_period: usize,
    pub certified_from: usize,
    pub nearest_periodic_distance: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiYorkeReport {
    pub kind: String,
    pub space: String,
    pub pairs: usize,
    pub horizon: usize,
    pub eps: f64,
    pub proximal_pairs: usize,
    pub li_yorke_exceptions: usize,
    pub max_tail_sup_among_proximal: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdometerReport {
    pub kind: String,
    pub base: Vec<u64>,
    pub depth: usize,
    pub cycle_length: String,
    pub single_cycle: bool,
    pub prime_base: bool,
    pub samples: Vec<OdometerSampleReport>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdometerSampleReport {
    pub point: Vec<u64>,
    pub certificates: Vec<OdometerCertRow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdometerCertRow {
    pub m: usize,
    pub period: String,
    pub returns_checked: String,
    pub max_distance: String,
    pub bound: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarEntropyReport {
    pub kind: String,
    pub k: u64,
    pub n: u64,
    pub pairs_checked: u128,
    pub min_separation: String,
    pub family_size: u128,
    pub rate_bound_nats: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarChaosReport {
    pub kind: String,
    pub lambda: String,
    pub lambda_prime: String,
    pub truncation_slack: String,
    pub witnesses: Vec<ChaosWitnessRow>,
    pub root_attraction: Vec<RootAttractionRow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosWitnessRow {
    pub alpha: String,
    pub m: u64,
    pub distance: String,
    pub bound: String,
    pub separation_lower_bound: String,
    pub min_distance_to_small_orbit: String,
    pub min_self_return: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootAttractionRow {
    pub n: u64,
    pub distance: String,
    pub bound: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyCurveReport {
    pub kind: String,
    pub pool_size: usize,
    pub rows: Vec<EntropyCurveRow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyCurveRow {
    pub n: usize,
    pub eps: String,
    pub count: usize,
    pub rate: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusReport {
    pub kind: String,
    pub seed: u64,
    pub maps: Vec<CorpusMapReport>,
    pub passed: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusMapReport {
    pub family: String,
    pub vertices: usize,
    pub monotone: bool,
    pub samples: usize,
    pub unresolved: usize,
    pub omega_points: usize,
    pub recurrence_violations: Vec<String>,
    pub pairs_scanned: usize,
    pub proximal_pairs: usize,
    pub li_yorke_exceptions: usize,
    pub companions_checked: usize,
    pub companion_failures: usize,
}
