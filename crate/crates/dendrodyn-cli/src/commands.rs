//! Command implementations. Every command renders a report (JSON, or CSV
//! where a tabular form is defined) and says whether all requested
//! certificates passed.

use crate::reports::*;
use dendrodyn::corpus::{lower_map, random_monotone_map, random_point, rng_from_seed};
use dendrodyn::dynamics::{classify_recurrence, omega_limit, OmegaKind, RecurrenceClass};
use dendrodyn::entropy::{entropy_curve, PointSystem};
use dendrodyn::hyper::{
    asymptotic_companion, hyper_omega, pair_tail_stats, HyperElement, InducedMap,
};
use dendrodyn::io;
use dendrodyn::odometer::{regular_recurrence_certificate, verify_single_cycle, Base};
use dendrodyn::plmap::PLSelfMap;
use dendrodyn::scalar::{format_rat, Rat, Scalar};
use dendrodyn::star;
use dendrodyn::subtree::SubTree;
use dendrodyn::tree::{MetricTree, Pos, TreePoint};
use rand::RngExt;
use rayon::prelude::*;
use std::path::Path;

pub type CliResult = Result<(String, bool), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    let mut s = serde_json::to_string_pretty(value).map_err(err)?;
    s.push('\n');
    Ok(s)
}

fn point_str(tree: &MetricTree<Rat>, p: &TreePoint<Rat>) -> String {
    match p.pos() {
        Pos::Vertex(v) => format!("vertex:{}", tree.vertex_name(*v)),
        Pos::Inner { edge, offset } => format!("edge:{}@{}", edge, format_rat(offset)),
    }
}

fn load_points(path: &Path, tree: &MetricTree<Rat>) -> Result<Vec<TreePoint<Rat>>, String> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{shown}: {e}"))?;
    let files: Vec<io::PointFile> = serde_json::from_str(&text)
        .map_err(|e| format!("{shown}:{}:{}: {e}", e.line(), e.column()))?;
    files
        .iter()
        .map(|p| io::point_from_file(&shown, tree, p).map_err(err))
        .collect()
}

fn load_elements(
    path: &Path,
    tree: &MetricTree<Rat>,
    limit: usize,
) -> Result<Vec<HyperElement<Rat>>, String> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{shown}: {e}"))?;
    let files: Vec<io::HyperElementFile> = serde_json::from_str(&text)
        .map_err(|e| format!("{shown}:{}:{}: {e}", e.line(), e.column()))?;
    files
        .iter()
        .map(|f| io::element_from_file(&shown, tree, f, limit).map_err(err))
        .collect()
}

fn element_json(tree: &MetricTree<Rat>, e: &HyperElement<Rat>) -> serde_json::Value {
    serde_json::to_value(io::element_to_file(tree, e)).expect("element serializes")
}

pub fn run_geom(tree_path: &Path, points_path: &Path) -> CliResult {
    let tree = io::load_tree(tree_path).map_err(err)?;
    let points = load_points(points_path, &tree)?;
    if points.is_empty() {
        return Err("points file must contain at least one point".into());
    }
    let mut distances = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = tree.distance(&points[i], &points[j]).map_err(err)?;
            let arc = tree.arc(&points[i], &points[j]).map_err(err)?;
            distances.push(DistanceRow {
                i,
                j,
                distance: format_rat(&d),
                arc_segments: arc.segments().len(),
            });
        }
    }
    let hull = SubTree::hull(&tree, &points).map_err(err)?;
    let orders = points
        .iter()
        .map(|p| tree.point_order(p).map_err(err))
        .collect::<Result<Vec<_>, _>>()?;
    let report = GeomReport {
        kind: "geom".into(),
        tree_vertices: tree.vertex_count(),
        tree_edges: tree.edge_count(),
        points: points.iter().map(|p| point_str(&tree, p)).collect(),
        distances,
        hull_endpoints: hull
            .endpoints()
            .iter()
            .map(|p| point_str(&tree, p))
            .collect(),
        orders,
    };
    Ok((to_json(&report)?, true))
}

pub fn run_map_check(map_path: &Path) -> CliResult {
    let map = io::load_map(map_path).map_err(err)?;
    let tree = map.tree();
    let witness = map.monotone_witness().map(|w| WitnessReport {
        target: point_str(tree, &w.target),
        preimage_a: point_str(tree, &w.preimage_a),
        preimage_b: point_str(tree, &w.preimage_b),
    });
    let report = MapCheckReport {
        kind: "map_check".into(),
        monotone: map.is_monotone(),
        witness,
        cellwise_bijective: map.is_cellwise_bijective(),
        cells: map.cell_map().cells().len(),
    };
    Ok((to_json(&report)?, true))
}

fn recurrence_label<S: dendrodyn::Scalar>(class: &RecurrenceClass<S>) -> String {
    match class {
        RecurrenceClass::Fixed => "fixed".into(),
        RecurrenceClass::Periodic { period } => format!("periodic:{period}"),
        RecurrenceClass::RegularlyRecurrent { n, .. } => format!("regularly-recurrent:{n}"),
        RecurrenceClass::Recurrent { .. } => "recurrent".into(),
        RecurrenceClass::NonrecurrentEvidence { .. } => "nonrecurrent-evidence".into(),
    }
}

pub fn run_omega(
    map_path: &Path,
    samples_path: &Path,
    eps: &Rat,
    horizon: usize,
    csv: bool,
) -> CliResult {
    let map = io::load_map(map_path).map_err(err)?;
    let tree = map.tree().clone();
    let samples = load_points(samples_path, &tree)?;
    let (map_f, samples_f) = lower_map(&map, &samples);
    let eps_f = eps.approx();
    let mut rows = Vec::new();
    for (x, x_f) in samples.iter().zip(&samples_f) {
        let om = omega_limit(&map, x, eps, horizon).map_err(err)?;
        let (resolved, period) = match om.kind {
            OmegaKind::ExactPeriodic { period } => (true, Some(period)),
            OmegaKind::Approximation { .. } => (false, None),
        };
        // Exact classes first; the scan runs on the f64 instantiation.
        let recurrence = match classify_recurrence(&map, x, eps, 64, 16).map_err(err)? {
            r @ dendrodyn::dynamics::RecurrenceReport {
                class: RecurrenceClass::Fixed | RecurrenceClass::Periodic { .. },
                ..
            } => recurrence_label(&r.class),
            _ => {
                let rep =
                    classify_recurrence(&map_f, x_f, &eps_f, horizon, 64).map_err(err)?;
                recurrence_label(&rep.class)
            }
        };
        rows.push(OmegaSampleReport {
            sample: point_str(&tree, x),
            resolved,
            period,
            omega_points: om.points.iter().map(|p| point_str(&tree, p)).collect(),
            recurrence,
        });
    }
    if csv {
        let mut out = String::from("sample,resolved,period,omega_size,recurrence\n");
        for r in &rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.sample,
                r.resolved,
                r.period.map_or(String::new(), |p| p.to_string()),
                r.omega_points.len(),
                r.recurrence
            ));
        }
        return Ok((out, true));
    }
    let report = OmegaReport {
        kind: "omega".into(),
        eps: format_rat(eps),
        horizon,
        samples: rows,
    };
    Ok((to_json(&report)?, true))
}

fn space_of<'a>(
    name: &str,
    f: &'a PLSelfMap<Rat>,
) -> Result<(InducedMap<'a, Rat>, usize), String> {
    match name {
        "f1" => Ok((InducedMap::FiniteSets { f, n: 1 }, 1)),
        "f2" => Ok((InducedMap::FiniteSets { f, n: 2 }, 2)),
        "f3" => Ok((InducedMap::FiniteSets { f, n: 3 }, 3)),
        "t2" => Ok((InducedMap::Subtrees { f, n: 2 }, 2)),
        "t3" => Ok((InducedMap::Subtrees { f, n: 3 }, 3)),
        "c" => Ok((InducedMap::Continua { f }, usize::MAX)),
        other => Err(format!(
            "unknown hyperspace {other:?} (expected f1|f2|f3|t2|t3|c)"
        )),
    }
}

pub fn run_hyper_orbit(
    map_path: &Path,
    elements_path: &Path,
    space_name: &str,
    eps: &Rat,
    horizon: usize,
) -> CliResult {
    let map = io::load_map(map_path).map_err(err)?;
    let tree = map.tree().clone();
    let (space, limit) = space_of(space_name, &map)?;
    let elements = load_elements(elements_path, &tree, limit)?;
    let mut rows = Vec::new();
    for (idx, e) in elements.iter().enumerate() {
        let om = hyper_omega(&space, e, eps, horizon)
            .map_err(|e| format!("element {idx}: {e}"))?;
        rows.push(HyperOrbitRow {
            element: element_json(&tree, e),
            resolved: om.exact_period.is_some(),
            period: om.exact_period,
            cluster_size: om.cluster.len(),
            minimal: om.minimal,
        });
    }
    let report = HyperOrbitReport {
        kind: "hyper_orbit".into(),
        space: space_name.into(),
        eps: format_rat(eps),
        horizon,
        elements: rows,
    };
    Ok((to_json(&report)?, true))
}

pub fn run_hyper_companion(
    map_path: &Path,
    elements_path: &Path,
    space_name: &str,
    eps: &Rat,
    horizon: usize,
) -> CliResult {
    let map = io::load_map(map_path).map_err(err)?;
    let tree = map.tree().clone();
    let (space, limit) = space_of(space_name, &map)?;
    let elements = load_elements(elements_path, &tree, limit)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for (idx, e) in elements.iter().enumerate() {
        match asymptotic_companion(&space, e, eps, horizon) {
            Ok(c) => rows.push(CompanionRow {
                element: element_json(&tree, e),
                companion: element_json(&tree, &c.element),
                induced_period: c.induced_period,
                certified_from: c.certified_from,
                nearest_periodic_distance: format_rat(&c.nearest_periodic_distance),
            }),
            Err(e) => {
                ok = false;
                eprintln!("element {idx}: companion failed: {e}");
            }
        }
    }
    let report = CompanionReport {
        kind: "hyper_companion".into(),
        space: space_name.into(),
        eps: format_rat(eps),
        horizon,
        elements: rows,
    };
    Ok((to_json(&report)?, ok))
}

pub fn run_hyper_liyorke(
    map_path: &Path,
    space_name: &str,
    pairs: usize,
    seed: u64,
    eps: &Rat,
    horizon: usize,
) -> CliResult {
    let map = io::load_map(map_path).map_err(err)?;
    map.require_monotone().map_err(err)?;
    let tree = map.tree().clone();
    let mut rng = rng_from_seed(seed);
    let pts: Vec<_> = (0..24).map(|_| random_point(&mut rng, &tree)).collect();
    let (map_f, pts_f) = lower_map(&map, &pts);
    let tree_f = map_f.tree().clone();
    let eps_f = eps.approx();
    let limit = 3;
    let subtree_space = space_name.starts_with('t');
    let draws: Vec<(HyperElement<f64>, HyperElement<f64>)> = (0..pairs)
        .map(|_| {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.random_range(1..=limit);
                let chosen: Vec<_> = (0..k)
                    .map(|_| pts_f[rng.random_range(0..pts_f.len())].clone())
                    .collect();
                if subtree_space {
                    HyperElement::Tree(SubTree::hull(&tree_f, &chosen).expect("hull"))
                } else {
                    HyperElement::finite_set(&tree_f, &chosen, limit).expect("element")
                }
            };
            (pick(&mut rng), pick(&mut rng))
        })
        .collect();
    let space = if subtree_space {
        InducedMap::Subtrees { f: &map_f, n: limit }
    } else {
        InducedMap::FiniteSets { f: &map_f, n: limit }
    };
    let stats: Vec<(f64, f64)> = draws
        .par_iter()
        .map(|(a, b)| {
            let s = pair_tail_stats(&space, a, b, horizon).expect("scan");
            (s.tail_inf, s.tail_sup)
        })
        .collect();
    let mut proximal = 0usize;
    let mut exceptions = 0usize;
    let mut worst: f64 = 0.0;
    for (inf, sup) in &stats {
        if *inf < eps_f {
            proximal += 1;
            worst = worst.max(*sup);
            if *sup >= eps_f {
                exceptions += 1;
            }
        }
    }
    let report = LiYorkeReport {
        kind: "liyorke_scan".into(),
        space: space_name.into(),
        pairs,
        horizon,
        eps: eps_f,
        proximal_pairs: proximal,
        li_yorke_exceptions: exceptions,
        max_tail_sup_among_proximal: worst,
    };
    Ok((to_json(&report)?, exceptions == 0))
}

pub fn run_odometer(
    base_pattern: &[u64],
    depth: usize,
    samples: usize,
    seed: u64,
) -> CliResult {
    let base = Base::cyclic(base_pattern, depth).map_err(err)?;
    let single = verify_single_cycle(&base, 1 << 22).map_err(err)?;
    let mut rng = rng_from_seed(seed);
    let mut sample_reports = Vec::new();
    let mut ok = single;
    let mut prime = true;
    for _ in 0..samples.max(1) {
        let digits: Vec<u64> = base
            .bounds()
            .iter()
            .map(|&b| rng.random_range(0..b))
            .collect();
        let x = base.point(digits.clone()).map_err(err)?;
        let mut certs = Vec::new();
        for m in 0..=depth {
            let c = regular_recurrence_certificate(&base, &x, m).map_err(err)?;
            if c.max_distance > c.bound {
                ok = false;
            }
            prime = c.prime_base;
            certs.push(OdometerCertRow {
                m,
                period: c.period.to_string(),
                returns_checked: c.returns_checked.to_string(),
                max_distance: format_rat(&c.max_distance),
                bound: format_rat(&c.bound),
            });
        }
        sample_reports.push(OdometerSampleReport {
            point: digits,
            certificates: certs,
        });
    }
    let report = OdometerReport {
        kind: "odometer".into(),
        base: base.bounds().to_vec(),
        depth,
        cycle_length: base.state_count().to_string(),
        single_cycle: single,
        prime_base: prime,
        samples: sample_reports,
    };
    Ok((to_json(&report)?, ok))
}

pub fn run_star_entropy(k: u64, n: u64, budget: u128) -> CliResult {
    let cert = star::entropy_certificate(k, n, budget).map_err(err)?;
    let ok = cert.min_separation >= dendrodyn::rat(1, k as i64);
    let report = StarEntropyReport {
        kind: "entropy".into(),
        k: cert.k,
        n: cert.n,
        pairs_checked: cert.pairs_checked,
        min_separation: format_rat(&cert.min_separation),
        family_size: cert.family_size,
        rate_bound_nats: cert.rate_bound_nats,
    };
    Ok((to_json(&report)?, ok))
}

#[allow(clippy::too_many_arguments)]
pub fn run_star_chaos(
    lambda: &Rat,
    lambda_prime: &Rat,
    alphas: usize,
    tolerance: &Rat,
    depth: u64,
    horizon: u64,
    n_rays: u64,
) -> CliResult {
    let band: Vec<Rat> = (1..=alphas as i64)
        .map(|i| {
            lambda.clone()
                + (lambda_prime.clone() - lambda.clone()) * dendrodyn::rat(i, alphas as i64)
        })
        .collect();
    let cert =
        star::omega_chaos_certificate(lambda, lambda_prime, &band, tolerance, depth, horizon, n_rays)
            .map_err(err)?;
    let mut ok = true;
    let witnesses = cert
        .alphas
        .iter()
        .map(|rec| {
            use num_traits::Zero;
            if rec.witness.distance > rec.witness.bound
                || rec.min_self_return <= Rat::zero()
                || rec.min_distance_to_small_orbit < rec.separation_lower_bound
            {
                ok = false;
            }
            ChaosWitnessRow {
                alpha: format_rat(&rec.witness.alpha),
                m: rec.witness.m,
                distance: format_rat(&rec.witness.distance),
                bound: format_rat(&rec.witness.bound),
                separation_lower_bound: format_rat(&rec.separation_lower_bound),
                min_distance_to_small_orbit: format_rat(&rec.min_distance_to_small_orbit),
                min_self_return: format_rat(&rec.min_self_return),
            }
        })
        .collect();
    let root_attraction = cert
        .root_attraction
        .iter()
        .map(|(n, d, b)| {
            if d > b {
                ok = false;
            }
            RootAttractionRow {
                n: *n,
                distance: format_rat(d),
                bound: format_rat(b),
            }
        })
        .collect();
    let report = StarChaosReport {
        kind: "omega_chaos".into(),
        lambda: format_rat(&cert.lambda),
        lambda_prime: format_rat(&cert.lambda_prime),
        truncation_slack: format_rat(&cert.truncation_slack),
        witnesses,
        root_attraction,
    };
    Ok((to_json(&report)?, ok))
}

#[allow(clippy::too_many_arguments)]
pub fn run_entropy_curve(
    map_path: &Path,
    pool_path: Option<&Path>,
    pool_size: usize,
    seed: u64,
    n_max: usize,
    eps_list: &[Rat],
    csv: bool,
) -> CliResult {
    let map = io::load_map(map_path).map_err(err)?;
    let tree = map.tree().clone();
    let pool: Vec<TreePoint<Rat>> = match pool_path {
        Some(p) => load_points(p, &tree)?,
        None => {
            let mut rng = rng_from_seed(seed);
            (0..pool_size)
                .map(|_| random_point(&mut rng, &tree))
                .collect()
        }
    };
    if pool.is_empty() || eps_list.is_empty() {
        return Err("need a nonempty pool and at least one eps".into());
    }
    let n_values: Vec<usize> = (1..=n_max).collect();
    let sys = PointSystem(&map);
    let rows = entropy_curve(&sys, &pool, &n_values, eps_list).map_err(|e| format!("{e:?}"))?;
    if csv {
        let mut out = String::from("n,eps,count,rate\n");
        for r in &rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.n,
                format_rat(&r.eps),
                r.count,
                r.rate
            ));
        }
        return Ok((out, true));
    }
    let report = EntropyCurveReport {
        kind: "entropy_curve".into(),
        pool_size: pool.len(),
        rows: rows
            .iter()
            .map(|r| EntropyCurveRow {
                n: r.n,
                eps: format_rat(&r.eps),
                count: r.count,
                rate: r.rate,
            })
            .collect(),
    };
    Ok((to_json(&report)?, true))
}

#[allow(clippy::too_many_arguments)]
pub fn run_corpus(
    maps: usize,
    samples: usize,
    pairs: usize,
    companions: usize,
    seed: u64,
    eps: &Rat,
    horizon: usize,
) -> CliResult {
    let mut rng = rng_from_seed(seed);
    let eps_f = eps.approx();
    let mut reports = Vec::new();
    let mut passed = true;
    for _ in 0..maps {
        let c = random_monotone_map(&mut rng);
        let tree = c.map.tree().clone();
        let sample_pts: Vec<_> = (0..samples).map(|_| random_point(&mut rng, &tree)).collect();
        let structure =
            dendrodyn::dynamics::check_recurrence_structure(&c.map, &sample_pts, eps, horizon, 64)
                .map_err(err)?;
        // Li-Yorke scan on the f64 instantiation.
        let pts: Vec<_> = (0..16).map(|_| random_point(&mut rng, &tree)).collect();
        let (map_f, pts_f) = lower_map(&c.map, &pts);
        let tree_f = map_f.tree().clone();
        let draws: Vec<(HyperElement<f64>, HyperElement<f64>)> = (0..pairs)
            .map(|_| {
                let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let k = rng.random_range(1..=3usize);
                    let chosen: Vec<_> = (0..k)
                        .map(|_| pts_f[rng.random_range(0..pts_f.len())].clone())
                        .collect();
                    HyperElement::finite_set(&tree_f, &chosen, 3).expect("element")
                };
                (pick(&mut rng), pick(&mut rng))
            })
            .collect();
        let space_f = InducedMap::FiniteSets { f: &map_f, n: 3 };
        let stats: Vec<(f64, f64)> = draws
            .par_iter()
            .map(|(a, b)| {
                let s = pair_tail_stats(&space_f, a, b, horizon).expect("scan");
                (s.tail_inf, s.tail_sup)
            })
            .collect();
        let mut proximal = 0;
        let mut exceptions = 0;
        for (inf, sup) in &stats {
            if *inf < eps_f {
                proximal += 1;
                if *sup >= eps_f {
                    exceptions += 1;
                }
            }
        }
        // Companion certificates on exact arithmetic.
        let space = InducedMap::FiniteSets { f: &c.map, n: 3 };
        let mut companion_failures = 0;
        for _ in 0..companions {
            let k = rng.random_range(1..=3usize);
            let chosen: Vec<_> = (0..k)
                .map(|_| random_point(&mut rng, &tree))
                .collect();
            let e = HyperElement::finite_set(&tree, &chosen, 3).map_err(err)?;
            match asymptotic_companion(&space, &e, eps, horizon) {
                Ok(comp) if comp.certified_from <= horizon => {}
                _ => companion_failures += 1,
            }
        }
        let map_ok = structure.violations.is_empty()
            && structure.unresolved == 0
            && exceptions == 0
            && companion_failures == 0;
        passed &= map_ok;
        reports.push(CorpusMapReport {
            family: c.family.to_owned(),
            vertices: tree.vertex_count(),
            monotone: c.map.is_monotone(),
            samples,
            unresolved: structure.unresolved,
            omega_points: structure.omega_points_checked,
            recurrence_violations: structure.violations,
            pairs_scanned: pairs,
            proximal_pairs: proximal,
            li_yorke_exceptions: exceptions,
            companions_checked: companions,
            companion_failures,
        });
    }
    let report = CorpusReport {
        kind: "corpus".into(),
        seed,
        maps: reports,
        passed,
    };
    Ok((to_json(&report)?, passed))
}
