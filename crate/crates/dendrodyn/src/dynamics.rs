//! Orbit analysis: cycles, ω-limit sets, recurrence classes, pair types.
//!
//! ω-limits of piecewise-linear maps are resolved *structurally*: once the
//! orbit revisits a cell, the per-step affine maps compose to one affine
//! contraction whose fixed point is solved exactly; the resulting periodic
//! orbit is then verified by exact arithmetic (see docs/algorithms.md). This
//! avoids iterating rationals for the full horizon. Orbits that do not
//! resolve are reported as tail-cluster approximations, never silently
//! promoted to exact answers.

use crate::plmap::{CellImage, MapError, PLSelfMap, PeriodicReport};
use crate::scalar::Scalar;
use crate::tree::{Pos, TreePoint};

/// Exact orbit prefix with optional exact cycle data.
#[derive(Debug, Clone)]
pub struct OrbitRecord<S> {
    pub points: Vec<TreePoint<S>>,
    /// `(pre_period, period)` when an exact repeat occurred within horizon.
    pub cycle: Option<(usize, usize)>,
}

/// How an ω-limit set was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaKind<S> {
    /// The set is an exactly verified periodic orbit.
    ExactPeriodic { period: usize },
    /// Cluster representatives of the orbit tail; an unresolved outcome.
    Approximation { eps: S, horizon: usize },
}

#[derive(Debug, Clone)]
pub struct OmegaSet<S> {
    pub points: Vec<TreePoint<S>>,
    pub kind: OmegaKind<S>,
}

impl<S: Scalar> OmegaSet<S> {
    pub fn is_exact(&self) -> bool {
        matches!(self.kind, OmegaKind::ExactPeriodic { .. })
    }
}

/// Iterates `f` from `x`, detecting exact cycles (Brent's method over the
/// stored prefix). Stops at the first repeat or at the horizon.
pub fn orbit<S: Scalar>(
    f: &PLSelfMap<S>,
    x: &TreePoint<S>,
    horizon: usize,
) -> Result<OrbitRecord<S>, MapError> {
    let mut points = vec![x.clone()];
    let mut anchor = 0usize;
    let mut power = 1usize;
    for i in 1..=horizon {
        let next = f.evaluate(&points[i - 1])?;
        points.push(next);
        if points[i] == points[anchor] {
            let period = i - anchor;
            let mut mu = 0;
            while points[mu] != points[mu + period] {
                mu += 1;
            }
            return Ok(OrbitRecord {
                points,
                cycle: Some((mu, period)),
            });
        }
        if i - anchor == power {
            anchor = i;
            power *= 2;
        }
    }
    Ok(OrbitRecord { points, cycle: None })
}

/// Tuning knobs for ω-limit resolution.
#[derive(Debug, Clone)]
pub struct OmegaOptions {
    /// Max exact steps spent before giving up on resolution.
    pub resolve_budget: usize,
    /// How often the affine-cycle closure is attempted.
    pub attempt_every: usize,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        OmegaOptions {
            resolve_budget: 2048,
            attempt_every: 8,
        }
    }
}

/// Certified convergence data for a resolved ω-limit: from step `start` on,
/// `d(f^(start+k·window+s)(x), f^s(limit))` is bounded by
/// `lip · ratio^k · gap` exactly.
#[derive(Debug, Clone)]
pub struct Alignment<S> {
    pub start: usize,
    pub window: usize,
    pub limit: TreePoint<S>,
    pub ratio: S,
    pub lip: S,
    pub gap: S,
}

impl<S: Scalar> Alignment<S> {
    /// First step from which the distance bound drops (and stays) below
    /// `eps`, when that happens within `cap` steps.
    pub fn certified_step(&self, eps: &S, cap: usize) -> Option<usize> {
        if *eps <= S::zero() {
            return None;
        }
        let mut bound = self.lip.clone() * self.gap.clone();
        let mut k = 0usize;
        loop {
            let n0 = self.start + k * self.window;
            if n0 > cap {
                return None;
            }
            if bound < *eps {
                return Some(n0);
            }
            if self.ratio.is_zero() {
                return Some(self.start.min(cap));
            }
            bound = bound * self.ratio.clone();
            k += 1;
        }
    }
}

/// ω-limit set of `x` under `f`.
///
/// Defaults follow the module conventions: horizon 10^4, cluster radius ε.
pub fn omega_limit<S: Scalar>(
    f: &PLSelfMap<S>,
    x: &TreePoint<S>,
    eps: &S,
    horizon: usize,
) -> Result<OmegaSet<S>, MapError> {
    Ok(omega_limit_detailed(f, x, eps, horizon, &OmegaOptions::default())?.0)
}

pub fn omega_limit_opts<S: Scalar>(
    f: &PLSelfMap<S>,
    x: &TreePoint<S>,
    eps: &S,
    horizon: usize,
    opts: &OmegaOptions,
) -> Result<OmegaSet<S>, MapError> {
    Ok(omega_limit_detailed(f, x, eps, horizon, opts)?.0)
}

/// ω-limit with the convergence certificate when resolution succeeded.
pub fn omega_limit_detailed<S: Scalar>(
    f: &PLSelfMap<S>,
    x: &TreePoint<S>,
    eps: &S,
    horizon: usize,
    opts: &OmegaOptions,
) -> Result<(OmegaSet<S>, Option<Alignment<S>>), MapError> {
    let tree = f.tree();
    let budget = horizon.min(opts.resolve_budget);
    let mut points = vec![x.clone()];
    let mut step_cells: Vec<Option<usize>> = Vec::new();
    let mut anchor = 0usize;
    let mut power = 1usize;
    // Latest previous index sitting in each cell.
    let mut last_in_cell: Vec<Option<usize>> = vec![None; f.cell_map().cells().len()];

    for i in 1..=budget {
        let (next, cell) = f.evaluate_traced(&points[i - 1])?;
        step_cells.push(cell);
        points.push(next);

        // Exact cycle detection.
        if points[i] == points[anchor] {
            let period = i - anchor;
            let mut mu = 0;
            while points[mu] != points[mu + period] {
                mu += 1;
            }
            let cycle: Vec<TreePoint<S>> = cycle_points(tree, &points[mu..mu + period]);
            let alignment = Alignment {
                start: mu,
                window: period,
                limit: points[mu].clone(),
                ratio: S::zero(),
                lip: S::one(),
                gap: S::zero(),
            };
            return Ok((
                OmegaSet {
                    points: cycle,
                    kind: OmegaKind::ExactPeriodic { period },
                },
                Some(alignment),
            ));
        }
        if i - anchor == power {
            anchor = i;
            power *= 2;
        }

        // Affine closure attempt: current point shares a cell with an
        // earlier one.
        if let Some(c) = step_cells[i - 1] {
            let prev = last_in_cell[c];
            last_in_cell[c] = Some(i - 1);
            if let Some(j0) = prev {
                if (i - 1 - j0) % opts.attempt_every.max(1) == 0 || i - 1 - j0 <= 64 {
                    if let Some(found) =
                        try_affine_closure(f, &points, &step_cells, j0, i - 1)?
                    {
                        return Ok((found.0, Some(found.1)));
                    }
                }
            }
        }
    }
    // Unresolved: cluster the tail.
    let tail_from = points.len() / 2;
    let mut reps: Vec<TreePoint<S>> = Vec::new();
    for p in &points[tail_from..] {
        let mut close = false;
        for r in &reps {
            if tree.distance(p, r)? < *eps {
                close = true;
                break;
            }
        }
        if !close {
            reps.push(p.clone());
        }
    }
    reps.sort_by(|a, b| tree.cmp_points(a, b));
    Ok((
        OmegaSet {
            points: reps,
            kind: OmegaKind::Approximation {
                eps: eps.clone(),
                horizon,
            },
        },
        None,
    ))
}

/// Cycle window in dynamical order, rotated to start at the canonically
/// smallest member.
fn cycle_points<S: Scalar>(
    tree: &crate::tree::MetricTree<S>,
    window: &[TreePoint<S>],
) -> Vec<TreePoint<S>> {
    let mut min_idx = 0;
    for (i, p) in window.iter().enumerate() {
        if tree.cmp_points(p, &window[min_idx]) == std::cmp::Ordering::Less {
            min_idx = i;
        }
    }
    let mut cycle = Vec::with_capacity(window.len());
    for i in 0..window.len() {
        cycle.push(window[(min_idx + i) % window.len()].clone());
    }
    cycle
}

/// Composes the per-step affine maps over `[i, j)`; if the window closes a
/// contraction on one cell, solves its fixed point and verifies the periodic
/// orbit exactly.
fn try_affine_closure<S: Scalar>(
    f: &PLSelfMap<S>,
    points: &[TreePoint<S>],
    step_cells: &[Option<usize>],
    i: usize,
    j: usize,
) -> Result<Option<(OmegaSet<S>, Alignment<S>)>, MapError> {
    let tree = f.tree();
    let cells = f.cell_map().cells();
    let m = j - i;
    if m == 0 {
        return Ok(None);
    }
    let mut a = S::one();
    let mut b = S::zero();
    let mut stretch = S::one();
    let mut lip = S::one();
    for t in i..j {
        let Some(ci) = step_cells[t] else {
            return Ok(None);
        };
        let cell = &cells[ci];
        let CellImage::Seg { at_lo, at_hi, .. } = &cell.image else {
            return Ok(None);
        };
        let span = cell.hi.clone() - cell.lo.clone();
        let slope = (at_hi.clone() - at_lo.clone()) / span;
        let intercept = at_lo.clone() - cell.lo.clone() * slope.clone();
        a = slope.clone() * a;
        b = slope.clone() * b + intercept;
        stretch = stretch * slope.abs();
        if stretch > lip {
            lip = stretch.clone();
        }
    }
    if a.clone().abs() >= S::one() {
        return Ok(None);
    }
    let cell = &cells[step_cells[i].expect("checked")];
    let fixed_off = b / (S::one() - a.clone());
    if fixed_off < cell.lo || fixed_off > cell.hi {
        return Ok(None);
    }
    let anchor_off = match points[i].pos() {
        Pos::Inner { offset, .. } => offset.clone(),
        Pos::Vertex(w) => tree
            .vertex_offset_on_edge(*w, cell.edge)
            .expect("anchor sits on its cell edge"),
    };
    let gap = (anchor_off - fixed_off.clone()).abs();
    let p_star = tree.point_on_edge(cell.edge, fixed_off)?;
    // Verify: the orbit of the fixed point must close exactly in m steps and
    // shadow the recorded cells, which certifies the affine model for every
    // future iterate of x.
    let mut q = p_star.clone();
    let mut orbit_pts = vec![p_star.clone()];
    for s in 0..m {
        let want_cell = &cells[step_cells[i + s].expect("affine window")];
        let compatible = match q.pos() {
            Pos::Inner { edge, offset } => {
                *edge == want_cell.edge && *offset >= want_cell.lo && *offset <= want_cell.hi
            }
            Pos::Vertex(w) => tree
                .vertex_offset_on_edge(*w, want_cell.edge)
                .map(|off| off >= want_cell.lo && off <= want_cell.hi)
                .unwrap_or(false),
        };
        if !compatible {
            return Ok(None);
        }
        q = f.evaluate(&q)?;
        orbit_pts.push(q.clone());
    }
    if orbit_pts[m] != p_star {
        return Ok(None);
    }
    // Minimal period divides m.
    let mut period = m;
    for d in 1..m {
        if m.is_multiple_of(d) && orbit_pts[d] == p_star {
            period = d;
            break;
        }
    }
    let cycle = cycle_points(tree, &orbit_pts[..period]);
    let alignment = Alignment {
        start: i,
        window: m,
        limit: p_star,
        ratio: a.abs(),
        lip,
        gap,
    };
    Ok(Some((
        OmegaSet {
            points: cycle,
            kind: OmegaKind::ExactPeriodic { period },
        },
        alignment,
    )))
}

/// Recurrence classification of a single point.
#[derive(Debug, Clone, PartialEq)]
pub enum RecurrenceClass<S> {
    Fixed,
    Periodic { period: usize },
    RegularlyRecurrent { n: usize, eps: S },
    Recurrent { eps: S },
    NonrecurrentEvidence { horizon: usize },
}

#[derive(Debug, Clone)]
pub struct RecurrenceReport<S> {
    pub class: RecurrenceClass<S>,
    /// Largest observed deviation over the certified return times.
    pub max_deviation: Option<S>,
}

/// Strongest recurrence class certifiable within the horizon. Exact checks
/// (fixed/periodic) come first; the ε-based classes scan return distances.
pub fn classify_recurrence<S: Scalar>(
    f: &PLSelfMap<S>,
    x: &TreePoint<S>,
    eps: &S,
    horizon: usize,
    n_max: usize,
) -> Result<RecurrenceReport<S>, MapError> {
    let tree = f.tree();
    if f.evaluate(x)? == *x {
        return Ok(RecurrenceReport {
            class: RecurrenceClass::Fixed,
            max_deviation: Some(S::zero()),
        });
    }
    let rec = orbit(f, x, horizon.min(4096))?;
    if let Some((0, period)) = rec.cycle {
        return Ok(RecurrenceReport {
            class: RecurrenceClass::Periodic { period },
            max_deviation: Some(S::zero()),
        });
    }
    // Return-distance scan.
    let mut dists: Vec<S> = Vec::with_capacity(horizon + 1);
    dists.push(S::zero());
    let mut p = x.clone();
    for _ in 1..=horizon {
        p = f.evaluate(&p)?;
        dists.push(tree.distance(x, &p)?);
    }
    'outer: for n in 1..=n_max {
        let mut worst = S::zero();
        let mut k = n;
        while k <= horizon {
            if dists[k] >= *eps {
                continue 'outer;
            }
            if dists[k] > worst {
                worst = dists[k].clone();
            }
            k += n;
        }
        return Ok(RecurrenceReport {
            class: RecurrenceClass::RegularlyRecurrent {
                n,
                eps: eps.clone(),
            },
            max_deviation: Some(worst),
        });
    }
    let late_return = dists[horizon / 2..].iter().any(|d| *d < *eps);
    if late_return {
        return Ok(RecurrenceReport {
            class: RecurrenceClass::Recurrent { eps: eps.clone() },
            max_deviation: None,
        });
    }
    Ok(RecurrenceReport {
        class: RecurrenceClass::NonrecurrentEvidence { horizon },
        max_deviation: None,
    })
}

/// Regular-recurrence certificate: an `N ≤ n_max` with
/// `d(x, f^{kN}(x)) < eps` for every multiple within the horizon. For exactly
/// periodic points the certificate is exact with deviation 0.
#[derive(Debug, Clone)]
pub struct RrCertificate<S> {
    pub n: usize,
    pub eps: S,
    pub max_deviation: S,
    pub multiples_checked: usize,
    pub exact: bool,
}

pub fn rr_certificate<S: Scalar>(
    f: &PLSelfMap<S>,
    x: &TreePoint<S>,
    eps: &S,
    n_max: usize,
    horizon: usize,
) -> Result<Option<RrCertificate<S>>, MapError> {
    // Exact fast path: an exactly periodic point returns exactly.
    for period in 1..=n_max {
        if f.iterate(x, period)? == *x {
            return Ok(Some(RrCertificate {
                n: period,
                eps: eps.clone(),
                max_deviation: S::zero(),
                multiples_checked: horizon / period,
                exact: true,
            }));
        }
    }
    match classify_recurrence(f, x, eps, horizon, n_max)? {
        RecurrenceReport {
            class: RecurrenceClass::RegularlyRecurrent { n, .. },
            max_deviation,
        } => Ok(Some(RrCertificate {
            n,
            eps: eps.clone(),
            max_deviation: max_deviation.unwrap_or_else(S::zero),
            multiples_checked: horizon / n,
            exact: false,
        })),
        _ => Ok(None),
    }
}

/// Verdict for an orbit pair over the tail window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairVerdict {
    Asymptotic,
    LiYorkeEvidence,
    DistalEvidence,
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct PairReport<S> {
    pub verdict: PairVerdict,
    pub tail_inf: S,
    pub tail_sup: S,
    pub window: (usize, usize),
}

/// Tail statistics of `d(f^n x, f^n y)` over `[horizon/2, horizon]`.
/// Verdicts are numerical evidence, not proofs.
pub fn pair_type<S: Scalar>(
    f: &PLSelfMap<S>,
    x: &TreePoint<S>,
    y: &TreePoint<S>,
    eps: &S,
    horizon: usize,
) -> Result<PairReport<S>, MapError> {
    let tree = f.tree();
    let start = horizon / 2;
    let mut p = x.clone();
    let mut q = y.clone();
    let mut tail_inf: Option<S> = None;
    let mut tail_sup: Option<S> = None;
    for n in 0..=horizon {
        if n >= start {
            let d = tree.distance(&p, &q)?;
            if tail_inf.as_ref().is_none_or(|v| d < *v) {
                tail_inf = Some(d.clone());
            }
            if tail_sup.as_ref().is_none_or(|v| d > *v) {
                tail_sup = Some(d);
            }
        }
        if n < horizon {
            p = f.evaluate(&p)?;
            q = f.evaluate(&q)?;
        }
    }
    let tail_inf = tail_inf.expect("window nonempty");
    let tail_sup = tail_sup.expect("window nonempty");
    let two_eps = eps.clone() * S::from_ratio(2, 1);
    let verdict = if tail_sup < *eps {
        PairVerdict::Asymptotic
    } else if tail_inf >= *eps {
        PairVerdict::DistalEvidence
    } else if tail_sup >= two_eps {
        PairVerdict::LiYorkeEvidence
    } else {
        PairVerdict::Undetermined
    };
    Ok(PairReport {
        verdict,
        tail_inf,
        tail_sup,
        window: (start, horizon),
    })
}

/// Joint report for the empirical recurrence-structure check: every resolved
/// ω-limit point must sit on a solved periodic orbit and carry a
/// regular-recurrence certificate.
#[derive(Debug, Clone)]
pub struct RecurrenceStructure<S> {
    pub samples: usize,
    pub resolved: usize,
    pub unresolved: usize,
    pub omega_points_checked: usize,
    pub max_distance_to_periodic: S,
    pub violations: Vec<String>,
}

pub fn check_recurrence_structure<S: Scalar>(
    f: &PLSelfMap<S>,
    samples: &[TreePoint<S>],
    eps: &S,
    horizon: usize,
    rr_n_max: usize,
) -> Result<RecurrenceStructure<S>, MapError> {
    f.require_monotone()?;
    let tree = f.tree();
    let mut omegas = Vec::new();
    let mut max_period = 1usize;
    let mut unresolved = 0usize;
    for x in samples {
        let om = omega_limit(f, x, eps, horizon)?;
        if let OmegaKind::ExactPeriodic { period } = om.kind {
            max_period = max_period.max(period);
        } else {
            unresolved += 1;
        }
        omegas.push(om);
    }
    let solved: PeriodicReport<S> = crate::plmap::periodic_points(f, max_period, 200_000)?;
    let mut violations = Vec::new();
    let mut max_dist = S::zero();
    let mut checked = 0usize;
    for (idx, om) in omegas.iter().enumerate() {
        if !om.is_exact() {
            continue;
        }
        for p in &om.points {
            checked += 1;
            let best = solved.distance_to_solutions(tree, p)?;
            if best > *eps {
                violations.push(format!(
                    "sample {idx}: omega point {p:?} is {best} away from every solved periodic point"
                ));
            }
            if best > max_dist {
                max_dist = best;
            }
            if rr_certificate(f, p, eps, rr_n_max, horizon)?.is_none() {
                violations.push(format!(
                    "sample {idx}: omega point {p:?} earned no regular-recurrence certificate"
                ));
            }
        }
    }
    Ok(RecurrenceStructure {
        samples: samples.len(),
        resolved: samples.len() - unresolved,
        unresolved,
        omega_points_checked: checked,
        max_distance_to_periodic: max_dist,
        violations,
    })
}
