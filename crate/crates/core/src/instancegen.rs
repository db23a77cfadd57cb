//! Seeded synthetic LP families.
//!
//! Every family builds a problem around a known feasible point and keeps all
//! columns bounded, so generated instances are feasible with a finite
//! optimum. Randomness comes from ChaCha8 with one stream per instance index.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::LpProblem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid parameter {name}: {msg}")]
    Param { name: String, msg: String },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("parameters give an empty problem")]
    Empty,
}

fn bad(name: &str, msg: impl Into<String>) -> GenError {
    GenError::Param {
        name: name.to_string(),
        msg: msg.into(),
    }
}

/// Family plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    /// Rows `Σ_{j∈S_i} x_j ≥ 1`, `x ∈ [0, 1]`, costs in `1..=max_coef`.
    SetCovering {
        nrow: usize,
        ncol: usize,
        dens: f64,
        max_coef: u32,
    },
    /// Capacitated facility location relaxation. `ratio` is total capacity
    /// over total demand.
    FacilityLocation {
        customers: usize,
        facilities: usize,
        ratio: f64,
    },
    /// Fixed-charge multicommodity network design relaxation on
    /// `min_n..=max_n` nodes.
    MulticommodityFlow { min_n: usize, max_n: usize },
    /// Flow with arc gains. `dens` is the number of arcs; all four counts
    /// are jittered by up to ±10% per instance.
    GeneralizedNetworkFlow {
        nodes: usize,
        nsorc: usize,
        nsink: usize,
        dens: usize,
    },
    /// Sparse base rows plus scaled duplicate rows and fixed columns.
    /// `dup_frac` is the number of duplicates per base row.
    RedundancyHeavy {
        nrow: usize,
        ncol: usize,
        dens: f64,
        dup_frac: f64,
        fixed_frac: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SetCovering { .. } => "set_covering",
            Family::FacilityLocation { .. } => "facility_location",
            Family::MulticommodityFlow { .. } => "multicommodity_flow",
            Family::GeneralizedNetworkFlow { .. } => "generalized_network_flow",
            Family::RedundancyHeavy { .. } => "redundancy_heavy",
        }
    }

    pub const NAMES: [&'static str; 5] = [
        "set_covering",
        "facility_location",
        "multicommodity_flow",
        "generalized_network_flow",
        "redundancy_heavy",
    ];

    /// Desk-scale defaults.
    pub fn default_for(name: &str) -> Result<Family, GenError> {
        Ok(match normalize(name).as_str() {
            "set_covering" => Family::SetCovering {
                nrow: 300,
                ncol: 600,
                dens: 0.01,
                max_coef: 100,
            },
            "facility_location" => Family::FacilityLocation {
                customers: 30,
                facilities: 30,
                ratio: 5.0,
            },
            "multicommodity_flow" => Family::MulticommodityFlow {
                min_n: 12,
                max_n: 12,
            },
            "generalized_network_flow" => Family::GeneralizedNetworkFlow {
                nodes: 500,
                nsorc: 25,
                nsink: 50,
                dens: 600,
            },
            "redundancy_heavy" => Family::RedundancyHeavy {
                nrow: 60,
                ncol: 80,
                dens: 0.06,
                dup_frac: 1.0,
                fixed_frac: 0.5,
            },
            _ => return Err(GenError::UnknownFamily(name.to_string())),
        })
    }

    /// Defaults for `name` overridden by `key=value` pairs separated by
    /// commas or whitespace.
    pub fn parse(name: &str, params: &str) -> Result<Family, GenError> {
        let mut fam = Family::default_for(name)?;
        let mut kv = BTreeMap::new();
        for item in params.split(|c: char| c == ',' || c.is_whitespace()) {
            if item.is_empty() {
                continue;
            }
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad(item, "expected key=value"))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        fn num<T: std::str::FromStr>(kv: &mut BTreeMap<String, String>, key: &str, slot: &mut T) -> Result<(), GenError> {
            if let Some(v) = kv.remove(key) {
                *slot = v.parse().map_err(|_| bad(key, format!("cannot parse {v:?}")))?;
            }
            Ok(())
        }
        match &mut fam {
            Family::SetCovering {
                nrow,
                ncol,
                dens,
                max_coef,
            } => {
                num(&mut kv, "nrow", nrow)?;
                num(&mut kv, "ncol", ncol)?;
                num(&mut kv, "dens", dens)?;
                num(&mut kv, "max_coef", max_coef)?;
            }
            Family::FacilityLocation {
                customers,
                facilities,
                ratio,
            } => {
                num(&mut kv, "number_of_customers", customers)?;
                num(&mut kv, "customers", customers)?;
                num(&mut kv, "number_of_facilities", facilities)?;
                num(&mut kv, "facilities", facilities)?;
                num(&mut kv, "ratio", ratio)?;
            }
            Family::MulticommodityFlow { min_n, max_n } => {
                num(&mut kv, "min_n", min_n)?;
                num(&mut kv, "max_n", max_n)?;
            }
            Family::GeneralizedNetworkFlow {
                nodes,
                nsorc,
                nsink,
                dens,
            } => {
                num(&mut kv, "nodes", nodes)?;
                num(&mut kv, "nsorc", nsorc)?;
                num(&mut kv, "nsink", nsink)?;
                num(&mut kv, "dens", dens)?;
            }
            Family::RedundancyHeavy {
                nrow,
                ncol,
                dens,
                dup_frac,
                fixed_frac,
            } => {
                num(&mut kv, "nrow", nrow)?;
                num(&mut kv, "ncol", ncol)?;
                num(&mut kv, "dens", dens)?;
                num(&mut kv, "dup_frac", dup_frac)?;
                num(&mut kv, "fixed_frac", fixed_frac)?;
            }
        }
        if let Some(k) = kv.keys().next() {
            return Err(bad(k, "unknown parameter for this family"));
        }
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(bad(name, "must be > 0"))
            } else {
                Ok(())
            }
        };
        let fraction = |name: &str, v: f64, zero_ok: bool| {
            let ok = v.is_finite() && v <= 1.0 && (v > 0.0 || (zero_ok && v == 0.0));
            if ok {
                Ok(())
            } else {
                Err(bad(name, format!("must be in {}0, 1]", if zero_ok { "[" } else { "(" })))
            }
        };
        const MAX_DIM: usize = 1 << 20;
        let capped = |name: &str, v: usize| {
            if v > MAX_DIM {
                Err(bad(name, "too large"))
            } else {
                Ok(())
            }
        };
        match *self {
            Family::SetCovering {
                nrow,
                ncol,
                dens,
                max_coef,
            } => {
                positive("nrow", nrow)?;
                positive("ncol", ncol)?;
                capped("nrow", nrow)?;
                capped("ncol", ncol)?;
                fraction("dens", dens, false)?;
                if max_coef == 0 {
                    return Err(bad("max_coef", "must be > 0"));
                }
                if (nrow as f64) * (ncol as f64) > 1e9 {
                    return Err(bad("nrow", "nrow·ncol too large"));
                }
            }
            Family::FacilityLocation {
                customers,
                facilities,
                ratio,
            } => {
                positive("customers", customers)?;
                positive("facilities", facilities)?;
                if (customers as f64) * (facilities as f64) > 1e7 {
                    return Err(bad("customers", "customers·facilities too large"));
                }
                if !(ratio.is_finite() && ratio >= 1.0) {
                    return Err(bad("ratio", "must be ≥ 1 so that demand can be met"));
                }
            }
            Family::MulticommodityFlow { min_n, max_n } => {
                if min_n < 3 {
                    return Err(bad("min_n", "must be ≥ 3"));
                }
                if max_n < min_n {
                    return Err(bad("max_n", "must be ≥ min_n"));
                }
                if max_n > 2000 {
                    return Err(bad("max_n", "too large"));
                }
            }
            Family::GeneralizedNetworkFlow {
                nodes,
                nsorc,
                nsink,
                dens,
            } => {
                positive("nsorc", nsorc)?;
                positive("nsink", nsink)?;
                positive("dens", dens)?;
                capped("nodes", nodes)?;
                capped("dens", dens)?;
                // Jitter can shrink counts by 10%.
                if (nodes as f64) * 0.9 < (nsorc + nsink) as f64 * 1.1 + 1.0 {
                    return Err(bad("nodes", "must exceed nsorc + nsink with room for jitter"));
                }
            }
            Family::RedundancyHeavy {
                nrow,
                ncol,
                dens,
                dup_frac,
                fixed_frac,
            } => {
                positive("nrow", nrow)?;
                positive("ncol", ncol)?;
                capped("nrow", nrow)?;
                capped("ncol", ncol)?;
                if (nrow as f64) * (ncol as f64) > 1e9 {
                    return Err(bad("nrow", "nrow·ncol too large"));
                }
                fraction("dens", dens, false)?;
                if !(dup_frac.is_finite() && (0.0..=4.0).contains(&dup_frac)) {
                    return Err(bad("dup_frac", "must be in [0, 4]"));
                }
                fraction("fixed_frac", fixed_frac, true)?;
                if fixed_frac >= 1.0 {
                    return Err(bad("fixed_frac", "must be < 1"));
                }
            }
        }
        Ok(())
    }
}

fn normalize(name: &str) -> String {
    let lower: String = name
        .trim()
        .chars()
        .filter(|c| *c != '_' && *c != '-')
        .flat_map(|c| c.to_lowercase())
        .collect();
    match lower.as_str() {
        "setcovering" | "setcover" => "set_covering",
        "facilitylocation" => "facility_location",
        "multicommodityflow" | "mcf" => "multicommodity_flow",
        "generalizednetworkflow" | "gnf" => "generalized_network_flow",
        "redundancyheavy" => "redundancy_heavy",
        _ => "",
    }
    .to_string()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// RNG for instance `index` of a corpus seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Instance 0 of `spec`.
pub fn generate(spec: &GenSpec) -> Result<LpProblem, GenError> {
    generate_indexed(spec, 0)
}

/// Instance `index` of the corpus described by `spec`.
pub fn generate_indexed(spec: &GenSpec, index: u64) -> Result<LpProblem, GenError> {
    spec.family.validate()?;
    let mut rng = instance_rng(spec.seed, index);
    let name = format!("{}_{}_{}", spec.family.name(), spec.seed, index);
    let lp = match spec.family {
        Family::SetCovering {
            nrow,
            ncol,
            dens,
            max_coef,
        } => set_covering(&mut rng, nrow, ncol, dens, max_coef),
        Family::FacilityLocation {
            customers,
            facilities,
            ratio,
        } => facility_location(&mut rng, customers, facilities, ratio),
        Family::MulticommodityFlow { min_n, max_n } => {
            let n = rng.gen_range(min_n..=max_n);
            multicommodity_flow(&mut rng, n)
        }
        Family::GeneralizedNetworkFlow {
            nodes,
            nsorc,
            nsink,
            dens,
        } => {
            let mut jitter = |v: usize| -> usize {
                let f: f64 = rng.gen_range(0.9..=1.1);
                ((v as f64 * f).round() as usize).max(1)
            };
            let (nodes, nsorc, nsink, arcs) = (jitter(nodes), jitter(nsorc), jitter(nsink), jitter(dens));
            generalized_network_flow(&mut rng, nodes, nsorc, nsink, arcs)
        }
        Family::RedundancyHeavy {
            nrow,
            ncol,
            dens,
            dup_frac,
            fixed_frac,
        } => redundancy_heavy(&mut rng, nrow, ncol, dens, dup_frac, fixed_frac),
    };
    let mut lp = lp;
    if lp.num_cols() == 0 || lp.nnz() == 0 {
        return Err(GenError::Empty);
    }
    lp.name = name;
    Ok(lp)
}

const INF: f64 = f64::INFINITY;

fn set_covering(rng: &mut ChaCha8Rng, nrow: usize, ncol: usize, dens: f64, max_coef: u32) -> LpProblem {
    let mut lp = LpProblem::new("");
    for j in 0..ncol {
        let c = rng.gen_range(1..=max_coef) as f64;
        lp.add_col(format!("x{j}"), c, 0.0, 1.0).unwrap();
    }
    for i in 0..nrow {
        let support = loop {
            let s: Vec<(usize, f64)> = (0..ncol)
                .filter(|_| rng.gen_bool(dens))
                .map(|j| (j, 1.0))
                .collect();
            if !s.is_empty() {
                break s;
            }
        };
        lp.add_row(format!("c{i}"), 1.0, INF, &support).unwrap();
    }
    lp
}

fn facility_location(rng: &mut ChaCha8Rng, m: usize, n: usize, ratio: f64) -> LpProblem {
    // Customers and facilities on the unit square.
    let cust: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen(), rng.gen())).collect();
    let fac: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let demand: Vec<f64> = (0..m).map(|_| rng.gen_range(5..=35) as f64).collect();
    let raw_cap: Vec<f64> = (0..n).map(|_| rng.gen_range(10..=160) as f64).collect();
    let total_d: f64 = demand.iter().sum();
    let scale = ratio * total_d / raw_cap.iter().sum::<f64>();
    let cap: Vec<f64> = raw_cap.iter().map(|s| (s * scale).round().max(1.0)).collect();
    let mut lp = LpProblem::new("");
    let mut y = Vec::with_capacity(n);
    for (j, s) in cap.iter().enumerate() {
        let fixed = (rng.gen_range(100..=110) as f64 * s.sqrt() + rng.gen_range(0..=90) as f64).round();
        y.push(lp.add_col(format!("y{j}"), fixed, 0.0, 1.0).unwrap());
    }
    let mut x = vec![vec![0usize; n]; m];
    for i in 0..m {
        for j in 0..n {
            let (dx, dy) = (cust[i].0 - fac[j].0, cust[i].1 - fac[j].1);
            let c = ((dx * dx + dy * dy).sqrt() * 10.0 * demand[i]).round();
            x[i][j] = lp.add_col(format!("x{i}_{j}"), c, 0.0, 1.0).unwrap();
        }
    }
    for i in 0..m {
        let e: Vec<(usize, f64)> = (0..n).map(|j| (x[i][j], 1.0)).collect();
        lp.add_row(format!("demand{i}"), 1.0, 1.0, &e).unwrap();
    }
    for j in 0..n {
        let mut e: Vec<(usize, f64)> = (0..m).map(|i| (x[i][j], demand[i])).collect();
        e.push((y[j], -cap[j]));
        lp.add_row(format!("cap{j}"), -INF, 0.0, &e).unwrap();
    }
    let e: Vec<(usize, f64)> = (0..n).map(|j| (y[j], cap[j])).collect();
    lp.add_row("total", total_d, INF, &e).unwrap();
    for i in 0..m {
        for j in 0..n {
            lp.add_row(format!("open{i}_{j}"), -INF, 0.0, &[(x[i][j], 1.0), (y[j], -1.0)])
                .unwrap();
        }
    }
    lp
}

fn multicommodity_flow(rng: &mut ChaCha8Rng, n: usize) -> LpProblem {
    // Ring arcs in both directions plus random chords.
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for v in 0..n {
        arcs.push((v, (v + 1) % n));
        arcs.push(((v + 1) % n, v));
    }
    for _ in 0..n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !arcs.contains(&(a, b)) {
            arcs.push((a, b));
        }
    }
    let k = n;
    let commodities: Vec<(usize, usize, f64)> = (0..k)
        .map(|_| {
            let o = rng.gen_range(0..n);
            let mut d = rng.gen_range(0..n - 1);
            if d >= o {
                d += 1;
            }
            (o, d, rng.gen_range(1..=10) as f64)
        })
        .collect();
    let total: f64 = commodities.iter().map(|c| c.2).sum();
    let mut lp = LpProblem::new("");
    let mut flow = vec![vec![0usize; k]; arcs.len()];
    let mut open = Vec::with_capacity(arcs.len());
    for (a, &(s, t)) in arcs.iter().enumerate() {
        let f = rng.gen_range(10..=100) as f64;
        open.push(lp.add_col(format!("y{s}_{t}"), f, 0.0, 1.0).unwrap());
        for (c, com) in commodities.iter().enumerate() {
            let cost = rng.gen_range(1..=10) as f64;
            flow[a][c] = lp.add_col(format!("x{s}_{t}_{c}"), cost, 0.0, com.2).unwrap();
        }
    }
    for (c, &(o, d, q)) in commodities.iter().enumerate() {
        for v in 0..n {
            let mut e = Vec::new();
            for (a, &(s, t)) in arcs.iter().enumerate() {
                if s == v {
                    e.push((flow[a][c], 1.0));
                } else if t == v {
                    e.push((flow[a][c], -1.0));
                }
            }
            let rhs = if v == o {
                q
            } else if v == d {
                -q
            } else {
                0.0
            };
            lp.add_row(format!("flow{v}_{c}"), rhs, rhs, &e).unwrap();
        }
    }
    for (a, &(s, t)) in arcs.iter().enumerate() {
        // Ring arcs alone can carry every commodity clockwise.
        let cap = if a < 2 * n {
            total
        } else {
            (total * rng.gen_range(0.2..=1.0)).round().max(1.0)
        };
        let mut e: Vec<(usize, f64)> = (0..k).map(|c| (flow[a][c], 1.0)).collect();
        e.push((open[a], -cap));
        lp.add_row(format!("cap{s}_{t}"), -INF, 0.0, &e).unwrap();
    }
    lp
}

fn generalized_network_flow(
    rng: &mut ChaCha8Rng,
    nodes: usize,
    nsorc: usize,
    nsink: usize,
    arcs_wanted: usize,
) -> LpProblem {
    let sources: Vec<usize> = (0..nsorc).collect();
    let sinks: Vec<usize> = (nsorc..nsorc + nsink).collect();
    let trans: Vec<usize> = (nsorc + nsink..nodes).collect();
    let mut arcs: Vec<(usize, usize, f64)> = Vec::new();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut add_arc = |arcs: &mut Vec<(usize, usize, f64)>, rng: &mut ChaCha8Rng, s: usize, t: usize| -> usize {
        *index.entry((s, t)).or_insert_with(|| {
            arcs.push((s, t, rng.gen_range(70..=100) as f64 / 100.0));
            arcs.len() - 1
        })
    };
    // Each sink is reached from a source through a short path carrying the
    // reference flow.
    let mut x0: Vec<f64> = Vec::new();
    let mut demand = vec![0.0; nodes];
    let mut supply_used = vec![0.0; nodes];
    for &t in &sinks {
        let d = rng.gen_range(10..=100) as f64;
        demand[t] = d;
        let s = *sources.choose(rng).unwrap();
        let hops = rng.gen_range(1..=3).min(trans.len());
        let mut path = vec![s];
        for _ in 0..hops {
            path.push(*trans.choose(rng).unwrap());
        }
        path.push(t);
        path.dedup();
        // Walk backwards: flow out of arc = gain · flow in.
        let mut need = d;
        for w in path.windows(2).rev() {
            let a = add_arc(&mut arcs, rng, w[0], w[1]);
            if x0.len() < arcs.len() {
                x0.resize(arcs.len(), 0.0);
            }
            let inflow = need / arcs[a].2;
            x0[a] += inflow;
            need = inflow;
        }
        supply_used[s] += need;
    }
    let mut attempts = 0;
    while arcs.len() < arcs_wanted && attempts < arcs_wanted * 20 {
        attempts += 1;
        let s = rng.gen_range(0..nodes);
        let t = rng.gen_range(0..nodes);
        if s != t && !sinks.contains(&s) && !sources.contains(&t) {
            add_arc(&mut arcs, rng, s, t);
        }
    }
    x0.resize(arcs.len(), 0.0);
    let mut lp = LpProblem::new("");
    let cols: Vec<usize> = arcs
        .iter()
        .enumerate()
        .map(|(a, &(s, t, _))| {
            let cost = rng.gen_range(1..=20) as f64;
            let cap = (x0[a] * rng.gen_range(1.0..=2.0) + rng.gen_range(0..=10) as f64).ceil();
            lp.add_col(format!("f{s}_{t}"), cost, 0.0, cap.max(1.0)).unwrap()
        })
        .collect();
    for v in 0..nodes {
        // Net inflow g·x_in − x_out.
        let mut e = Vec::new();
        for (a, &(s, t, g)) in arcs.iter().enumerate() {
            if t == v {
                e.push((cols[a], g));
            } else if s == v {
                e.push((cols[a], -1.0));
            }
        }
        if sources.contains(&v) {
            let supply = (supply_used[v] * rng.gen_range(1.0..=1.5)).ceil() + 1.0;
            lp.add_row(format!("src{v}"), -supply, INF, &e).unwrap();
        } else if sinks.contains(&v) {
            lp.add_row(format!("snk{v}"), demand[v], INF, &e).unwrap();
        } else {
            lp.add_row(format!("node{v}"), 0.0, 0.0, &e).unwrap();
        }
    }
    lp
}

fn redundancy_heavy(
    rng: &mut ChaCha8Rng,
    nrow: usize,
    ncol: usize,
    dens: f64,
    dup_frac: f64,
    fixed_frac: f64,
) -> LpProblem {
    let x0: Vec<f64> = (0..ncol).map(|_| rng.gen_range(0..=4) as f64).collect();
    let mut lp = LpProblem::new("");
    let nfixed = (fixed_frac * ncol as f64).round() as usize;
    let mut order: Vec<usize> = (0..ncol).collect();
    order.shuffle(rng);
    let fixed: Vec<bool> = {
        let mut f = vec![false; ncol];
        for &j in &order[..nfixed] {
            f[j] = true;
        }
        f
    };
    for j in 0..ncol {
        let c = rng.gen_range(1..=10) as f64 * if rng.gen_bool(0.3) { -1.0 } else { 1.0 };
        let (l, u) = if fixed[j] { (x0[j], x0[j]) } else { (0.0, 8.0) };
        lp.add_col(format!("x{j}"), c, l, u).unwrap();
    }
    let mut base: Vec<(Vec<(usize, f64)>, f64, f64)> = Vec::new();
    for i in 0..nrow {
        let mut e: Vec<(usize, f64)> = (0..ncol)
            .filter(|_| rng.gen_bool(dens))
            .map(|j| (j, 0.0))
            .collect();
        while e.len() < 2 {
            let j = rng.gen_range(0..ncol);
            if !e.iter().any(|&(k, _)| k == j) {
                e.push((j, 0.0));
            }
        }
        e.sort_by_key(|&(j, _)| j);
        for v in e.iter_mut() {
            v.1 = rng.gen_range(1..=5) as f64 * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        }
        let r: f64 = e.iter().map(|&(j, a)| a * x0[j]).sum();
        let (l, u) = match rng.gen_range(0..3) {
            0 => (r, r),
            1 => (-INF, r + rng.gen_range(0..=3) as f64),
            _ => (r - rng.gen_range(0..=3) as f64, INF),
        };
        lp.add_row(format!("r{i}"), l, u, &e).unwrap();
        base.push((e, l, u));
    }
    let ndup = (dup_frac * nrow as f64).round() as usize;
    for k in 0..ndup {
        let (e, l, u) = &base[rng.gen_range(0..base.len())];
        let alpha = [2.0, 3.0, -1.0, -2.0][rng.gen_range(0..4)];
        let scaled: Vec<(usize, f64)> = e.iter().map(|&(j, a)| (j, alpha * a)).collect();
        let (sl, su) = if alpha > 0.0 {
            (alpha * l, alpha * u)
        } else {
            (alpha * u, alpha * l)
        };
        lp.add_row(format!("d{k}"), sl, su, &scaled).unwrap();
    }
    lp
}

/// One line of a corpus manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub index: u64,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: GenSpec,
    /// Coefficient distributions used by the family.
    pub distributions: String,
    pub instances: Vec<ManifestEntry>,
}

pub fn distributions(family: &Family) -> &'static str {
    match family {
        Family::SetCovering { .. } => {
            "a_ij ~ Bernoulli(dens) with empty rows redrawn; c_j ~ U{1..max_coef}; x in [0,1]"
        }
        Family::FacilityLocation { .. } => {
            "points ~ U[0,1]^2; demand ~ U{5..35}; capacity ~ U{10..160} scaled to ratio; \
             fixed cost ~ U{100..110}*sqrt(cap)+U{0..90}; transport = 10*dist*demand"
        }
        Family::MulticommodityFlow { .. } => {
            "bidirectional ring plus n random chords; n commodities with demand ~ U{1..10}; \
             arc cost ~ U{1..10}; fixed cost ~ U{10..100}; chord capacity ~ U[0.2,1]*total demand"
        }
        Family::GeneralizedNetworkFlow { .. } => {
            "counts jittered by U[0.9,1.1]; gains ~ U{0.70..1.00}; demand ~ U{10..100}; \
             cost ~ U{1..20}; capacity = reference flow*U[1,2]+U{0..10}"
        }
        Family::RedundancyHeavy { .. } => {
            "a_ij ~ Bernoulli(dens)*U{±1..5}; x0 ~ U{0..4}; scaled duplicate rows alpha in {2,3,-1,-2}; \
             fixed_frac of columns fixed at x0"
        }
    }
}
