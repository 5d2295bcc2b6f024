//! The five experiment commands and the exit-code contract.
//!
//! Every command reads a config, evaluates a deterministic grid (in parallel
//! when `workers` > 1, with results buffered and written in grid order), and
//! emits one CSV. Monte Carlo points derive their RNG stream from the grid
//! index alone, so worker count never changes output bytes.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use softbon::blockwise::{compare_symbolwise_blockwise, exact_blockwise_soft_bon, BlockModel};
use softbon::dist::{expected_reward, kl_divergence, tilt, tv_distance};
use softbon::exact::{exact_bon, exact_soft_bon};
use softbon::sampler::{estimate_distribution, RngSeed, SamplerConfig};
use softbon::suite::{block_instances, random_instances};
use softbon::{
    audit, EnumerationBudget, Error as SbError, FiniteDistribution, RewardFunction, Temperature,
};

use crate::config::{ExperimentConfig, Strategy};
use crate::csvout::{fmt_float, fmt_opt, Table};

/// Failure classes with fixed process exit codes: config/io 2, enumeration
/// budget 3, audited bound violation 4.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    Audit(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Audit(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Budget(msg) => write!(f, "budget error: {msg}"),
            CliError::Audit(msg) => write!(f, "audit failure: {msg}"),
        }
    }
}

fn classify(e: SbError) -> CliError {
    match e {
        SbError::EnumerationOverflow { .. } | SbError::AlphabetOverflow { .. } => {
            CliError::Budget(e.to_string())
        }
        other => CliError::Config(other.to_string()),
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn out_path(cfg: &ExperimentConfig, default_name: &str) -> PathBuf {
    cfg.out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name))
}

fn temp(lambda: f64) -> Result<Temperature, CliError> {
    Temperature::new(lambda).map_err(classify)
}

/// Closest tilted distribution to `q` by KL(q ‖ P*_λ): coarse log-λ scan,
/// then golden-section refinement. Returns (kl, λ).
fn nearest_frontier(
    p: &FiniteDistribution,
    r: &RewardFunction,
    q: &FiniteDistribution,
) -> Result<(f64, f64), CliError> {
    let kl_at = |ln_l: f64| -> Result<f64, CliError> {
        let star = tilt(p, r, temp(ln_l.exp())?).map_err(classify)?;
        kl_divergence(q, &star).map_err(classify)
    };
    let (lo, hi) = ((1e-4f64).ln(), (1e4f64).ln());
    let coarse = 160usize;
    let step = (hi - lo) / coarse as f64;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=coarse {
        let v = kl_at(lo + step * i as f64)?;
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    // golden-section: unimodal in ln λ on this family
    const INV_PHI: f64 = 0.6180339887498949;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = kl_at(c)?;
    let mut fd = kl_at(d)?;
    for _ in 0..90 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = kl_at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = kl_at(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let refined = kl_at(x)?;
    if best < refined {
        Ok((best, (lo + step * best_i as f64).exp()))
    } else {
        Ok((refined, x.exp()))
    }
}

const SWEEP_HEADER: [&str; 12] = [
    "strategy",
    "n",
    "lambda",
    "kl_to_base",
    "kl_to_tilted",
    "tv_to_tilted",
    "expected_reward",
    "bound_thm1",
    "bound_sinh",
    "bound_thm3_lhs",
    "bound_thm3_rhs",
    "mode",
];

struct SweepRow {
    strategy: &'static str,
    n: u32,
    lambda: f64,
    kl_to_base: f64,
    kl_to_tilted: f64,
    tv_to_tilted: f64,
    expected_reward: f64,
    bound_thm1: Option<f64>,
    bound_sinh: Option<f64>,
    bound_thm3_lhs: Option<f64>,
    bound_thm3_rhs: Option<f64>,
    mode: &'static str,
}

impl SweepRow {
    fn cells(&self) -> Vec<String> {
        vec![
            self.strategy.to_string(),
            self.n.to_string(),
            fmt_float(self.lambda),
            fmt_float(self.kl_to_base),
            fmt_float(self.kl_to_tilted),
            fmt_float(self.tv_to_tilted),
            fmt_float(self.expected_reward),
            fmt_opt(self.bound_thm1),
            fmt_opt(self.bound_sinh),
            fmt_opt(self.bound_thm3_lhs),
            fmt_opt(self.bound_thm3_rhs),
            self.mode.to_string(),
        ]
    }
}

fn unit_range(r: &RewardFunction) -> bool {
    r.values().iter().all(|&v| (0.0..=1.0).contains(&v))
}

fn bon_row(
    p: &FiniteDistribution,
    r: &RewardFunction,
    n: u32,
) -> Result<SweepRow, CliError> {
    let law = exact_bon(p, r, n).map_err(classify)?;
    let (kl_near, lam_near) = nearest_frontier(p, r, &law)?;
    let star_near = tilt(p, r, temp(lam_near)?).map_err(classify)?;
    Ok(SweepRow {
        strategy: "bon",
        n,
        lambda: 0.0,
        kl_to_base: kl_divergence(&law, p).map_err(classify)?,
        kl_to_tilted: kl_near,
        tv_to_tilted: tv_distance(&law, &star_near).map_err(classify)?,
        expected_reward: expected_reward(&law, r).map_err(classify)?,
        bound_thm1: None,
        bound_sinh: None,
        bound_thm3_lhs: None,
        bound_thm3_rhs: None,
        mode: "exact",
    })
}

#[allow(clippy::too_many_arguments)]
fn soft_row(
    p: &FiniteDistribution,
    r: &RewardFunction,
    n: u32,
    lambda: f64,
    budget: &EnumerationBudget,
    mc_draws: Option<u64>,
    seed: u64,
    point_idx: usize,
    unit: bool,
) -> Result<SweepRow, CliError> {
    let lam = temp(lambda)?;
    let star = tilt(p, r, lam).map_err(classify)?;
    let (law, mode) = match exact_soft_bon(p, r, lam, n, budget) {
        Ok(law) => (law, "exact"),
        Err(e @ SbError::EnumerationOverflow { .. }) => {
            let draws = mc_draws.ok_or_else(|| {
                CliError::Budget(format!(
                    "{e} at strategy=soft_bon n={n} lambda={lambda}; set mc_draws to sample instead"
                ))
            })?;
            let sampler = SamplerConfig::SoftBestOfN {
                dist: p,
                reward: r,
                lam,
                n,
            };
            let emp =
                estimate_distribution(&sampler, draws, RngSeed::new(seed, (point_idx as u64) << 32))
                    .map_err(classify)?;
            let law = FiniteDistribution::new(p.symbols().to_vec(), emp.probs())
                .map_err(classify)?;
            (law, "mc")
        }
        Err(other) => return Err(classify(other)),
    };
    let er_star = expected_reward(&star, r).map_err(classify)?;
    let er_law = expected_reward(&law, r).map_err(classify)?;
    let thm3 = if unit && er_star > 0.0 {
        Some((
            (er_star - er_law) / er_star,
            audit::relative_reward_rhs(p, r, lam, n).map_err(classify)?,
        ))
    } else {
        None
    };
    Ok(SweepRow {
        strategy: "soft_bon",
        n,
        lambda,
        kl_to_base: kl_divergence(&law, p).map_err(classify)?,
        kl_to_tilted: kl_divergence(&star, &law).map_err(classify)?,
        tv_to_tilted: tv_distance(&star, &law).map_err(classify)?,
        expected_reward: er_law,
        bound_thm1: Some(audit::kl_upper_rhs(p, r, lam, n).map_err(classify)?),
        bound_sinh: if unit {
            Some(audit::sinh_upper_rhs(lam, n).map_err(classify)?)
        } else {
            None
        },
        bound_thm3_lhs: thm3.map(|t| t.0),
        bound_thm3_rhs: thm3.map(|t| t.1),
        mode,
    })
}

pub fn cmd_pareto(cfg: &ExperimentConfig, plot_data: bool) -> Result<(), CliError> {
    let (p, r) = cfg.instance().map_err(CliError::Config)?;
    let budget = EnumerationBudget::default();
    let unit = unit_range(&r);
    let pool = pool(cfg.workers)?;

    let mut table = Table::new(&SWEEP_HEADER);
    let mut frontier_rows = Vec::with_capacity(cfg.lambda_grid.len());
    for &lambda in &cfg.lambda_grid {
        let star = tilt(&p, &r, temp(lambda)?).map_err(classify)?;
        frontier_rows.push(SweepRow {
            strategy: "frontier",
            n: 0,
            lambda,
            kl_to_base: kl_divergence(&star, &p).map_err(classify)?,
            kl_to_tilted: 0.0,
            tv_to_tilted: 0.0,
            expected_reward: expected_reward(&star, &r).map_err(classify)?,
            bound_thm1: None,
            bound_sinh: None,
            bound_thm3_lhs: None,
            bound_thm3_rhs: None,
            mode: "exact",
        });
    }

    let bon_rows: Vec<SweepRow> = if cfg.strategies.contains(&Strategy::BestOfN) {
        pool.install(|| {
            cfg.n_grid
                .par_iter()
                .map(|&n| bon_row(&p, &r, n))
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        Vec::new()
    };

    let soft_rows: Vec<SweepRow> = if cfg.strategies.contains(&Strategy::SoftBestOfN) {
        let points: Vec<(usize, u32, f64)> = cfg
            .n_grid
            .iter()
            .flat_map(|&n| cfg.lambda_grid.iter().map(move |&l| (n, l)))
            .enumerate()
            .map(|(i, (n, l))| (i, n, l))
            .collect();
        pool.install(|| {
            points
                .par_iter()
                .map(|&(i, n, l)| soft_row(&p, &r, n, l, &budget, cfg.mc_draws, cfg.seed, i, unit))
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        Vec::new()
    };

    let mut plot = Table::new(&["series", "x", "y"]);
    for row in frontier_rows.iter().chain(&bon_rows).chain(&soft_rows) {
        let series = match row.strategy {
            "frontier" => "frontier".to_string(),
            "bon" => "bon".to_string(),
            _ => format!("soft_bon_n{}", row.n),
        };
        plot.push(vec![
            series,
            fmt_float(row.kl_to_base),
            fmt_float(row.expected_reward),
        ]);
        table.push(row.cells());
    }

    let path = out_path(cfg, "pareto.csv");
    table.write(&path).map_err(CliError::Config)?;
    if plot_data {
        plot.write(&plot_path(&path)).map_err(CliError::Config)?;
    }
    Ok(())
}

fn plot_path(path: &Path) -> PathBuf {
    path.with_extension("plot.csv")
}

const CONVERGENCE_HEADER: [&str; 10] = [
    "kind",
    "lambda",
    "n",
    "kl",
    "tv",
    "bound_thm1",
    "bound_sinh",
    "slope",
    "intercept",
    "r_squared",
];

pub fn cmd_convergence(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let (p, r) = cfg.instance().map_err(CliError::Config)?;
    if cfg.n_grid.len() < 4 {
        return Err(CliError::Config(
            "convergence needs an n_grid with at least 4 points".into(),
        ));
    }
    if cfg.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(
            "convergence needs a strictly increasing n_grid".into(),
        ));
    }
    let budget = EnumerationBudget::default();
    let unit = unit_range(&r);
    let pool = pool(cfg.workers)?;
    let mut table = Table::new(&CONVERGENCE_HEADER);

    for &lambda in &cfg.lambda_grid {
        let lam = temp(lambda)?;
        let star = tilt(&p, &r, lam).map_err(classify)?;
        let points: Vec<(u32, f64, f64)> = pool.install(|| {
            cfg.n_grid
                .par_iter()
                .map(|&n| {
                    let law = exact_soft_bon(&p, &r, lam, n, &budget).map_err(|e| match e {
                        SbError::EnumerationOverflow { .. } => CliError::Budget(format!(
                            "{e} at n={n} lambda={lambda}"
                        )),
                        other => classify(other),
                    })?;
                    Ok((
                        n,
                        kl_divergence(&star, &law).map_err(classify)?,
                        tv_distance(&star, &law).map_err(classify)?,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()
        })?;
        for &(n, kl, tv) in &points {
            table.push(vec![
                "point".into(),
                fmt_float(lambda),
                n.to_string(),
                fmt_float(kl),
                fmt_float(tv),
                fmt_float(audit::kl_upper_rhs(&p, &r, lam, n).map_err(classify)?),
                if unit {
                    fmt_float(audit::sinh_upper_rhs(lam, n).map_err(classify)?)
                } else {
                    String::new()
                },
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        // power-law fits on the strictly positive tail (exact zeros filtered)
        for (kind, select) in [("fit_kl", 1usize), ("fit_tv", 2usize)] {
            let grid: Vec<(u32, f64)> = points
                .iter()
                .map(|&(n, kl, tv)| (n, if select == 1 { kl } else { tv }))
                .filter(|&(_, v)| v > 0.0)
                .collect();
            if grid.len() < 4 {
                continue;
            }
            let fit = audit::fit_rate(&grid).map_err(classify)?;
            table.push(vec![
                kind.into(),
                fmt_float(lambda),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_float(fit.slope),
                fmt_float(fit.intercept),
                fmt_float(fit.r_squared),
            ]);
        }
    }
    table
        .write(&out_path(cfg, "convergence.csv"))
        .map_err(CliError::Config)
}

const AUDIT_HEADER: [&str; 7] = [
    "bound_name",
    "instance_digest",
    "lhs",
    "rhs",
    "margin",
    "holds",
    "note",
];

fn audit_cells(rep: &softbon::BoundReport, note: &str) -> Vec<String> {
    vec![
        rep.bound_name.clone(),
        rep.instance_digest.to_string(),
        fmt_float(rep.lhs),
        fmt_float(rep.rhs),
        fmt_float(rep.margin),
        rep.holds.to_string(),
        note.to_string(),
    ]
}

fn audit_error_cells(bound_name: &str, err: &SbError) -> Vec<String> {
    vec![
        bound_name.to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        "false".to_string(),
        format!("precondition: {err}"),
    ]
}

pub fn cmd_audit(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mut table = Table::new(&AUDIT_HEADER);
    let mut failures: Vec<String> = Vec::new();
    let push = |table: &mut Table, failures: &mut Vec<String>, cells: Vec<String>| {
        if cells[5] != "true" {
            failures.push(format!(
                "{} (digest {}): lhs={} rhs={} {}",
                cells[0], cells[1], cells[2], cells[3], cells[6]
            ));
        }
        table.push(cells);
    };

    let instances = random_instances();
    for rep in softbon::suite::run_symbolwise_bound_suite(&instances, cfg.eps).map_err(classify)? {
        push(&mut table, &mut failures, audit_cells(&rep, "suite"));
    }
    for rep in
        softbon::suite::run_blockwise_bound_suite(&block_instances(), cfg.eps).map_err(classify)?
    {
        push(&mut table, &mut failures, audit_cells(&rep, "suite"));
    }
    let draws = cfg.mc_draws.unwrap_or(100_000);
    for rep in softbon::suite::run_mc_bound_suite(draws, RngSeed::new(cfg.seed, 0))
        .map_err(classify)?
    {
        push(&mut table, &mut failures, audit_cells(&rep, "mc"));
    }

    // optional config-instance section: precondition violations become
    // failure rows rather than aborting the batch
    if cfg.probs.is_some() && cfg.rewards.is_some() {
        let (p, r) = cfg.instance().map_err(CliError::Config)?;
        type AuditFn<'a> =
            (&'static str, Box<dyn Fn(u32, f64) -> Result<softbon::BoundReport, SbError> + 'a>);
        let audits: Vec<AuditFn> = vec![
            (
                "kl_upper",
                Box::new(|n, l| audit::audit_kl_upper(&p, &r, Temperature::new(l)?, n)),
            ),
            (
                "kl_upper_sinh",
                Box::new(|n, l| audit::audit_sinh_upper(&p, &r, Temperature::new(l)?, n)),
            ),
            (
                "relative_reward",
                Box::new(|n, l| audit::audit_relative_reward(&p, &r, Temperature::new(l)?, n)),
            ),
        ];
        for &n in &cfg.n_grid {
            for &lambda in &cfg.lambda_grid {
                for (name, run) in &audits {
                    match run(n, lambda) {
                        Ok(rep) => push(&mut table, &mut failures, audit_cells(&rep, "config")),
                        Err(e @ (SbError::EnumerationOverflow { .. }
                        | SbError::AlphabetOverflow { .. })) => return Err(classify(e)),
                        Err(e) => push(&mut table, &mut failures, audit_error_cells(name, &e)),
                    }
                }
            }
            match audit::audit_lambda_threshold(&p, &r, n, cfg.eps) {
                Ok(rep) => push(&mut table, &mut failures, audit_cells(&rep, "config")),
                Err(e @ (SbError::EnumerationOverflow { .. }
                | SbError::AlphabetOverflow { .. })) => return Err(classify(e)),
                Err(e) => push(
                    &mut table,
                    &mut failures,
                    audit_error_cells("kl_at_lambda_threshold", &e),
                ),
            }
        }
    }

    table
        .write(&out_path(cfg, "audit.csv"))
        .map_err(CliError::Config)?;
    if failures.is_empty() {
        Ok(())
    } else {
        for f in &failures {
            eprintln!("audit failure: {f}");
        }
        Err(CliError::Audit(format!(
            "{} of {} audited bounds failed",
            failures.len(),
            table.render().lines().count() - 1
        )))
    }
}

const BLOCKWISE_HEADER: [&str; 7] = [
    "m",
    "n",
    "lambda_prime",
    "eps",
    "kl_symbolwise",
    "kl_blockwise",
    "matched_n",
];

pub fn cmd_blockwise(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let (p, r) = cfg.instance().map_err(CliError::Config)?;
    let budget = EnumerationBudget::default();
    let pool = pool(cfg.workers)?;
    let points: Vec<(usize, u32, f64)> = (1..=cfg.m)
        .flat_map(|m| {
            cfg.n_grid
                .iter()
                .flat_map(move |&n| cfg.lambda_grid.iter().map(move |&l| (m, n, l)))
        })
        .collect();
    let rows: Vec<Vec<String>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(m, n, lambda)| {
                let block = BlockModel::new(p.clone(), r.clone(), m).map_err(classify)?;
                let cmp = compare_symbolwise_blockwise(&block, temp(lambda)?, n, cfg.eps, &budget)
                    .map_err(|e| match e {
                        SbError::EnumerationOverflow { .. } => CliError::Budget(format!(
                            "{e} at m={m} n={n} lambda_prime={lambda}"
                        )),
                        other => classify(other),
                    })?;
                Ok(vec![
                    m.to_string(),
                    n.to_string(),
                    fmt_float(cmp.lambda_prime),
                    fmt_float(cmp.eps),
                    fmt_float(cmp.kl_symbolwise),
                    fmt_float(cmp.kl_blockwise),
                    fmt_float(cmp.matched_n),
                ])
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let mut table = Table::new(&BLOCKWISE_HEADER);
    for row in rows {
        table.push(row);
    }
    table
        .write(&out_path(cfg, "blockwise.csv"))
        .map_err(CliError::Config)
}

const SAMPLE_HEADER: [&str; 8] = [
    "kind",
    "strategy",
    "n",
    "lambda",
    "symbol",
    "empirical",
    "exact",
    "tv_to_exact",
];

enum SamplePoint {
    Flat(Strategy, u32, f64),
    Block(u32, f64),
}

pub fn cmd_sample(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let (p, r) = cfg.instance().map_err(CliError::Config)?;
    let draws = cfg
        .mc_draws
        .ok_or_else(|| CliError::Config("sample requires mc_draws".into()))?;
    if draws > u32::MAX as u64 {
        return Err(CliError::Config(
            "mc_draws must fit the per-point stream budget (at most 2^32 − 1)".into(),
        ));
    }
    let budget = EnumerationBudget::default();
    let block = if cfg.strategies.contains(&Strategy::Blockwise) {
        Some(BlockModel::new(p.clone(), r.clone(), cfg.m).map_err(classify)?)
    } else {
        None
    };

    let mut points: Vec<SamplePoint> = Vec::new();
    for &strategy in &cfg.strategies {
        match strategy {
            Strategy::BestOfN => {
                points.extend(cfg.n_grid.iter().map(|&n| SamplePoint::Flat(strategy, n, 0.0)));
            }
            Strategy::SoftBestOfN => {
                for &n in &cfg.n_grid {
                    for &l in &cfg.lambda_grid {
                        points.push(SamplePoint::Flat(strategy, n, l));
                    }
                }
            }
            Strategy::Blockwise => {
                for &n in &cfg.n_grid {
                    for &l in &cfg.lambda_grid {
                        points.push(SamplePoint::Block(n, l));
                    }
                }
            }
        }
    }

    let pool = pool(cfg.workers)?;
    let chunks: Vec<Vec<Vec<String>>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(idx, point)| {
                let seed = RngSeed::new(cfg.seed, (idx as u64) << 32);
                let (label, n, lambda, exact, sampler) = match *point {
                    SamplePoint::Flat(strategy, n, lambda) => {
                        let (exact, sampler) = match strategy {
                            Strategy::BestOfN => (
                                exact_bon(&p, &r, n).map_err(classify)?,
                                SamplerConfig::BestOfN {
                                    dist: &p,
                                    reward: &r,
                                    n,
                                },
                            ),
                            Strategy::SoftBestOfN => (
                                exact_soft_bon(&p, &r, temp(lambda)?, n, &budget)
                                    .map_err(classify)?,
                                SamplerConfig::SoftBestOfN {
                                    dist: &p,
                                    reward: &r,
                                    lam: temp(lambda)?,
                                    n,
                                },
                            ),
                            Strategy::Blockwise => unreachable!("block points are typed"),
                        };
                        (strategy.label(), n, lambda, exact, sampler)
                    }
                    SamplePoint::Block(n, lambda) => {
                        let block = block.as_ref().expect("block points imply a block model");
                        let exact = exact_blockwise_soft_bon(block, temp(lambda)?, n, &budget)
                            .map_err(classify)?
                            .flat()
                            .clone();
                        (
                            "blockwise",
                            n,
                            lambda,
                            exact,
                            SamplerConfig::BlockwiseSoftBestOfN {
                                block,
                                lam: temp(lambda)?,
                                n,
                            },
                        )
                    }
                };
                let emp = estimate_distribution(&sampler, draws, seed).map_err(classify)?;
                let tv = emp.tv_to(&exact).map_err(classify)?;
                let emp_probs = emp.probs();
                let mut rows = Vec::with_capacity(exact.len() + 1);
                for (j, symbol) in exact.symbols().iter().enumerate() {
                    rows.push(vec![
                        "mass".into(),
                        label.into(),
                        n.to_string(),
                        fmt_float(lambda),
                        symbol.clone(),
                        fmt_float(emp_probs[j]),
                        fmt_float(exact.prob(j)),
                        String::new(),
                    ]);
                }
                rows.push(vec![
                    "summary".into(),
                    label.into(),
                    n.to_string(),
                    fmt_float(lambda),
                    String::new(),
                    String::new(),
                    String::new(),
                    fmt_float(tv),
                ]);
                Ok(rows)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let mut table = Table::new(&SAMPLE_HEADER);
    for chunk in chunks {
        for row in chunk {
            table.push(row);
        }
    }
    table
        .write(&out_path(cfg, "sample.csv"))
        .map_err(CliError::Config)
}
