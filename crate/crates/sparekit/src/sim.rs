//! Discrete-event simulation of the physical system.
//!
//! The event loop tracks the exact dynamics: sampled lifetimes truncated by
//! the age threshold (the replacement kind is decided when the part is
//! installed, so no clock-inspection events exist), a finite number of
//! exponential repair channels, FCFS or preemptive-priority dispatch, and
//! downtime whenever a replacement finds the shelf empty. Estimates are
//! time averages past warmup; confidence intervals come from independent
//! replications (or batch means on request) with Student-t quantiles.
//!
//! Determinism: every (good, replication) pair gets its own counter-based
//! RNG stream, and repair times are drawn from a separate per-replication
//! stream at service start, so identical configurations and seeds produce
//! bit-identical event traces.

use crate::error::{Error, Result};
use crate::lifetime::LifetimeSpec;
use crate::multi::{Discipline, MultiGoodConfig};
use crate::single::{CostRates, SingleGoodConfig};
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// What to simulate.
#[derive(Debug, Clone)]
pub enum Scenario {
    Single {
        config: SingleGoodConfig,
        costs: CostRates,
    },
    Multi(MultiGoodConfig),
}

/// Simulation run parameters.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scenario: Scenario,
    /// Simulated time per replication.
    pub horizon: f64,
    /// Statistics start after this much time.
    pub warmup: f64,
    pub seed: u64,
    pub replications: u32,
    /// Batch-means mode: single run, this many batches past warmup.
    pub batches: Option<u32>,
    /// Keep the full event trace of replication 0.
    pub collect_trace: bool,
}

impl SimConfig {
    /// Defaults: horizon 1e5, warmup 10%, 25 replications. The replication
    /// count is tuned so the two-state sanity scenario achieves a p_down
    /// half-width under 1e-3.
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            horizon: 1e5,
            warmup: 1e4,
            seed,
            replications: 25,
            batches: None,
            collect_trace: false,
        }
    }
}

/// Point estimate with a 95% half-width.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

/// Per-good simulation output.
#[derive(Debug, Clone)]
pub struct GoodEstimate {
    pub p_down: Estimate,
    /// Time-average parts at the stock point, operating part included.
    pub expected_inventory: Estimate,
    /// Time-average parts on the shelf only.
    pub on_shelf: Estimate,
    pub corrective_rate: Estimate,
    pub preventive_rate: Estimate,
}

/// One event of the optional trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: EventKind,
    pub good: u32,
    pub stock_level: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    CorrectiveReplacement,
    PreventiveReplacement,
    RepairCompletion,
}

impl EventKind {
    pub fn code(self) -> u8 {
        match self {
            EventKind::CorrectiveReplacement => 0,
            EventKind::PreventiveReplacement => 1,
            EventKind::RepairCompletion => 2,
        }
    }
}

/// Simulation estimates for a scenario.
#[derive(Debug, Clone)]
pub struct SimEstimate {
    pub goods: Vec<GoodEstimate>,
    pub total_cost: Estimate,
    pub events_processed: u64,
    /// SHA-256 of the full event stream across replications.
    pub trace_digest: String,
    pub trace: Option<Vec<TraceEvent>>,
    /// Little's-law diagnostic at the repair shop: mean number in the shop
    /// and (arrival rate x mean sojourn), which must agree within noise.
    pub shop_contents: Estimate,
    pub shop_littles_law: Estimate,
}

// normalized internal network description
struct NetGood {
    lifetime: LifetimeSpec,
    threshold: f64,
    stock: u32,
    unplanned_cost: f64,
    downtime_cost: f64,
    stock_cost: f64,
}

struct Net {
    goods: Vec<NetGood>,
    channels: u32,
    repair_rate: f64,
    capacity_cost: f64,
    discipline: Discipline,
}

fn normalize(scenario: &Scenario) -> Result<Net> {
    match scenario {
        Scenario::Single { config, costs } => {
            config.validate()?;
            costs.validate()?;
            Ok(Net {
                goods: vec![NetGood {
                    lifetime: config.lifetime,
                    threshold: config.threshold,
                    stock: config.stock,
                    unplanned_cost: costs.unplanned,
                    downtime_cost: costs.downtime,
                    stock_cost: costs.stock,
                }],
                channels: config.channels,
                repair_rate: config.repair_rate,
                capacity_cost: costs.capacity,
                discipline: Discipline::Fcfs,
            })
        }
        Scenario::Multi(cfg) => {
            cfg.validate()?;
            if cfg.discipline == Discipline::PreemptivePriority && cfg.channels != 1 {
                return Err(Error::Unsupported(
                    "preemptive priority requires a single repair channel".into(),
                ));
            }
            Ok(Net {
                goods: cfg
                    .goods
                    .iter()
                    .map(|g| NetGood {
                        lifetime: g.lifetime,
                        threshold: g.threshold,
                        stock: g.stock,
                        unplanned_cost: g.unplanned_cost,
                        downtime_cost: g.downtime_cost,
                        stock_cost: g.stock_cost,
                    })
                    .collect(),
                channels: cfg.channels,
                repair_rate: cfg.repair_rate,
                capacity_cost: cfg.capacity_cost,
                discipline: cfg.discipline,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Pending {
    Replacement { good: usize, corrective: bool },
    RepairDone { good: usize, token: u64 },
}

struct Event {
    time: f64,
    seq: u64,
    pending: Pending,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // min-heap via reversed comparison; ties break by insertion order
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.seq.cmp(&self.seq))
    }
}

fn sample_lifetime(spec: &LifetimeSpec, rng: &mut ChaCha8Rng) -> f64 {
    match *spec {
        LifetimeSpec::Exponential { rate } => rand_distr::Exp::new(rate).unwrap().sample(rng),
        LifetimeSpec::Gamma { shape, scale } => {
            rand_distr::Gamma::new(shape, scale).unwrap().sample(rng)
        }
        LifetimeSpec::Weibull { shape, scale } => {
            rand_distr::Weibull::new(scale, shape).unwrap().sample(rng)
        }
        LifetimeSpec::Erlang { phases, rate } => {
            // sum of exponentials keeps the draw count per installation fixed
            let mut acc = 0.0;
            for _ in 0..phases {
                acc += rand_distr::Exp::new(rate).unwrap().sample(rng);
            }
            acc
        }
        LifetimeSpec::Degenerate { point } => point,
    }
}

struct GoodRun {
    shelf: u32,
    operating: bool,
    in_shop: u32,
    area_down: f64,
    area_inventory: f64,
    area_shelf: f64,
    corrective: u64,
    preventive: u64,
}

struct QueueEntry {
    good: usize,
    arrived: f64,
}

struct Replication<'a> {
    net: &'a Net,
    now: f64,
    warmup: f64,
    last: f64,
    goods: Vec<GoodRun>,
    // one slot per channel: (good, token, shop-arrival time of the part)
    channels: Vec<Option<(usize, u64, f64)>>,
    // FCFS: single queue in goods[0]'s slot; priority: one queue per class
    queues: Vec<std::collections::VecDeque<QueueEntry>>,
    heap: BinaryHeap<Event>,
    seq: u64,
    token: u64,
    lifetime_rngs: Vec<ChaCha8Rng>,
    repair_rng: ChaCha8Rng,
    area_shop: f64,
    shop_arrivals: u64,
    shop_sojourn: f64,
    events: u64,
    hasher: Sha256,
    trace: Option<Vec<TraceEvent>>,
}

impl<'a> Replication<'a> {
    fn new(net: &'a Net, seed: u64, rep: u32, warmup: f64, collect_trace: bool) -> Self {
        let nqueues = match net.discipline {
            Discipline::Fcfs => 1,
            Discipline::PreemptivePriority => net.goods.len(),
        };
        let mut lifetime_rngs = Vec::with_capacity(net.goods.len());
        for g in 0..net.goods.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((rep as u64) << 20 | (g as u64 + 1));
            lifetime_rngs.push(rng);
        }
        let mut repair_rng = ChaCha8Rng::seed_from_u64(seed);
        repair_rng.set_stream((rep as u64) << 20);
        Self {
            net,
            now: 0.0,
            warmup,
            last: 0.0,
            goods: net
                .goods
                .iter()
                .map(|g| GoodRun {
                    shelf: g.stock.saturating_sub(1),
                    operating: g.stock >= 1,
                    in_shop: 0,
                    area_down: 0.0,
                    area_inventory: 0.0,
                    area_shelf: 0.0,
                    corrective: 0,
                    preventive: 0,
                })
                .collect(),
            channels: vec![None; net.channels as usize],
            queues: (0..nqueues).map(|_| Default::default()).collect(),
            heap: BinaryHeap::new(),
            seq: 0,
            token: 0,
            lifetime_rngs,
            repair_rng,
            area_shop: 0.0,
            shop_arrivals: 0,
            shop_sojourn: 0.0,
            events: 0,
            hasher: Sha256::new(),
            trace: if collect_trace { Some(Vec::new()) } else { None },
        }
    }

    fn schedule(&mut self, time: f64, pending: Pending) {
        self.seq += 1;
        self.heap.push(Event {
            time,
            seq: self.seq,
            pending,
        });
    }

    fn schedule_replacement(&mut self, good: usize) {
        let spec = &self.net.goods[good];
        let x = sample_lifetime(&spec.lifetime, &mut self.lifetime_rngs[good]);
        let (delay, corrective) = if x < spec.threshold {
            (x, true)
        } else {
            (spec.threshold, false)
        };
        self.schedule(self.now + delay, Pending::Replacement { good, corrective });
    }

    fn advance_areas(&mut self, to: f64) {
        let from = self.last.max(self.warmup);
        if to > from {
            let dt = to - from;
            let mut in_shop_total = 0u32;
            for run in self.goods.iter_mut() {
                let level = run.shelf + run.operating as u32;
                if level == 0 {
                    run.area_down += dt;
                }
                run.area_inventory += dt * level as f64;
                run.area_shelf += dt * run.shelf as f64;
                in_shop_total += run.in_shop;
            }
            self.area_shop += dt * in_shop_total as f64;
        }
        self.last = to;
    }

    fn free_channel(&self) -> Option<usize> {
        self.channels.iter().position(Option::is_none)
    }

    fn start_service(&mut self, channel: usize, good: usize, arrived: f64) {
        self.token += 1;
        let token = self.token;
        self.channels[channel] = Some((good, token, arrived));
        let d = rand_distr::Exp::new(self.net.repair_rate).unwrap();
        let t = d.sample(&mut self.repair_rng);
        self.schedule(self.now + t, Pending::RepairDone { good, token });
    }

    /// Part of `good` arrives at the shop at the current time.
    fn shop_arrival(&mut self, good: usize) {
        self.goods[good].in_shop += 1;
        if self.now >= self.warmup {
            self.shop_arrivals += 1;
        }
        if let Some(ch) = self.free_channel() {
            self.start_service(ch, good, self.now);
            return;
        }
        match self.net.discipline {
            Discipline::Fcfs => self.queues[0].push_back(QueueEntry {
                good,
                arrived: self.now,
            }),
            Discipline::PreemptivePriority => {
                // single channel; preempt a lower class if one is in service
                let (srv_good, _, srv_arrived) = self.channels[0].expect("busy channel");
                if srv_good > good {
                    self.channels[0] = None; // cancels the pending completion
                    self.queues[srv_good].push_front(QueueEntry {
                        good: srv_good,
                        arrived: srv_arrived,
                    });
                    self.start_service(0, good, self.now);
                } else {
                    self.queues[good].push_back(QueueEntry {
                        good,
                        arrived: self.now,
                    });
                }
            }
        }
    }

    fn next_queued(&mut self) -> Option<QueueEntry> {
        match self.net.discipline {
            Discipline::Fcfs => self.queues[0].pop_front(),
            Discipline::PreemptivePriority => {
                for q in self.queues.iter_mut() {
                    if let Some(e) = q.pop_front() {
                        return Some(e);
                    }
                }
                None
            }
        }
    }

    fn record(&mut self, kind: EventKind, good: usize) {
        self.events += 1;
        let level = self.goods[good].shelf + self.goods[good].operating as u32;
        self.hasher.update(self.now.to_bits().to_le_bytes());
        self.hasher.update([kind.code()]);
        self.hasher.update((good as u32).to_le_bytes());
        self.hasher.update(level.to_le_bytes());
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEvent {
                time: self.now,
                kind,
                good: good as u32,
                stock_level: level,
            });
        }
    }

    fn check_conservation(&self) {
        for (g, run) in self.goods.iter().enumerate() {
            let queued: u32 = match self.net.discipline {
                Discipline::Fcfs => self.queues[0].iter().filter(|e| e.good == g).count() as u32,
                Discipline::PreemptivePriority => self.queues[g].len() as u32,
            };
            let in_service: u32 = self
                .channels
                .iter()
                .flatten()
                .filter(|(gg, _, _)| *gg == g)
                .count() as u32;
            assert_eq!(
                run.shelf + run.operating as u32 + run.in_shop,
                self.net.goods[g].stock,
                "conservation violated for good {g}"
            );
            assert_eq!(run.in_shop, queued + in_service, "shop bookkeeping for good {g}");
        }
    }

    fn run(&mut self, horizon: f64) {
        self.run_until(horizon);
    }
}

// per-window raw statistics
struct WindowStats {
    p_down: Vec<f64>,
    inventory: Vec<f64>,
    shelf: Vec<f64>,
    corrective_rate: Vec<f64>,
    preventive_rate: Vec<f64>,
    total_cost: f64,
    shop_contents: f64,
    littles: f64,
}

fn window_stats(net: &Net, rep: &Replication<'_>, window: f64) -> WindowStats {
    let mut p_down = Vec::new();
    let mut inventory = Vec::new();
    let mut shelf = Vec::new();
    let mut corr = Vec::new();
    let mut prev = Vec::new();
    let mut tc = net.capacity_cost * net.channels as f64;
    for (g, run) in rep.goods.iter().enumerate() {
        let pd = run.area_down / window;
        let cr = run.corrective as f64 / window;
        p_down.push(pd);
        inventory.push(run.area_inventory / window);
        shelf.push(run.area_shelf / window);
        corr.push(cr);
        prev.push(run.preventive as f64 / window);
        tc += net.goods[g].unplanned_cost * cr
            + net.goods[g].downtime_cost * pd
            + net.goods[g].stock_cost * net.goods[g].stock as f64;
    }
    let arrival_rate = rep.shop_arrivals as f64 / window;
    let mean_sojourn = if rep.shop_arrivals > 0 {
        rep.shop_sojourn / rep.shop_arrivals as f64
    } else {
        0.0
    };
    WindowStats {
        p_down,
        inventory,
        shelf,
        corrective_rate: corr,
        preventive_rate: prev,
        total_cost: tc,
        shop_contents: rep.area_shop / window,
        littles: arrival_rate * mean_sojourn,
    }
}

fn student_t_half_width(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .unwrap()
        .inverse_cdf(0.975);
    t * (var / n as f64).sqrt()
}

fn estimate(samples: &[f64]) -> Estimate {
    Estimate {
        mean: samples.iter().sum::<f64>() / samples.len() as f64,
        half_width: student_t_half_width(samples),
    }
}

/// Runs the simulation and aggregates replication (or batch) statistics.
pub fn simulate(cfg: &SimConfig) -> Result<SimEstimate> {
    let net = normalize(&cfg.scenario)?;
    if !(cfg.horizon > 0.0) || !(cfg.warmup >= 0.0) || cfg.warmup >= cfg.horizon {
        return Err(Error::invalid("horizon", "need 0 <= warmup < horizon"));
    }
    if cfg.replications == 0 {
        return Err(Error::invalid("replications", "need at least one replication"));
    }
    if net.goods.iter().all(|g| g.stock == 0) {
        return Err(Error::Simulation(
            "all goods have zero stock; no events can occur".into(),
        ));
    }
    if let Some(b) = cfg.batches {
        if cfg.replications != 1 {
            return Err(Error::invalid(
                "batches",
                "batch means requires exactly one replication",
            ));
        }
        if b < 2 {
            return Err(Error::invalid("batches", "need at least two batches"));
        }
    }

    let mut windows: Vec<WindowStats> = Vec::new();
    let mut digest = Sha256::new();
    let mut events = 0u64;
    let mut trace = None;

    if let Some(batches) = cfg.batches {
        // one long run, batch means past warmup
        let mut rep = Replication::new(&net, cfg.seed, 0, cfg.warmup, cfg.collect_trace);
        let batch_len = (cfg.horizon - cfg.warmup) / batches as f64;
        // run in segments, snapshotting accumulated areas per batch
        let mut prev_snapshot: Option<WindowStats> = None;
        let mut acc = RunningBatches::default();
        for b in 0..batches {
            let upto = cfg.warmup + (b + 1) as f64 * batch_len;
            rep.run_until(upto);
            let cum = window_stats(&net, &rep, (b + 1) as f64 * batch_len);
            acc.push(&net, &cum, prev_snapshot.as_ref(), (b + 1) as f64);
            prev_snapshot = Some(cum);
        }
        events += rep.events;
        let d = rep.hasher.finalize_reset();
        digest.update(d);
        trace = rep.trace.take();
        windows = acc.into_windows();
    } else {
        for r in 0..cfg.replications {
            let mut rep = Replication::new(&net, cfg.seed, r, cfg.warmup, cfg.collect_trace && r == 0);
            rep.run(cfg.horizon);
            events += rep.events;
            let d = rep.hasher.finalize_reset();
            digest.update(d);
            if r == 0 {
                trace = rep.trace.take();
            }
            windows.push(window_stats(&net, &rep, cfg.horizon - cfg.warmup));
        }
    }

    let n_goods = net.goods.len();
    let collect = |f: &dyn Fn(&WindowStats) -> f64| -> Vec<f64> { windows.iter().map(f).collect() };
    let goods = (0..n_goods)
        .map(|g| GoodEstimate {
            p_down: estimate(&collect(&|w| w.p_down[g])),
            expected_inventory: estimate(&collect(&|w| w.inventory[g])),
            on_shelf: estimate(&collect(&|w| w.shelf[g])),
            corrective_rate: estimate(&collect(&|w| w.corrective_rate[g])),
            preventive_rate: estimate(&collect(&|w| w.preventive_rate[g])),
        })
        .collect();

    Ok(SimEstimate {
        goods,
        total_cost: estimate(&collect(&|w| w.total_cost)),
        events_processed: events,
        trace_digest: hex_string(&digest.finalize()),
        trace,
        shop_contents: estimate(&collect(&|w| w.shop_contents)),
        shop_littles_law: estimate(&collect(&|w| w.littles)),
    })
}

impl<'a> Replication<'a> {
    /// Batch-means support: process events up to `upto`, keeping the heap.
    fn run_until(&mut self, upto: f64) {
        if self.seq == 0 {
            for g in 0..self.net.goods.len() {
                if self.net.goods[g].stock >= 1 {
                    self.schedule_replacement(g);
                }
            }
        }
        while let Some(ev) = self.heap.peek() {
            if ev.time > upto {
                break;
            }
            let ev = self.heap.pop().unwrap();
            self.advance_areas(ev.time);
            self.now = ev.time;
            self.dispatch(ev.pending);
            self.check_conservation();
        }
        self.advance_areas(upto);
        self.now = upto;
    }

    fn dispatch(&mut self, pending: Pending) {
        match pending {
            Pending::Replacement { good, corrective } => {
                self.goods[good].operating = false;
                if self.now >= self.warmup {
                    if corrective {
                        self.goods[good].corrective += 1;
                    } else {
                        self.goods[good].preventive += 1;
                    }
                }
                self.shop_arrival(good);
                if self.goods[good].shelf > 0 {
                    self.goods[good].shelf -= 1;
                    self.goods[good].operating = true;
                    self.schedule_replacement(good);
                }
                self.record(
                    if corrective {
                        EventKind::CorrectiveReplacement
                    } else {
                        EventKind::PreventiveReplacement
                    },
                    good,
                );
            }
            Pending::RepairDone { good, token } => {
                let slot = self
                    .channels
                    .iter()
                    .position(|c| matches!(c, Some((_, t, _)) if *t == token));
                let Some(ch) = slot else {
                    return;
                };
                let (_, _, arrived) = self.channels[ch].take().unwrap();
                if self.now >= self.warmup && arrived >= self.warmup {
                    self.shop_sojourn += self.now - arrived;
                }
                self.goods[good].in_shop -= 1;
                if self.goods[good].operating {
                    self.goods[good].shelf += 1;
                } else {
                    self.goods[good].operating = true;
                    self.schedule_replacement(good);
                }
                if let Some(next) = self.next_queued() {
                    self.start_service(ch, next.good, next.arrived);
                }
                self.record(EventKind::RepairCompletion, good);
            }
        }
    }
}

/// Accumulates per-batch deltas of cumulative statistics.
#[derive(Default)]
struct RunningBatches {
    windows: Vec<WindowStats>,
}

impl RunningBatches {
    fn push(&mut self, _net: &Net, cum: &WindowStats, prev: Option<&WindowStats>, batches: f64) {
        let delta = |cur: f64, prv: f64| batches * cur - (batches - 1.0) * prv;
        let w = match prev {
            None => WindowStats {
                p_down: cum.p_down.clone(),
                inventory: cum.inventory.clone(),
                shelf: cum.shelf.clone(),
                corrective_rate: cum.corrective_rate.clone(),
                preventive_rate: cum.preventive_rate.clone(),
                total_cost: cum.total_cost,
                shop_contents: cum.shop_contents,
                littles: cum.littles,
            },
            Some(p) => WindowStats {
                p_down: zip_with(&cum.p_down, &p.p_down, &delta),
                inventory: zip_with(&cum.inventory, &p.inventory, &delta),
                shelf: zip_with(&cum.shelf, &p.shelf, &delta),
                corrective_rate: zip_with(&cum.corrective_rate, &p.corrective_rate, &delta),
                preventive_rate: zip_with(&cum.preventive_rate, &p.preventive_rate, &delta),
                total_cost: delta(cum.total_cost, p.total_cost),
                shop_contents: delta(cum.shop_contents, p.shop_contents),
                littles: cum.littles, // sojourn-based; keep cumulative
            },
        };
        self.windows.push(w);
    }

    fn into_windows(self) -> Vec<WindowStats> {
        self.windows
    }
}

fn zip_with(a: &[f64], b: &[f64], f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Analytic quantities that have simulation counterparts.
#[derive(Debug, Clone)]
pub struct AnalyticSummary {
    pub p_down: Vec<f64>,
    pub expected_inventory: Vec<f64>,
    pub total_cost: f64,
}

/// Analytic-vs-simulation comparison for one scenario.
#[derive(Debug, Clone)]
pub struct ComparisonRecord {
    /// 100 (analytic - simulated) / simulated on total cost.
    pub tc_pct_diff: f64,
    pub p_down_abs_diff: Vec<f64>,
    pub inventory_abs_diff: Vec<f64>,
    /// Goods whose analytic p_down lies outside the simulator's 95% CI by
    /// more than the stated tolerance.
    pub outside_ci: Vec<usize>,
}

/// Compares analytic output with simulation estimates for the same scenario.
pub fn compare(analytic: &AnalyticSummary, sim: &SimEstimate, tolerance: f64) -> Result<ComparisonRecord> {
    if analytic.p_down.len() != sim.goods.len() {
        return Err(Error::invalid(
            "comparison",
            format!(
                "scenario mismatch: analytic has {} goods, simulation {}",
                analytic.p_down.len(),
                sim.goods.len()
            ),
        ));
    }
    let mut outside = Vec::new();
    let mut pd = Vec::new();
    let mut ei = Vec::new();
    for (g, est) in sim.goods.iter().enumerate() {
        let dp = analytic.p_down[g] - est.p_down.mean;
        let de = analytic.expected_inventory[g] - est.expected_inventory.mean;
        if dp.abs() > est.p_down.half_width + tolerance {
            outside.push(g);
        }
        pd.push(dp.abs());
        ei.push(de.abs());
    }
    Ok(ComparisonRecord {
        tc_pct_diff: 100.0 * (analytic.total_cost - sim.total_cost.mean) / sim.total_cost.mean,
        p_down_abs_diff: pd,
        inventory_abs_diff: ei,
        outside_ci: outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_cfg(seed: u64) -> SimConfig {
        SimConfig::new(
            Scenario::Single {
                config: SingleGoodConfig {
                    stock: 1,
                    channels: 1,
                    threshold: f64::INFINITY,
                    repair_rate: 1.0,
                    lifetime: LifetimeSpec::Exponential { rate: 1.0 },
                },
                costs: CostRates::new(0.0, 20.0, 0.25, 0.5),
            },
            seed,
        )
    }

    #[test]
    fn zero_stock_is_permanent_downtime() {
        let mut cfg = two_state_cfg(7);
        if let Scenario::Single { config, .. } = &mut cfg.scenario {
            config.stock = 0;
        }
        assert!(simulate(&cfg).is_err()); // single good, no events at all
    }

    #[test]
    fn zero_stock_good_in_multi_scenario() {
        use crate::multi::{GoodSpec, MultiGoodConfig};
        let cfg = SimConfig {
            horizon: 200.0,
            warmup: 10.0,
            replications: 2,
            ..SimConfig::new(
                Scenario::Multi(MultiGoodConfig {
                    goods: vec![
                        GoodSpec {
                            lifetime: LifetimeSpec::Exponential { rate: 1.0 },
                            threshold: f64::INFINITY,
                            stock: 1,
                            unplanned_cost: 0.0,
                            downtime_cost: 1.0,
                            stock_cost: 0.0,
                        },
                        GoodSpec {
                            lifetime: LifetimeSpec::Exponential { rate: 1.0 },
                            threshold: f64::INFINITY,
                            stock: 0,
                            unplanned_cost: 0.0,
                            downtime_cost: 1.0,
                            stock_cost: 0.0,
                        },
                    ],
                    channels: 1,
                    repair_rate: 1.0,
                    capacity_cost: 0.0,
                    discipline: Discipline::Fcfs,
                }),
                3,
            )
        };
        let est = simulate(&cfg).unwrap();
        assert_eq!(est.goods[1].p_down.mean, 1.0);
    }

    #[test]
    fn determinism_digest_stable() {
        let mut cfg = two_state_cfg(42);
        cfg.horizon = 500.0;
        cfg.warmup = 50.0;
        cfg.replications = 3;
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a.trace_digest, b.trace_digest);
        assert_eq!(a.total_cost.mean, b.total_cost.mean);
        cfg.seed = 43;
        let c = simulate(&cfg).unwrap();
        assert_ne!(a.trace_digest, c.trace_digest);
    }

    #[test]
    fn two_state_matches_balance_quickly() {
        let mut cfg = two_state_cfg(11);
        cfg.horizon = 20_000.0;
        cfg.warmup = 2_000.0;
        cfg.replications = 5;
        let est = simulate(&cfg).unwrap();
        assert!((est.goods[0].p_down.mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn degenerate_lifetime_is_samplable() {
        let cfg = SimConfig {
            horizon: 500.0,
            warmup: 50.0,
            replications: 2,
            ..SimConfig::new(
                Scenario::Single {
                    config: SingleGoodConfig {
                        stock: 2,
                        channels: 1,
                        threshold: f64::INFINITY,
                        repair_rate: 2.0,
                        lifetime: LifetimeSpec::Degenerate { point: 1.0 },
                    },
                    costs: CostRates::new(1.0, 1.0, 0.0, 0.0),
                },
                5,
            )
        };
        let est = simulate(&cfg).unwrap();
        // every replacement of a degenerate lifetime with tau = inf is corrective
        assert!(est.goods[0].corrective_rate.mean > 0.0);
        assert_eq!(est.goods[0].preventive_rate.mean, 0.0);
    }

    #[test]
    fn batch_means_mode_runs() {
        let mut cfg = two_state_cfg(9);
        cfg.horizon = 10_000.0;
        cfg.warmup = 1_000.0;
        cfg.replications = 1;
        cfg.batches = Some(10);
        let est = simulate(&cfg).unwrap();
        assert!((est.goods[0].p_down.mean - 0.5).abs() < 0.05);
        assert!(est.goods[0].p_down.half_width.is_finite());
    }

    #[test]
    fn compare_flags_scenario_mismatch() {
        let mut cfg = two_state_cfg(3);
        cfg.horizon = 200.0;
        cfg.warmup = 10.0;
        cfg.replications = 2;
        let est = simulate(&cfg).unwrap();
        let bad = AnalyticSummary {
            p_down: vec![0.5, 0.5],
            expected_inventory: vec![0.5, 0.5],
            total_cost: 10.0,
        };
        assert!(compare(&bad, &est, 0.01).is_err());
    }
}
