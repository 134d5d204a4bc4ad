//! The multiple-operator search loop.
//!
//! Each round runs a descent phase (`O1`, `O2`) to a local optimum, then a
//! diversified phase (`O3` with probability `rho`, otherwise `O4`) under a
//! tabu list until it beats that local optimum or spends `omega` moves.
//! After more than `xi` consecutive rounds without a new best, `O5` perturbs
//! the incumbent with `gamma` random transfers.
//!
//! A run draws all randomness from one ChaCha8 generator seeded with
//! `SearchParams::seed`, in program order: initial assignment and repair,
//! then per step the operator tie-breaks, `O2` edge samples, the `rho` draw
//! before each diversified move, tenure draws after it, `O4` subset pairs
//! and `O5` picks. Identical parameters and an iteration budget therefore
//! reproduce a run exactly.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moves::{
    apply_move, op1_select, op2_select, op3_select, op4_select, op4_select_tabu, op5_apply, Move,
    MoveKind,
};
use crate::partition::{random_initial, Partition};
use crate::state::SearchState;
use crate::tabu::TabuList;

/// How the descent phase combines `O1` and `O2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentStrategy {
    /// `O1` until exhausted, then one `O2` move, repeated (`O1+O2`).
    Sequential,
    /// `O1` alone.
    O1Only,
    /// The better of the `O1` and `O2` candidates at every step (`O1∪O2`).
    Union,
    /// `O1` or `O2` with equal probability at every step (`rand(O1,O2)`).
    RandomMix,
}

impl DescentStrategy {
    pub const ALL: [DescentStrategy; 4] = [
        DescentStrategy::O1Only,
        DescentStrategy::Union,
        DescentStrategy::RandomMix,
        DescentStrategy::Sequential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DescentStrategy::Sequential => "sequential",
            DescentStrategy::O1Only => "o1_only",
            DescentStrategy::Union => "union",
            DescentStrategy::RandomMix => "random_mix",
        }
    }
}

impl std::str::FromStr for DescentStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown descent strategy '{s}'")))
    }
}

/// Fraction of edges `O2` examines per call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EdgeSampling {
    /// `0.1 / d` with `d` the maximum degree.
    InverseMaxDegree,
    Fraction(f64),
    /// Scan every edge.
    All,
}

impl EdgeSampling {
    pub fn fraction(self, g: &Graph) -> Option<f64> {
        match self {
            EdgeSampling::InverseMaxDegree if g.max_degree() > 0 => {
                Some(0.1 / g.max_degree() as f64)
            }
            EdgeSampling::InverseMaxDegree => None,
            EdgeSampling::Fraction(f) => Some(f),
            EdgeSampling::All => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub k: usize,
    /// Maximum number of diversified moves per phase.
    pub omega: u64,
    /// Consecutive non-improving rounds tolerated before perturbation.
    pub xi: u64,
    /// Probability of choosing `O3` over `O4` in the diversified phase.
    pub rho: f64,
    /// Whether `O4` obeys the tabu list (with aspiration) like `O3`.
    /// Without it, `O4` alone drifts along zero-gain swaps.
    pub o4_tabu: bool,
    /// Perturbation strength as a fraction of `n`.
    pub gamma_fraction: f64,
    pub phi: EdgeSampling,
    /// Tabu tenure bounds; `None` uses `[3, max(3, n / 10)]`.
    pub tenure: Option<(u64, u64)>,
    pub time_limit: Duration,
    /// Cap on applied single transfers; makes a run fully reproducible.
    pub max_iterations: Option<u64>,
    pub target_objective: Option<i64>,
    pub seed: u64,
    pub descent: DescentStrategy,
    pub record_trace: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            k: 2,
            omega: 500,
            xi: 1000,
            rho: 0.5,
            o4_tabu: true,
            gamma_fraction: 0.1,
            phi: EdgeSampling::InverseMaxDegree,
            tenure: None,
            time_limit: Duration::from_secs(1800),
            max_iterations: None,
            target_objective: None,
            seed: 1,
            descent: DescentStrategy::Sequential,
            record_trace: false,
        }
    }
}

impl SearchParams {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.k < 2 || self.k > g.n() {
            return Err(Error::InvalidK {
                k: self.k,
                n: g.n(),
            });
        }
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.omega < 1 {
            return bad("omega must be at least 1".into());
        }
        if self.xi < 1 {
            return bad("xi must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [0, 1], got {}", self.rho));
        }
        if !(self.gamma_fraction > 0.0 && self.gamma_fraction <= 1.0) {
            return bad(format!(
                "gamma fraction must lie in (0, 1], got {}",
                self.gamma_fraction
            ));
        }
        if let EdgeSampling::Fraction(f) = self.phi {
            if !(f > 0.0 && f <= 1.0) {
                return bad(format!("phi must lie in (0, 1], got {f}"));
            }
        }
        if let Some((lo, hi)) = self.tenure {
            if lo < 1 || lo > hi {
                return bad(format!("invalid tenure bounds [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    /// Number of random transfers per perturbation, at least one.
    pub fn gamma(&self, n: usize) -> usize {
        ((self.gamma_fraction * n as f64).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub elapsed: f64,
    pub iteration: u64,
    pub f_best: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_partition: Partition,
    pub f_best: i64,
    /// Seconds from the start of the run until `f_best` was first reached.
    pub time_to_best: f64,
    pub iterations_to_best: u64,
    pub total_iterations: u64,
    pub rounds: u64,
    pub perturbations: u64,
    /// Wall-clock seconds of the whole run.
    pub elapsed: f64,
    pub trace: Vec<TracePoint>,
}

/// Best solution seen so far plus the stop criteria of a run.
#[derive(Debug, Clone)]
pub struct Tracker {
    start: Instant,
    time_limit: Duration,
    max_iterations: Option<u64>,
    target: Option<i64>,
    best: Partition,
    f_best: i64,
    time_to_best: f64,
    iterations_to_best: u64,
    trace: Option<Vec<TracePoint>>,
    polls: u32,
    stopped: bool,
}

/// Wall clock is read once per this many polls inside a phase.
const CLOCK_STRIDE: u32 = 64;

impl Tracker {
    fn new(s: &SearchState<'_>, params: &SearchParams) -> Self {
        let mut t = Tracker {
            start: Instant::now(),
            time_limit: params.time_limit,
            max_iterations: params.max_iterations,
            target: params.target_objective,
            best: s.partition().clone(),
            f_best: s.objective(),
            time_to_best: 0.0,
            iterations_to_best: 0,
            trace: params.record_trace.then(Vec::new),
            polls: 0,
            stopped: false,
        };
        t.push_trace(0);
        t
    }

    pub fn f_best(&self) -> i64 {
        self.f_best
    }

    pub fn best(&self) -> &Partition {
        &self.best
    }

    fn push_trace(&mut self, iteration: u64) {
        let (elapsed, f_best) = (self.time_to_best, self.f_best);
        if let Some(trace) = &mut self.trace {
            trace.push(TracePoint {
                elapsed,
                iteration,
                f_best,
            });
        }
    }

    /// Records the incumbent if it beats the best so far.
    #[inline]
    pub fn observe(&mut self, s: &SearchState<'_>) {
        if s.objective() > self.f_best {
            self.f_best = s.objective();
            self.best.clone_from(s.partition());
            self.time_to_best = self.start.elapsed().as_secs_f64();
            self.iterations_to_best = s.iter();
            self.push_trace(s.iter());
        }
    }

    /// Polled between moves; reads the clock only every few calls.
    #[inline]
    pub fn should_stop(&mut self, s: &SearchState<'_>) -> bool {
        self.polls = self.polls.wrapping_add(1);
        self.check(s, self.polls.is_multiple_of(CLOCK_STRIDE))
    }

    /// Full check including the clock, used at the head of each round.
    pub fn should_stop_now(&mut self, s: &SearchState<'_>) -> bool {
        self.check(s, true)
    }

    fn check(&mut self, s: &SearchState<'_>, read_clock: bool) -> bool {
        if self.stopped {
            return true;
        }
        let hit_target = self.target.is_some_and(|t| self.f_best >= t);
        let hit_iterations = self.max_iterations.is_some_and(|m| s.iter() >= m);
        let hit_time = read_clock && self.start.elapsed() >= self.time_limit;
        self.stopped = hit_target || hit_iterations || hit_time;
        self.stopped
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub single_moves: u64,
    pub double_moves: u64,
}

impl PhaseStats {
    pub fn moves(&self) -> u64 {
        self.single_moves + self.double_moves
    }

    fn count(&mut self, mv: &Move) {
        match mv.kind() {
            MoveKind::Single => self.single_moves += 1,
            MoveKind::Double => self.double_moves += 1,
        }
    }
}

/// One search run over a graph.
pub struct Moh<'g> {
    state: SearchState<'g>,
    tabu: TabuList,
    rng: ChaCha8Rng,
    params: SearchParams,
    phi: Option<f64>,
    tracker: Tracker,
}

impl<'g> Moh<'g> {
    /// Seeds the generator and draws the random initial solution.
    pub fn new(graph: &'g Graph, params: SearchParams) -> Result<Self> {
        params.validate(graph)?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let initial = random_initial(graph, params.k, &mut rng)?;
        Ok(Self::assemble(graph, initial, params, rng))
    }

    /// Starts from a given partition instead of a random one.
    pub fn with_partition(
        graph: &'g Graph,
        partition: Partition,
        params: SearchParams,
    ) -> Result<Self> {
        params.validate(graph)?;
        if partition.k() != params.k {
            return Err(Error::InvalidParams(format!(
                "partition has k={} but parameters ask for k={}",
                partition.k(),
                params.k
            )));
        }
        if partition.n() != graph.n() {
            return Err(Error::LengthMismatch {
                expected: graph.n(),
                got: partition.n(),
            });
        }
        let rng = ChaCha8Rng::seed_from_u64(params.seed);
        Ok(Self::assemble(graph, partition, params, rng))
    }

    fn assemble(
        graph: &'g Graph,
        partition: Partition,
        params: SearchParams,
        rng: ChaCha8Rng,
    ) -> Self {
        let state = SearchState::new(graph, partition);
        let tabu = match params.tenure {
            Some((lo, hi)) => TabuList::with_tenure(graph.n(), params.k, lo, hi),
            None => TabuList::new(graph.n(), params.k),
        };
        let phi = params.phi.fraction(graph);
        let tracker = Tracker::new(&state, &params);
        Moh {
            state,
            tabu,
            rng,
            params,
            phi,
            tracker,
        }
    }

    pub fn state(&self) -> &SearchState<'g> {
        &self.state
    }

    pub fn tracker(&self) -> &Tracker {
        &self.tracker
    }

    pub fn tabu(&self) -> &TabuList {
        &self.tabu
    }

    /// Applies improving `O1`/`O2` moves until none remains, following the
    /// configured strategy. Afterwards no single transfer has positive gain
    /// unless the run's budget ran out midway.
    pub fn descent_phase(&mut self) -> PhaseStats {
        let mut stats = PhaseStats::default();
        let Moh {
            state: s,
            rng,
            phi,
            tracker,
            params,
            ..
        } = self;
        let phi = *phi;
        let apply = |s: &mut SearchState<'_>, mv: Move, stats: &mut PhaseStats| {
            apply_move(s, &mv);
            stats.count(&mv);
        };
        match params.descent {
            DescentStrategy::Sequential => loop {
                while let Some(mv) = op1_select(s, rng) {
                    apply(s, mv, &mut stats);
                    if tracker.should_stop(s) {
                        break;
                    }
                }
                if tracker.should_stop(s) {
                    break;
                }
                match op2_select(s, rng, phi) {
                    Some(mv) => apply(s, mv, &mut stats),
                    None => break,
                }
            },
            DescentStrategy::O1Only => {
                while let Some(mv) = op1_select(s, rng) {
                    apply(s, mv, &mut stats);
                    if tracker.should_stop(s) {
                        break;
                    }
                }
            }
            DescentStrategy::Union => loop {
                let single = op1_select(s, rng);
                let double = op2_select(s, rng, phi);
                let mv = match (single, double) {
                    (Some(a), Some(b)) if b.gain > a.gain => b,
                    (Some(a), Some(b)) if b.gain == a.gain => {
                        if rng.gen_bool(0.5) {
                            a
                        } else {
                            b
                        }
                    }
                    (Some(a), _) => a,
                    (None, Some(b)) => b,
                    (None, None) => break,
                };
                apply(s, mv, &mut stats);
                if tracker.should_stop(s) {
                    break;
                }
            },
            DescentStrategy::RandomMix => loop {
                let first_o1 = rng.gen_bool(0.5);
                let mv = if first_o1 {
                    op1_select(s, rng).or_else(|| op2_select(s, rng, phi))
                } else {
                    op2_select(s, rng, phi).or_else(|| op1_select(s, rng))
                };
                match mv {
                    Some(mv) => apply(s, mv, &mut stats),
                    None => break,
                }
                if tracker.should_stop(s) {
                    break;
                }
            },
        }
        tracker.observe(s);
        stats
    }

    /// Tabu-guided `O3`/`O4` moves until the objective exceeds `f_lo` or
    /// more than `omega` moves were made. The tabu list is cleared on exit.
    pub fn diversified_phase(&mut self, f_lo: i64) -> PhaseStats {
        let mut stats = PhaseStats::default();
        let Moh {
            state: s,
            tabu,
            rng,
            params,
            tracker,
            ..
        } = self;
        let mut c_div = 0u64;
        loop {
            let use_o3 = rng.gen::<f64>() < params.rho;
            let mv = if use_o3 {
                None
            } else if params.o4_tabu {
                op4_select_tabu(s, tabu, tracker.f_best(), rng)
            } else {
                op4_select(s, rng)
            };
            let mv = match mv {
                Some(mv) => mv,
                None => match op3_select(s, tabu, tracker.f_best(), rng) {
                    Some(mv) => mv,
                    None => break,
                },
            };
            apply_move(s, &mv);
            stats.count(&mv);
            for t in mv.transfers() {
                tabu.record(t.vertex, t.origin, s.iter(), rng);
            }
            tracker.observe(s);
            c_div += 1;
            if c_div > params.omega || s.objective() > f_lo || tracker.should_stop(s) {
                break;
            }
        }
        tabu.clear();
        stats
    }

    /// Applies `O5` `gamma` times.
    pub fn perturb(&mut self) -> usize {
        let gamma = self.params.gamma(self.state.graph().n());
        for _ in 0..gamma {
            op5_apply(&mut self.state, &mut self.rng);
            self.tracker.observe(&self.state);
        }
        gamma
    }

    /// Runs rounds until the budget is exhausted.
    pub fn run(mut self) -> SearchResult {
        let mut rounds = 0u64;
        let mut perturbations = 0u64;
        let mut non_improving = 0u64;
        let mut credited = self.tracker.f_best();
        while !self.tracker.should_stop_now(&self.state) {
            self.descent_phase();
            let f_lo = self.state.objective();
            // Records reached inside the previous diversified phase count
            // for this round as well.
            if self.tracker.f_best() > credited {
                credited = self.tracker.f_best();
                non_improving = 0;
            } else {
                non_improving += 1;
            }
            if self.tracker.should_stop_now(&self.state) {
                rounds += 1;
                break;
            }
            self.diversified_phase(f_lo);
            rounds += 1;
            if non_improving > self.params.xi {
                self.perturb();
                perturbations += 1;
                non_improving = 0;
            }
        }
        let total_iterations = self.state.iter();
        let elapsed = self.tracker.elapsed();
        let t = self.tracker;
        SearchResult {
            best_partition: t.best,
            f_best: t.f_best,
            time_to_best: t.time_to_best,
            iterations_to_best: t.iterations_to_best,
            total_iterations,
            rounds,
            perturbations,
            elapsed,
            trace: t.trace.unwrap_or_default(),
        }
    }
}

/// Runs one complete search with a random initial solution.
pub fn run_moh(graph: &Graph, params: &SearchParams) -> Result<SearchResult> {
    Ok(Moh::new(graph, params.clone())?.run())
}
