//! Single- and double-transfer moves and the five search operators.
//!
//! * `O1` best single transfer (improving only),
//! * `O2` best double transfer over edge endpoints with nonzero weight,
//! * `O3` best single transfer under a tabu list with aspiration,
//! * `O4` best double transfer into two randomly drawn target subsets,
//! * `O5` random single transfer.

use rand::seq::index;
use rand::Rng;

use crate::state::SearchState;
use crate::tabu::TabuList;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transfer {
    pub vertex: usize,
    pub origin: usize,
    pub target: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Single,
    Double,
}

/// A single or double transfer together with the gain it yields on the
/// state it was selected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub first: Transfer,
    pub second: Option<Transfer>,
    pub gain: i64,
}

impl Move {
    pub fn single(vertex: usize, origin: usize, target: usize, gain: i64) -> Self {
        Move {
            first: Transfer {
                vertex,
                origin,
                target,
            },
            second: None,
            gain,
        }
    }

    pub fn double(first: Transfer, second: Transfer, gain: i64) -> Self {
        debug_assert_ne!(first.vertex, second.vertex);
        Move {
            first,
            second: Some(second),
            gain,
        }
    }

    pub fn kind(&self) -> MoveKind {
        if self.second.is_some() {
            MoveKind::Double
        } else {
            MoveKind::Single
        }
    }

    pub fn transfers(&self) -> impl Iterator<Item = Transfer> {
        std::iter::once(self.first).chain(self.second)
    }
}

/// Applies every transfer of `mv` and returns the realized gain.
pub fn apply_move(s: &mut SearchState<'_>, mv: &Move) -> i64 {
    mv.transfers()
        .map(|t| s.apply_single_transfer(t.vertex, t.target))
        .sum()
}

/// Interaction coefficient of a double transfer `u: cu -> tu`, `v: cv -> tv`
/// on the edge `{u, v}`:
/// `-[cu = cv] + [tu = cv] - [tu = tv] + [cu = tv]`.
///
/// # Panics
/// If either target equals its origin.
#[inline]
pub fn psi(cu: usize, cv: usize, tu: usize, tv: usize) -> i64 {
    assert!(
        tu != cu && tv != cv,
        "double transfer with a target equal to its origin"
    );
    -((cu == cv) as i64) + (tu == cv) as i64 - (tu == tv) as i64 + (cu == tv) as i64
}

/// Gain of moving `u` to `tu` and `v` to `tv` together.
///
/// # Panics
/// If `u == v` or a target equals the vertex's current subset.
pub fn combined_gain(s: &SearchState<'_>, u: usize, tu: usize, v: usize, tv: usize) -> i64 {
    assert_ne!(u, v, "double transfer of a single vertex");
    let (cu, cv) = (s.subset_of(u), s.subset_of(v));
    let w = s.graph().weight(u, v);
    s.gain(u, tu).expect("target of u equals its subset")
        + s.gain(v, tv).expect("target of v equals its subset")
        + psi(cu, cv, tu, tv) * w
}

/// Reservoir over tied maxima: keeps one candidate drawn uniformly among all
/// candidates with the best score, where a candidate may stand for a group
/// of `weight` equally scored moves.
struct TieBreak<T> {
    best: i64,
    total: usize,
    chosen: Option<T>,
}

impl<T> TieBreak<T> {
    fn new() -> Self {
        TieBreak {
            best: i64::MIN,
            total: 0,
            chosen: None,
        }
    }

    #[inline]
    fn offer<R: Rng + ?Sized>(
        &mut self,
        score: i64,
        weight: usize,
        item: impl FnOnce() -> T,
        rng: &mut R,
    ) {
        if weight == 0 || score < self.best {
            return;
        }
        if score > self.best {
            self.best = score;
            self.total = weight;
            self.chosen = Some(item());
        } else {
            self.total += weight;
            if rng.gen_range(0..self.total) < weight {
                self.chosen = Some(item());
            }
        }
    }

    fn into_best(self) -> Option<(i64, T)> {
        self.chosen.map(|c| (self.best, c))
    }
}

/// `O1`: a best single transfer, only if it strictly improves.
pub fn op1_select<R: Rng + ?Sized>(s: &mut SearchState<'_>, rng: &mut R) -> Option<Move> {
    let (v, t, gain) = s.best_single_transfer(rng)?;
    (gain > 0).then(|| Move::single(v, s.subset_of(v), t, gain))
}

/// `O2`: a best improving double transfer over endpoints of edges with
/// nonzero weight. With `phi = Some(f)`, only `ceil(f * |E|)` edges drawn
/// uniformly without replacement are examined; `None` scans every edge.
pub fn op2_select<R: Rng + ?Sized>(
    s: &mut SearchState<'_>,
    rng: &mut R,
    phi: Option<f64>,
) -> Option<Move> {
    let g = s.graph();
    let m = g.m();
    let k = s.k();
    let mut ties = TieBreak::new();
    let scan = |e: &crate::graph::Edge, ties: &mut TieBreak<(Transfer, Transfer)>, rng: &mut R| {
        if e.w == 0 {
            return;
        }
        let (cu, cv) = (s.subset_of(e.u), s.subset_of(e.v));
        for tu in (0..k).filter(|&t| t != cu) {
            let du = s.gain_unchecked(e.u, tu);
            for tv in (0..k).filter(|&t| t != cv) {
                let gain = du + s.gain_unchecked(e.v, tv) + psi(cu, cv, tu, tv) * e.w;
                if gain > 0 {
                    ties.offer(
                        gain,
                        1,
                        || {
                            (
                                Transfer {
                                    vertex: e.u,
                                    origin: cu,
                                    target: tu,
                                },
                                Transfer {
                                    vertex: e.v,
                                    origin: cv,
                                    target: tv,
                                },
                            )
                        },
                        rng,
                    );
                }
            }
        }
    };
    let sample = phi
        .map(|f| ((f * m as f64).ceil() as usize).max(1))
        .filter(|&c| c < m);
    match sample {
        Some(amount) => {
            for i in index::sample(rng, m, amount).into_iter() {
                scan(&g.edges()[i], &mut ties, rng);
            }
        }
        None => {
            for e in g.edges() {
                scan(e, &mut ties, rng);
            }
        }
    }
    ties.into_best()
        .map(|(gain, (a, b))| Move::double(a, b, gain))
}

/// `O3`: a best single transfer that is either not tabu or aspirates
/// (reaches an objective above `f_best`). Gains may be negative. When every
/// move is tabu and none aspirates, the best tabu move is returned.
pub fn op3_select<R: Rng + ?Sized>(
    s: &mut SearchState<'_>,
    tabu: &TabuList,
    f_best: i64,
    rng: &mut R,
) -> Option<Move> {
    let k = s.k();
    let iter = s.iter();
    let f = s.objective();
    let tops: Vec<Option<i64>> = (0..k).map(|a| s.buckets_mut().top(a)).collect();
    let buckets = s.buckets();
    let floor = -buckets.offset();
    let mut ties = TieBreak::new();
    for (array, top) in tops.iter().enumerate() {
        let Some(top) = *top else { continue };
        let mut gain = top;
        while gain >= floor && gain >= ties.best {
            let mut found = false;
            for v in buckets.cell(array, gain) {
                if !tabu.is_forbidden(v, array, iter) || f + gain > f_best {
                    found = true;
                    ties.offer(gain, 1, || (v, array), rng);
                }
            }
            if found {
                break;
            }
            gain -= 1;
        }
    }
    match ties.into_best() {
        Some((gain, (v, t))) => Some(Move::single(v, s.subset_of(v), t, gain)),
        None => {
            let (v, t, gain) = s.best_single_transfer(rng)?;
            Some(Move::single(v, s.subset_of(v), t, gain))
        }
    }
}

/// Candidate partner class in [`op4_select`]: either one specific neighbor
/// with a nonzero edge, or any of `count` vertices in the bucket of `gain`
/// that share no weighted edge with `u`.
#[derive(Clone, Copy)]
enum Partner {
    Adjacent(usize),
    Detached { gain: i64 },
}

/// Ordered pair of distinct subsets drawn uniformly.
fn target_pair<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (usize, usize) {
    let p = rng.gen_range(0..k);
    let mut q = rng.gen_range(0..k - 1);
    if q >= p {
        q += 1;
    }
    (p, q)
}

/// `O4`: draws an ordered pair of distinct target subsets `(p, q)`
/// uniformly and returns a best double transfer `u -> p`, `v -> q`.
/// Gains may be negative. `None` when no admissible pair exists.
pub fn op4_select<R: Rng + ?Sized>(s: &mut SearchState<'_>, rng: &mut R) -> Option<Move> {
    let (p, q) = target_pair(s.k(), rng);
    best_double_filtered(s, p, q, None, rng)
}

/// `O4` under the tabu list: a double transfer is admissible when neither
/// vertex is forbidden from its target, or when it reaches an objective
/// above `f_best`. `None` when no admissible pair exists.
pub fn op4_select_tabu<R: Rng + ?Sized>(
    s: &mut SearchState<'_>,
    tabu: &TabuList,
    f_best: i64,
    rng: &mut R,
) -> Option<Move> {
    let (p, q) = target_pair(s.k(), rng);
    let filter = TabuFilter {
        tabu,
        iter: s.iter(),
        headroom: f_best - s.objective(),
    };
    best_double_filtered(s, p, q, Some(filter), rng)
}

#[cfg(test)]
fn best_double_into<R: Rng + ?Sized>(
    s: &mut SearchState<'_>,
    p: usize,
    q: usize,
    rng: &mut R,
) -> Option<Move> {
    best_double_filtered(s, p, q, None, rng)
}

#[derive(Clone, Copy)]
struct TabuFilter<'a> {
    tabu: &'a TabuList,
    iter: u64,
    headroom: i64,
}

/// Exact maximizer of the double-transfer gain over admissible `u ∉ S_p`,
/// `v ∉ S_q`, `u != v`, scanning both bucket arrays from the top with the
/// bound `gain(u) + gain(v) + 2 max|w|`.
fn best_double_filtered<R: Rng + ?Sized>(
    s: &mut SearchState<'_>,
    p: usize,
    q: usize,
    filter: Option<TabuFilter<'_>>,
    rng: &mut R,
) -> Option<Move> {
    let top_p = s.buckets_mut().top(p)?;
    let top_q = s.buckets_mut().top(q)?;
    let g = s.graph();
    let slack = 2 * g.max_abs_weight();
    let buckets = s.buckets();
    let floor = -buckets.offset();

    let mut ties: TieBreak<(usize, Partner)> = TieBreak::new();
    let mut excluded: Vec<i64> = Vec::new();
    let mut gp = top_p;
    while gp >= floor {
        if ties.chosen.is_some() && gp + top_q + slack < ties.best {
            break;
        }
        for u in buckets.cell(p, gp) {
            let cu = s.subset_of(u);
            let u_tabu = filter.is_some_and(|f| f.tabu.is_forbidden(u, p, f.iter));
            let v_tabu = |v: usize| filter.is_some_and(|f| f.tabu.is_forbidden(v, q, f.iter));
            let aspires = |gain: i64| filter.is_some_and(|f| gain > f.headroom);

            // Weighted neighbors are scored exactly; their bucket gains are
            // excluded from the detached class below.
            excluded.clear();
            if let Some(gu) = buckets.gain_of(u, q) {
                excluded.push(gu);
            }
            for &(v, w) in g.neighbors(u) {
                if w == 0 {
                    continue;
                }
                let Some(gv) = buckets.gain_of(v, q) else {
                    continue;
                };
                excluded.push(gv);
                let gain = gp + gv + psi(cu, s.subset_of(v), p, q) * w;
                if (u_tabu || v_tabu(v)) && !aspires(gain) {
                    continue;
                }
                ties.offer(gain, 1, || (u, Partner::Adjacent(v)), rng);
            }

            // Best detached partner: highest bucket of q with a vertex that
            // is neither u nor a weighted neighbor of u.
            let mut gq = top_q;
            while gq >= floor && gp + gq >= ties.best {
                let len = buckets.cell_len(q, gq);
                if len > 0 {
                    let free = if filter.is_none() || aspires(gp + gq) {
                        len - excluded.iter().filter(|&&x| x == gq).count()
                    } else if u_tabu {
                        0
                    } else {
                        buckets
                            .cell(q, gq)
                            .filter(|&x| x != u && g.weight(u, x) == 0 && !v_tabu(x))
                            .count()
                    };
                    if free > 0 {
                        ties.offer(gp + gq, free, || (u, Partner::Detached { gain: gq }), rng);
                        break;
                    }
                }
                gq -= 1;
            }
        }
        gp -= 1;
    }

    let (gain, (u, partner)) = ties.into_best()?;
    let v = match partner {
        Partner::Adjacent(v) => v,
        Partner::Detached { gain: gq } => {
            let restricted = filter.is_some_and(|f| gain <= f.headroom);
            let blocked = |x: usize| {
                x == u
                    || g.weight(u, x) != 0
                    || (restricted && filter.is_some_and(|f| f.tabu.is_forbidden(x, q, f.iter)))
            };
            let free = buckets.cell(q, gq).filter(|&x| !blocked(x)).count();
            let r = rng.gen_range(0..free);
            buckets
                .cell(q, gq)
                .filter(|&x| !blocked(x))
                .nth(r)
                .expect("counted above")
        }
    };
    Some(Move::double(
        Transfer {
            vertex: u,
            origin: s.subset_of(u),
            target: p,
        },
        Transfer {
            vertex: v,
            origin: s.subset_of(v),
            target: q,
        },
        gain,
    ))
}

/// `O5`: moves a uniformly drawn vertex to a uniformly drawn other subset.
pub fn op5_apply<R: Rng + ?Sized>(s: &mut SearchState<'_>, rng: &mut R) -> Transfer {
    let v = rng.gen_range(0..s.graph().n());
    let origin = s.subset_of(v);
    let mut target = rng.gen_range(0..s.k() - 1);
    if target >= origin {
        target += 1;
    }
    s.apply_single_transfer(v, target);
    Transfer {
        vertex: v,
        origin,
        target,
    }
}
