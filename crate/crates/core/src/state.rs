//! Incumbent solution with its objective, full single-transfer gain table
//! and bucket arrays, kept coherent under every applied transfer.

use rand::Rng;

use crate::buckets::BucketArrays;
use crate::graph::Graph;
use crate::partition::{evaluate, Partition};

#[derive(Debug, Clone)]
pub struct SearchState<'g> {
    graph: &'g Graph,
    partition: Partition,
    f: i64,
    /// `delta[v * k + x]`: gain of moving `v` to subset `x`. Entries for the
    /// vertex's own subset are kept at 0 and carry no meaning.
    delta: Vec<i64>,
    buckets: BucketArrays,
    iter: u64,
}

/// Gains of every vertex toward every subset, computed from scratch:
/// `delta[v][x] = w(v, own subset) - w(v, subset x)`.
pub(crate) fn initial_gains(g: &Graph, p: &Partition) -> Vec<i64> {
    let k = p.k();
    let mut delta = vec![0i64; g.n() * k];
    let mut acc = vec![0i64; k];
    for v in 0..g.n() {
        acc.iter_mut().for_each(|a| *a = 0);
        for &(u, w) in g.neighbors(v) {
            acc[p.subset_of(u)] += w;
        }
        let own = p.subset_of(v);
        for x in (0..k).filter(|&x| x != own) {
            delta[v * k + x] = acc[own] - acc[x];
        }
    }
    delta
}

impl<'g> SearchState<'g> {
    /// Computes gains from scratch and files every vertex in the bucket
    /// arrays of the subsets it does not belong to.
    pub fn new(graph: &'g Graph, partition: Partition) -> Self {
        assert_eq!(graph.n(), partition.n(), "partition does not match graph");
        let k = partition.k();
        let delta = initial_gains(graph, &partition);
        let mut buckets = BucketArrays::new(graph.n(), k, graph.max_abs_incident_weight());
        for v in 0..graph.n() {
            let own = partition.subset_of(v);
            for x in (0..k).filter(|&x| x != own) {
                buckets.insert(v, x, delta[v * k + x]);
            }
        }
        let f = evaluate(graph, &partition);
        SearchState {
            graph,
            partition,
            f,
            delta,
            buckets,
            iter: 0,
        }
    }

    #[inline]
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    #[inline]
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.partition.k()
    }

    /// Current objective value.
    #[inline]
    pub fn objective(&self) -> i64 {
        self.f
    }

    /// Number of single transfers applied since construction.
    #[inline]
    pub fn iter(&self) -> u64 {
        self.iter
    }

    #[inline]
    pub fn subset_of(&self, v: usize) -> usize {
        self.partition.subset_of(v)
    }

    /// Gain of moving `v` to `x`; `None` when `v` already sits in `x`.
    #[inline]
    pub fn gain(&self, v: usize, x: usize) -> Option<i64> {
        (self.partition.subset_of(v) != x).then(|| self.delta[v * self.k() + x])
    }

    #[inline]
    pub(crate) fn gain_unchecked(&self, v: usize, x: usize) -> i64 {
        self.delta[v * self.k() + x]
    }

    pub fn buckets(&self) -> &BucketArrays {
        &self.buckets
    }

    pub(crate) fn buckets_mut(&mut self) -> &mut BucketArrays {
        &mut self.buckets
    }

    #[inline]
    fn set_gain(&mut self, v: usize, x: usize, gain: i64) {
        let k = self.k();
        self.delta[v * k + x] = gain;
        self.buckets.update(v, x, gain);
    }

    /// Moves `v` to subset `target` and updates the objective, the gains of
    /// `v` and of its neighbors, and the buckets. Returns the applied gain.
    ///
    /// # Panics
    /// If `target` is `v`'s current subset or out of range.
    pub fn apply_single_transfer(&mut self, v: usize, target: usize) -> i64 {
        let k = self.k();
        let origin = self.partition.subset_of(v);
        assert!(
            target < k && target != origin,
            "invalid transfer of {v} to {target}"
        );
        let moved = self.delta[v * k + target];
        self.f += moved;

        // Moved vertex: the way back costs what the move earned, and every
        // third subset shifts by the same amount.
        self.delta[v * k + target] = 0;
        self.buckets.remove(v, target);
        self.delta[v * k + origin] = -moved;
        self.buckets.insert(v, origin, -moved);
        for x in (0..k).filter(|&x| x != origin && x != target) {
            let g = self.delta[v * k + x] - moved;
            self.set_gain(v, x, g);
        }

        // Neighbors: delta[u][y] += w * (-[cu=origin] + [cu=target] - [y=target] + [y=origin]).
        for &(u, w) in self.graph.neighbors(v) {
            if w == 0 {
                continue;
            }
            let cu = self.partition.subset_of(u);
            let base = if cu == origin {
                -w
            } else if cu == target {
                w
            } else {
                0
            };
            for y in (0..k).filter(|&y| y != cu) {
                let mut change = base;
                if y == target {
                    change -= w;
                } else if y == origin {
                    change += w;
                }
                if change != 0 {
                    let g = self.delta[u * k + y] + change;
                    self.set_gain(u, y, g);
                }
            }
        }

        self.partition.transfer(v, target);
        self.iter += 1;
        moved
    }

    /// A vertex drawn uniformly from the highest non-empty bucket of
    /// `array`, with its gain toward that subset.
    pub fn best_in_array<R: Rng + ?Sized>(
        &mut self,
        array: usize,
        rng: &mut R,
    ) -> Option<(usize, i64)> {
        let gain = self.buckets.top(array)?;
        let len = self.buckets.cell_len(array, gain);
        let v = self.buckets.nth_in_cell(array, gain, rng.gen_range(0..len));
        Some((v, gain))
    }

    /// A maximum-gain single transfer `(vertex, target, gain)`. Ties pick an
    /// array uniformly among those reaching the maximum, then a vertex
    /// uniformly within its top bucket.
    pub fn best_single_transfer<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
    ) -> Option<(usize, usize, i64)> {
        let mut best = i64::MIN;
        let mut tied = 0usize;
        let mut chosen = None;
        for array in 0..self.k() {
            let Some(top) = self.buckets.top(array) else {
                continue;
            };
            if top > best {
                best = top;
                tied = 1;
                chosen = Some(array);
            } else if top == best {
                tied += 1;
                if rng.gen_range(0..tied) == 0 {
                    chosen = Some(array);
                }
            }
        }
        let array = chosen?;
        let (v, gain) = self.best_in_array(array, rng)?;
        Some((v, array, gain))
    }

    /// Compares objective, gains and buckets against a from-scratch
    /// recomputation.
    pub fn verify(&self) -> Result<(), String> {
        let k = self.k();
        let f = evaluate(self.graph, &self.partition);
        if f != self.f {
            return Err(format!("objective {} but recomputed {}", self.f, f));
        }
        let fresh = initial_gains(self.graph, &self.partition);
        for v in 0..self.graph.n() {
            let own = self.partition.subset_of(v);
            for x in 0..k {
                let filed = self.buckets.gain_of(v, x);
                if x == own {
                    if filed.is_some() {
                        return Err(format!("vertex {v} filed in its own subset {x}"));
                    }
                    continue;
                }
                if self.delta[v * k + x] != fresh[v * k + x] {
                    return Err(format!(
                        "gain of {v}->{x} is {} but recomputed {}",
                        self.delta[v * k + x],
                        fresh[v * k + x]
                    ));
                }
                if filed != Some(fresh[v * k + x]) {
                    return Err(format!(
                        "bucket of {v}->{x} holds {filed:?}, expected {}",
                        fresh[v * k + x]
                    ));
                }
            }
        }
        self.buckets.check_structure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> Graph {
        parse_instance("3 3\n1 2 1\n1 3 2\n2 3 3").unwrap()
    }

    fn state<'g>(g: &'g Graph, k: usize, assign: &[usize]) -> SearchState<'g> {
        SearchState::new(g, Partition::new(k, assign.to_vec()).unwrap())
    }

    /// Oracle: gain as the objective difference of the moved partition.
    fn gain_by_evaluation(g: &Graph, p: &Partition, v: usize, x: usize) -> i64 {
        let mut assign = p.assignment().to_vec();
        assign[v] = x;
        evaluate(g, &Partition::new(p.k(), assign).unwrap()) - evaluate(g, p)
    }

    #[test]
    fn initial_gains_on_triangle() {
        let g = triangle();
        let s = state(&g, 2, &[0, 0, 1]);
        assert_eq!(s.objective(), 5);
        assert_eq!(s.gain(0, 1), Some(-1));
        assert_eq!(s.gain(1, 1), Some(-2));
        assert_eq!(s.gain(2, 0), Some(-5));
        assert_eq!(s.gain(0, 0), None);
        for v in 0..3 {
            let x = 1 - s.subset_of(v);
            assert_eq!(
                s.gain(v, x).unwrap(),
                gain_by_evaluation(&g, s.partition(), v, x)
            );
        }
        s.verify().unwrap();
    }

    #[test]
    fn optimal_three_cut_has_no_positive_gain() {
        let g = triangle();
        let s = state(&g, 3, &[0, 1, 2]);
        for v in 0..3 {
            for x in (0..3).filter(|&x| x != v) {
                let d = s.gain(v, x).unwrap();
                assert_eq!(d, gain_by_evaluation(&g, s.partition(), v, x));
                assert!(d <= 0);
            }
        }
        // vertex 0 joining vertex 1 loses w01 = 1
        assert_eq!(s.gain(0, 1), Some(-1));
    }

    #[test]
    fn edgeless_graph_has_flat_gains() {
        let g = parse_instance("4 0").unwrap();
        let mut s = state(&g, 3, &[0, 1, 2, 0]);
        for a in 0..3 {
            assert_eq!(s.buckets().gmax_marker(a), 0);
            assert_eq!(s.buckets().offset(), 0);
        }
        s.apply_single_transfer(1, 0);
        assert_eq!(s.objective(), 0);
        for v in 0..4 {
            for x in 0..3 {
                assert!(matches!(s.gain(v, x), None | Some(0)));
            }
        }
        s.verify().unwrap();
    }

    #[test]
    fn transfer_updates_match_recomputation() {
        let g = triangle();
        let mut s = state(&g, 2, &[0, 0, 1]);
        let applied = s.apply_single_transfer(0, 1);
        assert_eq!(applied, -1);
        assert_eq!(s.objective(), 4);
        assert_eq!(s.iter(), 1);
        s.verify().unwrap();
    }

    #[test]
    fn transfer_and_back_is_identity() {
        let g = parse_instance("5 6\n1 2 3\n1 3 -2\n2 4 5\n3 4 1\n4 5 -7\n1 5 2").unwrap();
        let mut s = state(&g, 3, &[0, 1, 2, 0, 1]);
        let before_f = s.objective();
        let before: Vec<_> = (0..5)
            .flat_map(|v| (0..3).map(move |x| (v, x)))
            .map(|(v, x)| s.gain(v, x))
            .collect();
        s.apply_single_transfer(3, 2);
        s.apply_single_transfer(3, 0);
        let after: Vec<_> = (0..5)
            .flat_map(|v| (0..3).map(move |x| (v, x)))
            .map(|(v, x)| s.gain(v, x))
            .collect();
        assert_eq!(s.objective(), before_f);
        assert_eq!(before, after);
        for v in 0..5 {
            for x in 0..3 {
                assert_eq!(s.buckets().gain_of(v, x), s.gain(v, x));
            }
        }
        s.verify().unwrap();
    }

    #[test]
    fn third_subset_gains_shift() {
        // vertex 0 moves 0 -> 1 with gain g; its gain toward 2 must drop by g
        let g = parse_instance("4 3\n1 2 4\n1 3 1\n1 4 2").unwrap();
        let mut s = state(&g, 3, &[0, 0, 1, 2]);
        let g01 = s.gain(0, 1).unwrap();
        let g02 = s.gain(0, 2).unwrap();
        s.apply_single_transfer(0, 1);
        assert_eq!(s.gain(0, 2), Some(g02 - g01));
        assert_eq!(s.gain(0, 0), Some(-g01));
        s.verify().unwrap();
    }

    #[test]
    fn best_in_array_and_best_transfer() {
        let g = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // S1 = {1, 3}, S2 = {2}
        let mut s = state(&g, 2, &[0, 1, 0]);
        assert_eq!(s.best_in_array(1, &mut rng), Some((0, 1)));
        assert_eq!(s.best_single_transfer(&mut rng), Some((0, 1, 1)));

        // S1 = {1, 2}, S2 = {3}: best is negative
        let mut s = state(&g, 2, &[0, 0, 1]);
        assert_eq!(s.best_single_transfer(&mut rng), Some((0, 1, -1)));

        // all vertices in subset 0: array 0 empty, array 1 holds everyone
        let mut s = state(&g, 2, &[0, 0, 0]);
        assert_eq!(s.best_in_array(0, &mut rng), None);
        assert_eq!(s.buckets().members(1), 3);
    }

    #[test]
    fn ties_in_top_bucket_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = parse_instance("4 2\n1 3 1\n2 4 1").unwrap();
        let mut s = state(&g, 2, &[0, 0, 0, 0]);
        let mut counts = [0usize; 4];
        for _ in 0..4000 {
            let (v, gain) = s.best_in_array(1, &mut rng).unwrap();
            assert_eq!(gain, 1);
            counts[v] += 1;
        }
        for &c in &counts {
            assert!((800..1200).contains(&c), "{counts:?}");
        }
    }
}
