//! Short-term memory forbidding a vertex from returning to the subset it
//! just left.

use rand::Rng;

/// Expiry iteration per `(vertex, subset)` pair, stored densely.
///
/// A pair recorded at iteration `t` with tenure `λ` has expiry `t + λ` and
/// is forbidden while the current iteration is below it.
#[derive(Debug, Clone)]
pub struct TabuList {
    k: usize,
    expiry: Vec<u64>,
    touched: Vec<usize>,
    low: u64,
    high: u64,
}

impl TabuList {
    /// Tenure drawn from `[3, max(3, n / 10)]`.
    pub fn new(n: usize, k: usize) -> Self {
        Self::with_tenure(n, k, 3, (n as u64 / 10).max(3))
    }

    pub fn with_tenure(n: usize, k: usize, low: u64, high: u64) -> Self {
        assert!(low <= high, "tenure bounds out of order");
        TabuList {
            k,
            expiry: vec![0; n * k],
            touched: Vec::new(),
            low,
            high,
        }
    }

    pub fn tenure_bounds(&self) -> (u64, u64) {
        (self.low, self.high)
    }

    pub fn draw_tenure<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(self.low..=self.high)
    }

    /// Forbids `v` from re-entering `origin` for a freshly drawn tenure.
    /// Returns the tenure used.
    pub fn record<R: Rng + ?Sized>(
        &mut self,
        v: usize,
        origin: usize,
        iter: u64,
        rng: &mut R,
    ) -> u64 {
        let tenure = self.draw_tenure(rng);
        self.record_with_tenure(v, origin, iter, tenure);
        tenure
    }

    pub fn record_with_tenure(&mut self, v: usize, origin: usize, iter: u64, tenure: u64) {
        let slot = v * self.k + origin;
        if self.expiry[slot] == 0 {
            self.touched.push(slot);
        }
        self.expiry[slot] = iter + tenure;
    }

    #[inline]
    pub fn is_forbidden(&self, v: usize, target: usize, iter: u64) -> bool {
        self.expiry[v * self.k + target] > iter
    }

    /// Drops every record.
    pub fn clear(&mut self) {
        for slot in self.touched.drain(..) {
            self.expiry[slot] = 0;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.touched.is_empty()
    }
}
