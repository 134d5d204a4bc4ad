//! Bucket arrays of single-transfer gains.
//!
//! One array per subset. Array `i` holds a node for every vertex outside
//! subset `i`, filed in the cell indexed by that vertex's gain toward `i`
//! plus the offset `W`. Each cell is a doubly linked list threaded through
//! flat `next`/`prev` vectors; node `v * k + i` belongs to vertex `v` in
//! array `i`, so the position index is the node id itself and `cell_of`
//! records where (and whether) the node is filed.

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct BucketArrays {
    k: usize,
    offset: i64,
    cells: usize,
    head: Vec<usize>,
    tail: Vec<usize>,
    len: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    cell_of: Vec<usize>,
    gmax: Vec<usize>,
    members: Vec<usize>,
}

impl BucketArrays {
    /// Empty arrays for `n` vertices, `k` subsets and gains in `[-offset, offset]`.
    pub fn new(n: usize, k: usize, offset: i64) -> Self {
        assert!(offset >= 0);
        let cells = 2 * offset as usize + 1;
        BucketArrays {
            k,
            offset,
            cells,
            head: vec![NIL; k * cells],
            tail: vec![NIL; k * cells],
            len: vec![0; k * cells],
            next: vec![NIL; n * k],
            prev: vec![NIL; n * k],
            cell_of: vec![NIL; n * k],
            gmax: vec![0; k],
            members: vec![0; k],
        }
    }

    #[inline]
    pub fn offset(&self) -> i64 {
        self.offset
    }

    #[inline]
    fn node(&self, v: usize, array: usize) -> usize {
        v * self.k + array
    }

    #[inline]
    fn slot(&self, array: usize, cell: usize) -> usize {
        array * self.cells + cell
    }

    #[inline]
    fn cell_index(&self, gain: i64) -> usize {
        debug_assert!(
            gain.abs() <= self.offset,
            "gain {gain} outside bucket range ±{}",
            self.offset
        );
        (gain + self.offset) as usize
    }

    #[inline]
    pub fn contains(&self, v: usize, array: usize) -> bool {
        self.cell_of[self.node(v, array)] != NIL
    }

    /// Gain recorded for `v` in `array`, or `None` when `v` has no node there.
    pub fn gain_of(&self, v: usize, array: usize) -> Option<i64> {
        match self.cell_of[self.node(v, array)] {
            NIL => None,
            c => Some(c as i64 - self.offset),
        }
    }

    /// Number of vertices filed in `array`.
    pub fn members(&self, array: usize) -> usize {
        self.members[array]
    }

    /// Current (possibly stale-high) gmax marker as a gain value.
    pub fn gmax_marker(&self, array: usize) -> i64 {
        self.gmax[array] as i64 - self.offset
    }

    pub fn insert(&mut self, v: usize, array: usize, gain: i64) {
        let node = self.node(v, array);
        debug_assert_eq!(self.cell_of[node], NIL);
        let cell = self.cell_index(gain);
        let slot = self.slot(array, cell);
        let old_head = self.head[slot];
        self.next[node] = old_head;
        self.prev[node] = NIL;
        if old_head == NIL {
            self.tail[slot] = node;
        } else {
            self.prev[old_head] = node;
        }
        self.head[slot] = node;
        self.len[slot] += 1;
        self.cell_of[node] = cell;
        self.members[array] += 1;
        if cell > self.gmax[array] {
            self.gmax[array] = cell;
        }
    }

    pub fn remove(&mut self, v: usize, array: usize) {
        let node = self.node(v, array);
        let cell = self.cell_of[node];
        debug_assert_ne!(cell, NIL);
        let slot = self.slot(array, cell);
        let (p, nx) = (self.prev[node], self.next[node]);
        if p == NIL {
            self.head[slot] = nx;
        } else {
            self.next[p] = nx;
        }
        if nx == NIL {
            self.tail[slot] = p;
        } else {
            self.prev[nx] = p;
        }
        self.next[node] = NIL;
        self.prev[node] = NIL;
        self.cell_of[node] = NIL;
        self.len[slot] -= 1;
        self.members[array] -= 1;
    }

    /// Refiles `v` in `array` under a new gain.
    #[inline]
    pub fn update(&mut self, v: usize, array: usize, gain: i64) {
        if self.cell_of[self.node(v, array)] != self.cell_index(gain) {
            self.remove(v, array);
            self.insert(v, array, gain);
        }
    }

    /// Highest gain present in `array`, lowering gmax to the true top.
    pub fn top(&mut self, array: usize) -> Option<i64> {
        if self.members[array] == 0 {
            return None;
        }
        let mut g = self.gmax[array];
        while self.len[self.slot(array, g)] == 0 {
            g -= 1;
        }
        self.gmax[array] = g;
        Some(g as i64 - self.offset)
    }

    /// Number of vertices with exactly `gain` toward `array`.
    #[inline]
    pub fn cell_len(&self, array: usize, gain: i64) -> usize {
        if gain.abs() > self.offset {
            return 0;
        }
        self.len[self.slot(array, self.cell_index(gain))]
    }

    /// Vertices filed in `array` under `gain`, in list order.
    pub fn cell(&self, array: usize, gain: i64) -> CellIter<'_> {
        let node = if gain.abs() > self.offset {
            NIL
        } else {
            self.head[self.slot(array, self.cell_index(gain))]
        };
        CellIter { arrays: self, node }
    }

    /// The `r`-th vertex of a cell, walking from whichever end is closer.
    pub fn nth_in_cell(&self, array: usize, gain: i64, r: usize) -> usize {
        let slot = self.slot(array, self.cell_index(gain));
        let len = self.len[slot];
        assert!(r < len);
        let mut node;
        if r <= len / 2 {
            node = self.head[slot];
            for _ in 0..r {
                node = self.next[node];
            }
        } else {
            node = self.tail[slot];
            for _ in 0..(len - 1 - r) {
                node = self.prev[node];
            }
        }
        node / self.k
    }

    /// Walks every filed node and checks list links, lengths, member counts
    /// and the gmax bound. Intended for tests.
    pub fn check_structure(&self) -> Result<(), String> {
        let mut seen = vec![false; self.cell_of.len()];
        for array in 0..self.k {
            let mut count = 0;
            let mut true_top = None;
            for cell in 0..self.cells {
                let slot = self.slot(array, cell);
                let mut node = self.head[slot];
                let mut prev = NIL;
                let mut len = 0;
                while node != NIL {
                    if node % self.k != array {
                        return Err(format!("node {node} filed in foreign array {array}"));
                    }
                    if self.cell_of[node] != cell {
                        return Err(format!(
                            "node {node} position index disagrees with its cell"
                        ));
                    }
                    if self.prev[node] != prev {
                        return Err(format!("broken back link at node {node}"));
                    }
                    if std::mem::replace(&mut seen[node], true) {
                        return Err(format!("node {node} reachable twice"));
                    }
                    prev = node;
                    node = self.next[node];
                    len += 1;
                }
                if self.tail[slot] != prev {
                    return Err(format!("tail mismatch in array {array} cell {cell}"));
                }
                if len != self.len[slot] {
                    return Err(format!("length mismatch in array {array} cell {cell}"));
                }
                if len > 0 {
                    true_top = Some(cell);
                }
                count += len;
            }
            if count != self.members[array] {
                return Err(format!("member count mismatch in array {array}"));
            }
            if let Some(t) = true_top {
                if self.gmax[array] < t {
                    return Err(format!("gmax of array {array} below the true top"));
                }
            }
        }
        for (node, &cell) in self.cell_of.iter().enumerate() {
            if cell != NIL && !seen[node] {
                return Err(format!("orphan node {node}"));
            }
        }
        Ok(())
    }
}

pub struct CellIter<'a> {
    arrays: &'a BucketArrays,
    node: usize,
}

impl Iterator for CellIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.node == NIL {
            return None;
        }
        let v = self.node / self.arrays.k;
        self.node = self.arrays.next[self.node];
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_update() {
        let mut b = BucketArrays::new(4, 2, 3);
        b.insert(0, 1, 2);
        b.insert(1, 1, -1);
        b.insert(2, 1, 2);
        b.insert(3, 0, 0);
        b.check_structure().unwrap();
        assert_eq!(b.top(1), Some(2));
        assert_eq!(b.cell_len(1, 2), 2);
        let mut top: Vec<_> = b.cell(1, 2).collect();
        top.sort();
        assert_eq!(top, vec![0, 2]);

        b.remove(0, 1);
        b.update(2, 1, -3);
        b.check_structure().unwrap();
        // gmax stays high until queried
        assert_eq!(b.gmax_marker(1), 2);
        assert_eq!(b.top(1), Some(-1));
        assert_eq!(b.gmax_marker(1), -1);
        assert_eq!(b.gain_of(2, 1), Some(-3));
        assert_eq!(b.gain_of(0, 1), None);
        assert!(!b.contains(0, 1));

        b.remove(1, 1);
        b.remove(2, 1);
        assert_eq!(b.top(1), None);
        assert_eq!(b.cell_len(1, 99), 0);
        b.check_structure().unwrap();
    }

    #[test]
    fn nth_walks_from_both_ends() {
        let mut b = BucketArrays::new(7, 1, 0);
        for v in 0..7 {
            b.insert(v, 0, 0);
        }
        let order: Vec<_> = b.cell(0, 0).collect();
        let picked: Vec<_> = (0..7).map(|r| b.nth_in_cell(0, 0, r)).collect();
        assert_eq!(order, picked);
    }
}
