use crate::scalar::Real;

/// Tournament tree over per-slot scores that answers "highest score, lowest
/// slot on ties" in O(1) and absorbs a single-slot update in O(log K).
#[derive(Clone, Debug)]
pub(crate) struct IndexTree<S> {
    width: usize,
    scores: Vec<S>,
    winners: Vec<usize>,
}

impl<S: Real> IndexTree<S> {
    pub(crate) fn new(scores: Vec<S>) -> Self {
        assert!(!scores.is_empty());
        let width = scores.len().next_power_of_two();
        let mut padded = scores;
        padded.resize(width, S::neg_infinity());
        let mut winners = vec![0; 2 * width];
        for leaf in 0..width {
            winners[width + leaf] = leaf;
        }
        let mut tree = Self {
            width,
            scores: padded,
            winners,
        };
        for node in (1..width).rev() {
            tree.recompute(node);
        }
        tree
    }

    fn recompute(&mut self, node: usize) {
        let (a, b) = (self.winners[2 * node], self.winners[2 * node + 1]);
        // Left subtree holds lower slots, so it wins ties.
        self.winners[node] = if self.scores[b] > self.scores[a] { b } else { a };
    }

    pub(crate) fn best(&self) -> usize {
        if self.width == 1 {
            0
        } else {
            self.winners[1]
        }
    }

    pub(crate) fn update(&mut self, slot: usize, score: S) {
        self.scores[slot] = score;
        let mut node = (self.width + slot) / 2;
        while node >= 1 {
            self.recompute(node);
            node /= 2;
        }
    }
}
