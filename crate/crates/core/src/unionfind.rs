/// Disjoint sets over `0..n` with union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            sets: n,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Number of disjoint sets.
    pub fn sets(&self) -> usize {
        self.sets
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let up = self.parent[cur];
            self.parent[cur] = root;
            cur = up;
        }
        root
    }

    /// Root lookup that leaves the forest untouched.
    pub fn root(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `x` and `y`; returns false if already joined.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        self.link(rx, ry).is_some()
    }

    /// Like [`Self::union`] but without path compression, so the forest keeps
    /// its merge history. Returns `(attached_root, new_root)` on a merge.
    pub fn union_no_compress(&mut self, x: usize, y: usize) -> Option<(usize, usize)> {
        let (rx, ry) = (self.root(x), self.root(y));
        self.link(rx, ry)
    }

    fn link(&mut self, rx: usize, ry: usize) -> Option<(usize, usize)> {
        if rx == ry {
            return None;
        }
        let (child, root) = if self.rank[rx] < self.rank[ry] { (rx, ry) } else { (ry, rx) };
        self.parent[child] = root;
        if self.rank[child] == self.rank[root] {
            self.rank[root] += 1;
        }
        self.sets -= 1;
        Some((child, root))
    }

    pub fn into_parents(self) -> Vec<usize> {
        self.parent
    }
}
