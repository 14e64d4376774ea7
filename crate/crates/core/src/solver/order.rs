//! Activity-ordered variable heap (VSIDS).

pub(crate) struct VarOrder {
    activity: Vec<f64>,
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
    inc: f64,
}

const DECAY: f64 = 0.95;
const RESCALE_LIMIT: f64 = 1e100;

impl VarOrder {
    pub fn new(n_vars: usize) -> Self {
        VarOrder {
            activity: vec![0.0; n_vars + 1],
            heap: Vec::new(),
            pos: vec![None; n_vars + 1],
            inc: 1.0,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    pub fn insert(&mut self, v: usize) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn pop(&mut self) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty heap");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.sift_down(0);
        }
        Some(top)
    }

    pub fn bump(&mut self, v: usize) {
        self.activity[v] += self.inc;
        if self.activity[v] > RESCALE_LIMIT {
            for a in &mut self.activity {
                *a *= 1.0 / RESCALE_LIMIT;
            }
            self.inc *= 1.0 / RESCALE_LIMIT;
        }
        if let Some(i) = self.pos[v] {
            self.sift_up(i);
        }
    }

    pub fn decay(&mut self) {
        self.inc /= DECAY;
    }

    fn less(&self, a: usize, b: usize) -> bool {
        // max-heap on activity, ties broken towards the smaller index
        let (x, y) = (self.activity[a], self.activity[b]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut i: usize) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && self.less(self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !self.less(self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_by_activity() {
        let mut o = VarOrder::new(5);
        for v in 1..=5 {
            o.insert(v);
        }
        o.bump(3);
        o.bump(3);
        o.bump(5);
        assert_eq!(o.pop(), Some(3));
        assert_eq!(o.pop(), Some(5));
        assert_eq!(o.pop(), Some(1));
        o.insert(3);
        assert_eq!(o.pop(), Some(3));
        assert_eq!(o.pop(), Some(2));
    }
}
