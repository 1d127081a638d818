use serde::{Deserialize, Serialize};

/// Binary regression tree. Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn max_feature(&self) -> Option<usize> {
        match self {
            Node::Leaf { .. } => None,
            Node::Split {
                feature,
                left,
                right,
                ..
            } => Some(
                (*feature)
                    .max(left.max_feature().unwrap_or(0))
                    .max(right.max_feature().unwrap_or(0)),
            ),
        }
    }
}

/// Midpoint that stays strictly below `hi`, computed without overflow.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo / 2.0 + hi / 2.0;
    if m >= hi || m < lo {
        lo
    } else {
        m
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Column-wise training data shared by every boosting stage.
pub(crate) struct Columns<'a> {
    pub rows: &'a [Vec<f64>],
    /// Per feature, row indices sorted by value (ties by row index).
    pub order: Vec<Vec<u32>>,
}

impl<'a> Columns<'a> {
    pub fn new(rows: &'a [Vec<f64>], arity: usize) -> Self {
        let order = (0..arity)
            .map(|f| {
                let mut idx: Vec<u32> = (0..rows.len() as u32).collect();
                idx.sort_by(|&a, &b| {
                    rows[a as usize][f]
                        .total_cmp(&rows[b as usize][f])
                        .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        Self { rows, order }
    }
}

/// Growing tree in arena form; converted to nested nodes at the end.
enum Slot {
    Open,
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Grows one tree on `residuals` by exact, level-wise split search. Returns the
/// tree shape with leaf slots and each row's leaf slot; the caller fills in
/// leaf values.
pub(crate) fn grow(
    cols: &Columns<'_>,
    residuals: &[f64],
    max_depth: usize,
    min_leaf: usize,
) -> (Vec<usize>, impl Fn(&dyn Fn(usize) -> f64) -> Node) {
    let n = residuals.len();
    let mut slots: Vec<Slot> = vec![Slot::Open];
    let mut assign: Vec<usize> = vec![0; n];
    let mut frontier: Vec<usize> = vec![0];

    for _ in 0..max_depth {
        if frontier.is_empty() {
            break;
        }
        // Map slot → position in this level's frontier.
        let mut pos_of = vec![usize::MAX; slots.len()];
        for (p, &s) in frontier.iter().enumerate() {
            pos_of[s] = p;
        }
        let k = frontier.len();
        let mut total_sum = vec![0.0; k];
        let mut total_n = vec![0usize; k];
        for i in 0..n {
            let p = pos_of[assign[i]];
            if p != usize::MAX {
                total_sum[p] += residuals[i];
                total_n[p] += 1;
            }
        }
        let mut best: Vec<Option<Candidate>> = vec![None; k];
        let mut left_sum = vec![0.0; k];
        let mut left_n = vec![0usize; k];
        let mut prev = vec![f64::NAN; k];
        for (f, order) in cols.order.iter().enumerate() {
            left_sum.iter_mut().for_each(|v| *v = 0.0);
            left_n.iter_mut().for_each(|v| *v = 0);
            prev.iter_mut().for_each(|v| *v = f64::NAN);
            for &row in order {
                let row = row as usize;
                let p = pos_of[assign[row]];
                if p == usize::MAX {
                    continue;
                }
                let x = cols.rows[row][f];
                let nl = left_n[p];
                if nl > 0 && x != prev[p] && nl >= min_leaf && total_n[p] - nl >= min_leaf {
                    let (sl, st) = (left_sum[p], total_sum[p]);
                    let sr = st - sl;
                    let nr = total_n[p] - nl;
                    let gain =
                        sl * sl / nl as f64 + sr * sr / nr as f64 - st * st / total_n[p] as f64;
                    let better = match best[p] {
                        None => gain > 1e-12,
                        Some(b) => gain > b.gain,
                    };
                    if better {
                        best[p] = Some(Candidate {
                            gain,
                            feature: f,
                            threshold: midpoint(prev[p], x),
                        });
                    }
                }
                left_sum[p] += residuals[row];
                left_n[p] += 1;
                prev[p] = x;
            }
        }
        let mut next = Vec::new();
        for (p, &slot) in frontier.iter().enumerate() {
            if let Some(c) = best[p] {
                let (l, r) = (slots.len(), slots.len() + 1);
                slots.push(Slot::Open);
                slots.push(Slot::Open);
                slots[slot] = Slot::Split {
                    feature: c.feature,
                    threshold: c.threshold,
                    left: l,
                    right: r,
                };
                next.push(l);
                next.push(r);
            }
        }
        if next.is_empty() {
            break;
        }
        for (i, a) in assign.iter_mut().enumerate() {
            if let Slot::Split {
                feature,
                threshold,
                left,
                right,
            } = slots[*a]
            {
                *a = if cols.rows[i][feature] <= threshold {
                    left
                } else {
                    right
                };
            }
        }
        frontier = next;
    }

    let build = move |leaf_value: &dyn Fn(usize) -> f64| {
        fn to_node(slots: &[Slot], s: usize, leaf_value: &dyn Fn(usize) -> f64) -> Node {
            match slots[s] {
                Slot::Open => Node::Leaf {
                    value: leaf_value(s),
                },
                Slot::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => Node::Split {
                    feature,
                    threshold,
                    left: Box::new(to_node(slots, left, leaf_value)),
                    right: Box::new(to_node(slots, right, leaf_value)),
                },
            }
        }
        to_node(&slots, 0, leaf_value)
    };
    (assign, build)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_split_on_step() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![5.0, i as f64]).collect();
        let r: Vec<f64> = (0..10).map(|i| if i < 4 { -1.0 } else { 1.0 }).collect();
        let cols = Columns::new(&rows, 2);
        let (assign, build) = grow(&cols, &r, 1, 1);
        let tree = build(&|s| s as f64);
        match &tree {
            Node::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 1);
                assert_eq!(*threshold, 3.5);
            }
            _ => panic!("expected a split"),
        }
        assert_eq!(assign[0], 1);
        assert_eq!(assign[9], 2);
        assert_eq!(tree.predict(&[0.0, 3.0]), 1.0);
        assert_eq!(tree.depth(), 1);
    }

    #[test]
    fn ties_prefer_lowest_feature() {
        // features 0 and 1 are identical; the split must use feature 0
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, i as f64]).collect();
        let r = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
        let cols = Columns::new(&rows, 2);
        let (_, build) = grow(&cols, &r, 1, 1);
        assert!(matches!(build(&|_| 0.0), Node::Split { feature: 0, .. }));
    }

    #[test]
    fn min_leaf_blocks_split() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let r = [-1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let cols = Columns::new(&rows, 1);
        let (_, build) = grow(&cols, &r, 2, 3);
        match build(&|_| 0.0) {
            Node::Split { threshold, .. } => assert_eq!(threshold, 2.5),
            Node::Leaf { .. } => panic!("a 3/3 split is allowed"),
        }
        let (_, build) = grow(&cols, &r, 2, 4);
        assert!(matches!(build(&|_| 0.0), Node::Leaf { .. }));
    }

    #[test]
    fn midpoint_of_extremes() {
        assert_eq!(midpoint(f64::MIN, 0.0), f64::MIN / 2.0);
        assert!(midpoint(1.0, 1.0 + f64::EPSILON) < 1.0 + f64::EPSILON);
    }
}
