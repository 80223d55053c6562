//! CART-style binary decision tree with information-gain splits.
//!
//! Split vocabulary mirrors the attribute kinds:
//! - numeric attributes test `value <= t` with `t` the midpoint of two
//!   consecutive distinct values observed at the node;
//! - {0,1} attributes test `value <= 0`;
//! - categorical attributes test `value == c`, one-vs-rest.
//!
//! Growth stops at purity, `min_leaf`, or `max_depth`. No post-pruning.
//! Leaf class is the majority, ties preferring class 0. The same builder
//! serves the random forest, which adds bootstrap row multisets and
//! per-split feature subsampling.

use crate::data::{category_values, Dataset, FeatureKind, PatientRecord, FEATURE_KINDS, PREDICTORS};
use crate::learners::HyperParams;
use rand_chacha::ChaCha8Rng;

/// A tree node; `Split` children index into [`DecisionTree::nodes`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        /// Index into [`PREDICTORS`].
        feature: usize,
        test: SplitTest,
        left: usize,
        right: usize,
    },
    Leaf {
        class: u8,
        /// Training records (with bootstrap multiplicity) per class.
        counts: [u64; 2],
    },
}

/// The branch predicate; a record goes left when the test holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitTest {
    /// `value <= threshold` (numeric and {0,1} attributes).
    Le(f64),
    /// `value == category` (categorical attributes).
    Eq(f64),
}

impl SplitTest {
    pub fn matches(&self, value: f64) -> bool {
        match self {
            SplitTest::Le(t) => value <= *t,
            SplitTest::Eq(c) => value == *c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    /// Arena of nodes; the root is index 0.
    pub nodes: Vec<Node>,
    /// Records the tree was grown on (bootstrap multiset size for forests).
    pub n_train: usize,
    /// Majority class of the training set, ties to 0.
    pub majority_class: u8,
}

impl DecisionTree {
    pub fn train(d: &Dataset, params: &HyperParams) -> DecisionTree {
        let frame = FeatureFrame::build(d);
        let indices: Vec<u32> = (0..d.len() as u32).collect();
        grow(&frame, indices, params, None)
    }

    pub fn predict(&self, r: &PatientRecord) -> u8 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    test,
                    left,
                    right,
                } => {
                    at = if test.matches(r.feature(*feature)) {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn depth_at(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + depth_at(nodes, *left).max(depth_at(nodes, *right))
                }
            }
        }
        depth_at(&self.nodes, 0)
    }

    /// FNV-1a over the structural serialization; identifies the tree a rule
    /// set came from.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01B3);
            }
        };
        for node in &self.nodes {
            match node {
                Node::Split {
                    feature,
                    test,
                    left,
                    right,
                } => {
                    eat(&[1u8, *feature as u8]);
                    match test {
                        SplitTest::Le(t) => {
                            eat(&[2]);
                            eat(&t.to_bits().to_le_bytes());
                        }
                        SplitTest::Eq(c) => {
                            eat(&[3]);
                            eat(&c.to_bits().to_le_bytes());
                        }
                    }
                    eat(&(*left as u64).to_le_bytes());
                    eat(&(*right as u64).to_le_bytes());
                }
                Node::Leaf { class, counts } => {
                    eat(&[4, *class]);
                    eat(&counts[0].to_le_bytes());
                    eat(&counts[1].to_le_bytes());
                }
            }
        }
        h
    }
}

/// Column-binned view of a training set: per feature, the sorted distinct
/// values and each record's index into them. Built once per training set and
/// shared by all trees grown on it.
pub(crate) struct FeatureFrame {
    pub values: Vec<Vec<f64>>,
    pub bins: Vec<Vec<u32>>,
    pub labels: Vec<u8>,
}

impl FeatureFrame {
    pub fn build(d: &Dataset) -> FeatureFrame {
        let mut values = Vec::with_capacity(PREDICTORS.len());
        let mut bins = Vec::with_capacity(PREDICTORS.len());
        for f in 0..PREDICTORS.len() {
            let mut vals: Vec<f64> = d.records.iter().map(|r| r.feature(f)).collect();
            vals.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            let idx: Vec<u32> = d
                .records
                .iter()
                .map(|r| {
                    vals.partition_point(|v| *v < r.feature(f)) as u32
                })
                .collect();
            values.push(vals);
            bins.push(idx);
        }
        FeatureFrame {
            values,
            bins,
            labels: d.records.iter().map(|r| r.cardio).collect(),
        }
    }
}

fn entropy(c0: u64, c1: u64) -> f64 {
    let n = (c0 + c1) as f64;
    let mut h = 0.0;
    for c in [c0, c1] {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// One candidate partition of a node, scored by information gain.
#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    test: SplitTest,
    left_counts: [u64; 2],
}

/// Accumulates the best candidate; ties keep the earliest (features are
/// enumerated in ascending index order, thresholds ascending), so the
/// result is independent of evaluation order within a feature scan.
struct Best {
    candidate: Option<Candidate>,
}

impl Best {
    fn offer(&mut self, c: Candidate) {
        if c.gain > self.candidate.map_or(0.0, |b| b.gain) {
            self.candidate = Some(c);
        }
    }
}

/// Class counts on each side implied by putting `left` records left out of
/// `total`; scores the split.
fn gain_of(
    parent_h: f64,
    total: [u64; 2],
    left: [u64; 2],
    min_leaf: u64,
    use_gain_ratio: bool,
) -> Option<f64> {
    let right = [total[0] - left[0], total[1] - left[1]];
    let nl = left[0] + left[1];
    let nr = right[0] + right[1];
    if nl < min_leaf || nr < min_leaf {
        return None;
    }
    let n = (nl + nr) as f64;
    let gain = parent_h
        - (nl as f64 / n) * entropy(left[0], left[1])
        - (nr as f64 / n) * entropy(right[0], right[1]);
    if use_gain_ratio {
        let si = entropy(nl, nr);
        if si <= 0.0 {
            return None;
        }
        Some(gain / si)
    } else {
        Some(gain)
    }
}

/// Grow a tree over `indices` (row multiset; repeats allowed for bootstrap
/// samples). `rng` enables per-split feature subsampling of `params.mtry`
/// features when present.
pub(crate) fn grow(
    frame: &FeatureFrame,
    indices: Vec<u32>,
    params: &HyperParams,
    mut sampling: Option<(&mut ChaCha8Rng, usize)>,
) -> DecisionTree {
    let n_features = PREDICTORS.len();
    let mut nodes: Vec<Node> = vec![Node::Leaf {
        class: 0,
        counts: [0, 0],
    }];
    let n_train = indices.len();
    let mut work = indices;
    // (start, end, depth, node slot) over `work`
    let mut stack: Vec<(usize, usize, usize, usize)> = vec![(0, n_train, 0, 0)];
    // per-feature histogram scratch, reset after every use
    let mut hist: Vec<Vec<[u64; 2]>> = frame
        .values
        .iter()
        .map(|v| vec![[0u64; 2]; v.len()])
        .collect();
    let mut gather: Vec<u32> = Vec::new();
    let mut right_buf: Vec<u32> = Vec::new();
    let mut feature_order: Vec<usize> = (0..n_features).collect();
    let mut majority_root = 0u8;

    while let Some((start, end, depth, slot)) = stack.pop() {
        let node_indices = &work[start..end];
        let mut counts = [0u64; 2];
        for &i in node_indices {
            counts[frame.labels[i as usize] as usize] += 1;
        }
        let majority = if counts[1] > counts[0] { 1u8 } else { 0u8 };
        if slot == 0 {
            majority_root = majority;
        }
        let len = (end - start) as u64;
        let depth_capped = params.max_depth.map_or(false, |d| depth >= d);
        if counts[0] == 0 || counts[1] == 0 || len < 2 * params.min_leaf as u64 || depth_capped {
            nodes[slot] = Node::Leaf {
                class: majority,
                counts,
            };
            continue;
        }

        let parent_h = entropy(counts[0], counts[1]);
        let mut best = Best { candidate: None };
        let chosen: &[usize] = match &mut sampling {
            Some((rng, mtry)) if *mtry < n_features => {
                let mut picked =
                    rand::seq::index::sample(&mut **rng, n_features, *mtry).into_vec();
                picked.sort_unstable();
                feature_order.clear();
                feature_order.extend(picked);
                &feature_order
            }
            _ => {
                feature_order.clear();
                feature_order.extend(0..n_features);
                &feature_order
            }
        };

        for &f in chosen {
            let node_indices = &work[start..end];
            match FEATURE_KINDS[f] {
                FeatureKind::Numeric => {
                    scan_numeric(
                        frame,
                        f,
                        node_indices,
                        parent_h,
                        counts,
                        params,
                        &mut best,
                        &mut hist[f],
                        &mut gather,
                    );
                }
                FeatureKind::Binary => {
                    // single candidate: value <= 0
                    let mut left = [0u64; 2];
                    for &i in node_indices {
                        if frame.bins[f][i as usize] == 0
                            && frame.values[f][0] == 0.0
                        {
                            left[frame.labels[i as usize] as usize] += 1;
                        }
                    }
                    if let Some(gain) = gain_of(
                        parent_h,
                        counts,
                        left,
                        params.min_leaf as u64,
                        params.use_gain_ratio,
                    ) {
                        best.offer(Candidate {
                            gain,
                            feature: f,
                            test: SplitTest::Le(0.0),
                            left_counts: left,
                        });
                    }
                }
                FeatureKind::Categorical => {
                    let domain = category_values(f);
                    let mut per_cat = [[0u64; 2]; 3];
                    for &i in node_indices {
                        let v = frame.values[f][frame.bins[f][i as usize] as usize];
                        let c = domain.iter().position(|d| *d as f64 == v).unwrap();
                        per_cat[c][frame.labels[i as usize] as usize] += 1;
                    }
                    for (c, &v) in domain.iter().enumerate() {
                        let left = per_cat[c];
                        if left[0] + left[1] == 0 {
                            continue;
                        }
                        if let Some(gain) = gain_of(
                            parent_h,
                            counts,
                            left,
                            params.min_leaf as u64,
                            params.use_gain_ratio,
                        ) {
                            best.offer(Candidate {
                                gain,
                                feature: f,
                                test: SplitTest::Eq(v as f64),
                                left_counts: left,
                            });
                        }
                    }
                }
            }
        }

        match best.candidate {
            None => {
                nodes[slot] = Node::Leaf {
                    class: majority,
                    counts,
                };
            }
            Some(c) => {
                // stable in-place partition: left block keeps order, right
                // block follows
                right_buf.clear();
                let mut write = start;
                for read in start..end {
                    let i = work[read];
                    let v = frame.values[c.feature][frame.bins[c.feature][i as usize] as usize];
                    if c.test.matches(v) {
                        work[write] = i;
                        write += 1;
                    } else {
                        right_buf.push(i);
                    }
                }
                work[write..end].copy_from_slice(&right_buf);
                debug_assert_eq!(
                    (write - start) as u64,
                    c.left_counts[0] + c.left_counts[1]
                );
                let left_slot = nodes.len();
                nodes.push(Node::Leaf {
                    class: 0,
                    counts: [0, 0],
                });
                let right_slot = nodes.len();
                nodes.push(Node::Leaf {
                    class: 0,
                    counts: [0, 0],
                });
                nodes[slot] = Node::Split {
                    feature: c.feature,
                    test: c.test,
                    left: left_slot,
                    right: right_slot,
                };
                // push right first so the left child is processed first
                // (leaf numbering follows left-to-right reading order)
                stack.push((write, end, depth + 1, right_slot));
                stack.push((start, write, depth + 1, left_slot));
            }
        }
    }

    DecisionTree {
        nodes,
        n_train,
        majority_class: majority_root,
    }
}

/// Best `value <= midpoint` candidate for a numeric feature. Large nodes
/// tally a per-bin histogram; small nodes sort their own (bin, label) pairs
/// to avoid touching the whole bin range. Both paths enumerate the same
/// candidates in ascending threshold order.
#[allow(clippy::too_many_arguments)]
fn scan_numeric(
    frame: &FeatureFrame,
    f: usize,
    node_indices: &[u32],
    parent_h: f64,
    counts: [u64; 2],
    params: &HyperParams,
    best: &mut Best,
    hist: &mut [[u64; 2]],
    gather: &mut Vec<u32>,
) {
    let bins = &frame.bins[f];
    let values = &frame.values[f];
    let min_leaf = params.min_leaf as u64;
    let total = counts[0] + counts[1];

    let offer_boundary = |left: [u64; 2], lo_bin: usize, hi_bin: usize, best: &mut Best| {
        if let Some(gain) = gain_of(parent_h, counts, left, min_leaf, params.use_gain_ratio) {
            let threshold = (values[lo_bin] + values[hi_bin]) / 2.0;
            best.offer(Candidate {
                gain,
                feature: f,
                test: SplitTest::Le(threshold),
                left_counts: left,
            });
        }
    };

    if node_indices.len() >= 256 {
        let mut min_bin = usize::MAX;
        let mut max_bin = 0usize;
        for &i in node_indices {
            let b = bins[i as usize] as usize;
            hist[b][frame.labels[i as usize] as usize] += 1;
            min_bin = min_bin.min(b);
            max_bin = max_bin.max(b);
        }
        let mut cum = [0u64; 2];
        let mut prev_bin: Option<usize> = None;
        for b in min_bin..=max_bin {
            let c = hist[b];
            if c[0] + c[1] == 0 {
                continue;
            }
            if let Some(p) = prev_bin {
                offer_boundary(cum, p, b, best);
            }
            cum[0] += c[0];
            cum[1] += c[1];
            if cum[0] + cum[1] == total {
                break;
            }
            prev_bin = Some(b);
        }
        for &i in node_indices {
            hist[bins[i as usize] as usize] = [0, 0];
        }
    } else {
        // pack bin<<1 | label so one sort orders bins and carries labels
        gather.clear();
        gather.extend(
            node_indices
                .iter()
                .map(|&i| (bins[i as usize] << 1) | frame.labels[i as usize] as u32),
        );
        gather.sort_unstable();
        let mut cum = [0u64; 2];
        let mut pos = 0usize;
        let mut prev_bin: Option<usize> = None;
        while pos < gather.len() {
            let b = (gather[pos] >> 1) as usize;
            let mut c = [0u64; 2];
            while pos < gather.len() && (gather[pos] >> 1) as usize == b {
                c[(gather[pos] & 1) as usize] += 1;
                pos += 1;
            }
            if let Some(p) = prev_bin {
                offer_boundary(cum, p, b, best);
            }
            cum[0] += c[0];
            cum[1] += c[1];
            prev_bin = Some(b);
        }
    }
}
