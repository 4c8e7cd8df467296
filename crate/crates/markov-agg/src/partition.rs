//! Partition functions g, their matrix encodings V and U, canonical forms,
//! and enumeration of all M-class set partitions.

use crate::chain::DistributionVector;
use crate::error::{Error, Result};

/// Hard cap on the alphabet size for exhaustive enumeration.
pub const ENUMERATION_CAP: usize = 14;

/// A surjective map g: {1..n} -> {1..m} in canonical form: labels appear in
/// order of first occurrence, so assignment[0] = 1 and each new label is one
/// greater than the maximum seen so far.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    m: usize,
    assignment: Vec<usize>,
}

impl Partition {
    /// Relabels classes by first occurrence. Idempotent. Errors when a label
    /// present in 1..=max refers to an empty class.
    pub fn canonicalize(raw: &[usize]) -> Result<Self> {
        let n = raw.len();
        assert!(n > 0, "empty assignment");
        let max_label = *raw.iter().max().unwrap();
        // label 0 references no class; gaps in 1..=max are closed by relabeling
        if raw.contains(&0) {
            return Err(Error::EmptyClass { label: 0 });
        }
        let mut relabel = vec![0usize; max_label + 1];
        let mut next = 0usize;
        let mut assignment = Vec::with_capacity(n);
        for &label in raw {
            if relabel[label] == 0 {
                next += 1;
                relabel[label] = next;
            }
            assignment.push(relabel[label]);
        }
        Ok(Self { n, m: next, assignment })
    }

    /// The identity partition (every state its own class).
    pub fn identity(n: usize) -> Self {
        Self { n, m: n, assignment: (1..=n).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Class labels, 1-based, in canonical form.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Class of state `i` (0-based state, 0-based class).
    pub fn class_of(&self, i: usize) -> usize {
        self.assignment[i] - 1
    }

    /// Members of each class, by 0-based state index.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.m];
        for (i, &label) in self.assignment.iter().enumerate() {
            classes[label - 1].push(i);
        }
        classes
    }

    /// The n-by-m zero/one matrix V with V_ij = 1 iff g(i) = j.
    pub fn build_v(&self) -> Vec<Vec<f64>> {
        let mut v = vec![vec![0.0; self.m]; self.n];
        for (i, &label) in self.assignment.iter().enumerate() {
            v[i][label - 1] = 1.0;
        }
        v
    }

    /// The m-by-n lifting matrix U with U_ij = pi_j / sum_{k in g^-1(i)} pi_k
    /// for j in g^-1(i) and zero elsewhere. Requires pi strictly positive.
    pub fn build_u(&self, pi: &DistributionVector) -> Result<Vec<Vec<f64>>> {
        assert_eq!(pi.n(), self.n, "pi length mismatch");
        pi.require_positive()?;
        let mut class_mass = vec![0.0; self.m];
        for (i, &label) in self.assignment.iter().enumerate() {
            class_mass[label - 1] += pi.get(i);
        }
        let mut u = vec![vec![0.0; self.n]; self.m];
        for (i, &label) in self.assignment.iter().enumerate() {
            u[label - 1][i] = pi.get(i) / class_mass[label - 1];
        }
        Ok(u)
    }

    /// Coarsens the partition by merging class `a` into class `b`
    /// (0-based class indices), returning the canonical result.
    pub fn merge_classes(&self, a: usize, b: usize) -> Self {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let raw: Vec<usize> = self
            .assignment
            .iter()
            .map(|&label| if label - 1 == hi { lo + 1 } else { label })
            .collect();
        Self::canonicalize(&raw).expect("merge of canonical partition cannot fail")
    }

    /// True iff `other` is obtained from `self` by merging exactly one pair
    /// of classes.
    pub fn is_one_merge_coarsening_of(&self, finer: &Partition) -> bool {
        if self.m + 1 != finer.m || self.n != finer.n {
            return false;
        }
        // every fine class must map into exactly one coarse class
        let mut image = vec![None; finer.m];
        for i in 0..self.n {
            let fine = finer.class_of(i);
            let coarse = self.class_of(i);
            match image[fine] {
                None => image[fine] = Some(coarse),
                Some(c) if c == coarse => {}
                Some(_) => return false,
            }
        }
        true
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<String> = self.assignment.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", labels.join(" "))
    }
}

/// Streams every canonical partition of {1..n} into exactly m nonempty
/// classes, in restricted-growth-string lexicographic order. With `fixed`,
/// only partitions where the fixed set forms exactly one class are yielded.
pub fn enumerate_partitions(
    n: usize,
    m: usize,
    fixed: Option<&[usize]>,
) -> Result<PartitionIter> {
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge { n, cap: ENUMERATION_CAP });
    }
    assert!(m >= 1 && m <= n, "class count {m} outside 1..={n}");
    let fixed = match fixed {
        None => None,
        Some(set) => {
            if set.is_empty() || set.iter().any(|&s| s >= n) {
                return Err(Error::InvalidFixedSet { n });
            }
            let mut mask = vec![false; n];
            for &s in set {
                mask[s] = true;
            }
            Some(mask)
        }
    };
    Ok(PartitionIter { n, m, fixed, state: IterState::Fresh })
}

enum IterState {
    Fresh,
    Running(Vec<usize>),
    Done,
}

pub struct PartitionIter {
    n: usize,
    m: usize,
    /// 0-based membership mask of the fixed set, if any.
    fixed: Option<Vec<bool>>,
    state: IterState,
}

impl PartitionIter {
    /// Lexicographically smallest restricted growth string with exactly `m`
    /// classes: zeros, then the forced new labels at the tail.
    fn first(&self) -> Option<Vec<usize>> {
        let (n, m) = (self.n, self.m);
        let mut rgs = vec![0usize; n];
        for (offset, slot) in rgs[n - (m - 1)..].iter_mut().enumerate() {
            *slot = offset + 1;
        }
        Some(rgs)
    }

    /// Advances `rgs` to the next restricted growth string with exactly
    /// `m` classes, in lexicographic order.
    fn advance(rgs: &mut [usize], n: usize, m: usize) -> bool {
        // prefix maxima
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
        }
        for i in (1..n).rev() {
            let cap = (prefix_max[i - 1] + 1).min(m - 1);
            if rgs[i] < cap {
                let new_label = rgs[i] + 1;
                rgs[i] = new_label;
                let used = prefix_max[i - 1].max(new_label) + 1;
                let remaining = n - i - 1;
                let missing = m - used;
                if missing > remaining {
                    continue;
                }
                // minimal suffix: zeros, then one of each missing label
                for slot in rgs[i + 1..].iter_mut() {
                    *slot = 0;
                }
                for (offset, slot) in rgs[n - missing..].iter_mut().enumerate() {
                    *slot = used + offset;
                }
                return true;
            }
        }
        false
    }

    fn passes_fixed(&self, rgs: &[usize]) -> bool {
        let Some(mask) = &self.fixed else { return true };
        let label = rgs[mask.iter().position(|&b| b).unwrap()];
        mask.iter()
            .zip(rgs)
            .all(|(&in_set, &l)| (l == label) == in_set)
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        loop {
            let previous = std::mem::replace(&mut self.state, IterState::Done);
            let rgs = match previous {
                IterState::Done => return None,
                IterState::Fresh => self.first()?,
                IterState::Running(mut rgs) => {
                    if !Self::advance(&mut rgs, self.n, self.m) {
                        return None;
                    }
                    rgs
                }
            };
            self.state = IterState::Running(rgs.clone());
            if self.passes_fixed(&rgs) {
                let labels: Vec<usize> = rgs.iter().map(|&l| l + 1).collect();
                return Some(Partition { n: self.n, m: self.m, assignment: labels });
            }
        }
    }
}
