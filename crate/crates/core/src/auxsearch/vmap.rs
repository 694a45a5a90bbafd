use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probcore::{Channel, JointDistribution};
use crate::vars::{A, C, V};

/// Largest `|C|` for which partitions are enumerated (Bell(10) = 115975).
pub const MAX_C_FOR_ENUMERATION: usize = 10;
/// H(C|A,V) above this disqualifies a partition.
pub const VMAP_TOL: f64 = 1e-10;

/// Deterministic auxiliary variable V = g(C), given as a partition of the
/// symbols of C. Labels are canonical: first occurrence order, starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VMap {
    partition: Vec<usize>,
    labels: usize,
}

impl VMap {
    /// Relabels an arbitrary map from C symbols to labels into canonical form.
    pub fn from_partition(map: &[usize]) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::InvalidArgument("empty V map".into()));
        }
        let mut seen: Vec<usize> = Vec::new();
        let partition = map
            .iter()
            .map(|l| match seen.iter().position(|s| s == l) {
                Some(i) => i,
                None => {
                    seen.push(*l);
                    seen.len() - 1
                }
            })
            .collect();
        Ok(Self {
            partition,
            labels: seen.len(),
        })
    }

    /// V = C.
    pub fn identity(size: usize) -> Self {
        Self {
            partition: (0..size).collect(),
            labels: size,
        }
    }

    /// V constant.
    pub fn merge_all(size: usize) -> Self {
        Self {
            partition: vec![0; size],
            labels: 1,
        }
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    /// Number of V symbols.
    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn apply(&self, c: usize) -> usize {
        self.partition[c]
    }

    /// p(V|C) as a 0/1 channel from `C` to `V`.
    pub fn channel(&self) -> Channel {
        Channel::deterministic(C, V, &self.partition, self.labels)
            .expect("canonical partitions are valid deterministic maps")
    }

    /// H(C | A, V) on a joint containing `A` and `C`.
    pub fn residual(&self, j_ace: &JointDistribution) -> Result<f64> {
        let table = ac_table(j_ace)?;
        if table.first().map_or(0, Vec::len) != self.partition.len() {
            return Err(Error::AlphabetMismatch(format!(
                "V map covers {} symbols of C, the source has {}",
                self.partition.len(),
                table.first().map_or(0, Vec::len)
            )));
        }
        Ok(self.residual_on(&table))
    }

    fn residual_on(&self, p_ac: &[Vec<f64>]) -> f64 {
        let mut h = 0.0;
        let mut block = vec![0.0; self.labels];
        for row in p_ac {
            block.iter_mut().for_each(|b| *b = 0.0);
            for (c, &m) in row.iter().enumerate() {
                block[self.partition[c]] += m;
            }
            for (c, &m) in row.iter().enumerate() {
                if m > 0.0 {
                    h -= m * (m / block[self.partition[c]]).log2();
                }
            }
        }
        h.max(0.0)
    }
}

/// p(a, c) as rows over a.
fn ac_table(j: &JointDistribution) -> Result<Vec<Vec<f64>>> {
    let m = j.marginal(&[A, C])?;
    let nc = m.axis(C)?.size();
    Ok(m.mass().chunks(nc).map(<[f64]>::to_vec).collect())
}

/// All partitions of C whose induced V satisfies H(C|A,V) = 0, in
/// restricted-growth order (merge-all first, identity last). Relabelings are
/// never produced twice.
pub fn enumerate_vmaps(j_ace: &JointDistribution) -> Result<Vec<VMap>> {
    let nc = j_ace.axis(C)?.size();
    if nc > MAX_C_FOR_ENUMERATION {
        return Err(Error::AlphabetTooLarge {
            what: "C".into(),
            size: nc,
            limit: MAX_C_FOR_ENUMERATION,
        });
    }
    let table = ac_table(j_ace)?;
    let mut out = Vec::new();
    let mut rgs = vec![0usize; nc];
    loop {
        let labels = rgs.iter().max().map_or(0, |m| m + 1);
        let vm = VMap {
            partition: rgs.clone(),
            labels,
        };
        if vm.residual_on(&table) <= VMAP_TOL {
            out.push(vm);
        }
        if !next_rgs(&mut rgs) {
            break;
        }
    }
    Ok(out)
}

/// Advances a restricted growth string; false once exhausted.
fn next_rgs(rgs: &mut [usize]) -> bool {
    let n = rgs.len();
    for i in (1..n).rev() {
        let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            rgs[i + 1..].iter_mut().for_each(|x| *x = 0);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(n: usize) -> usize {
        // Bell triangle
        let mut row = vec![1usize];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for x in &row {
                let v = next.last().unwrap() + x;
                next.push(v);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    fn count_all(n: usize) -> usize {
        let mut rgs = vec![0; n];
        let mut count = 1;
        while next_rgs(&mut rgs) {
            count += 1;
        }
        count
    }

    #[test]
    fn rgs_counts_match_bell_numbers() {
        for n in 1..=7 {
            assert_eq!(count_all(n), bell(n), "n = {n}");
        }
    }

    #[test]
    fn copy_source_admits_every_partition() {
        let j = JointDistribution::from_sizes(&[("A", 2), ("C", 2)], vec![0.5, 0.0, 0.0, 0.5])
            .unwrap();
        let v = enumerate_vmaps(&j).unwrap();
        assert_eq!(v, vec![VMap::merge_all(2), VMap::identity(2)]);
    }

    #[test]
    fn independent_source_needs_identity() {
        let j = JointDistribution::from_sizes(&[("A", 2), ("C", 2)], vec![0.25; 4]).unwrap();
        assert_eq!(enumerate_vmaps(&j).unwrap(), vec![VMap::identity(2)]);
    }

    #[test]
    fn singleton_alphabet() {
        let j = JointDistribution::from_sizes(&[("A", 2), ("C", 1)], vec![0.5, 0.5]).unwrap();
        assert_eq!(enumerate_vmaps(&j).unwrap(), vec![VMap::identity(1)]);
    }

    #[test]
    fn partial_merges_follow_support() {
        // given a = 0 only c in {0,1} occur, given a = 1 only c in {1,2}:
        // c0 and c2 never co-occur, so {0,2}{1} qualifies
        let j = JointDistribution::from_sizes(
            &[("A", 2), ("C", 3)],
            vec![0.25, 0.25, 0.0, 0.0, 0.25, 0.25],
        )
        .unwrap();
        let v = enumerate_vmaps(&j).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].partition(), &[0, 1, 0]);
        for vm in &v {
            assert!(vm.residual(&j).unwrap() <= VMAP_TOL);
        }
    }

    #[test]
    fn guard_and_canonical_labels() {
        let j = JointDistribution::from_sizes(&[("A", 1), ("C", 11)], vec![1.0 / 11.0; 11]).unwrap();
        assert!(matches!(enumerate_vmaps(&j), Err(Error::AlphabetTooLarge { .. })));
        let v = VMap::from_partition(&[7, 3, 7]).unwrap();
        assert_eq!(v.partition(), &[0, 1, 0]);
        assert_eq!(v.labels(), 2);
    }
}
