use crate::error::Result;
use crate::probcore::JointDistribution;

/// Entropy-typicality over a tuple of variables and all of its sub-tuples.
///
/// A tuple of sequences is typical when every symbol combination has
/// positive probability and, for each nonempty subset S of the variables,
/// the empirical log-loss -(1/N) sum log2 p_S(x_i) lies within
/// `delta * H(S)` of H(S).
#[derive(Debug, Clone)]
pub struct TypicalityTest {
    sizes: Vec<usize>,
    /// Per nonempty subset mask: (-log2 p table over the subset, H(S)).
    subsets: Vec<(usize, Vec<f64>, f64)>,
    delta: f64,
}

impl TypicalityTest {
    pub fn new(j: &JointDistribution, vars: &[&str], delta: f64) -> Result<Self> {
        let m = j.marginal(vars)?;
        let sizes = m.shape();
        let k = vars.len();
        let mut subsets = Vec::with_capacity((1 << k) - 1);
        for mask in 1..(1usize << k) {
            let names: Vec<&str> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| vars[i]).collect();
            let sub = m.marginal(&names)?;
            let loss = sub
                .mass()
                .iter()
                .map(|&p| if p > 0.0 { -p.log2() } else { f64::INFINITY })
                .collect();
            subsets.push((mask, loss, sub.entropy_of(&names)?));
        }
        Ok(Self { sizes, subsets, delta })
    }

    /// `seqs[v][i]` is symbol `i` of variable `v`, in the order given to `new`.
    pub fn is_typical(&self, seqs: &[&[u8]]) -> bool {
        let n = seqs[0].len();
        if n == 0 {
            return true;
        }
        for (mask, loss, h) in &self.subsets {
            let mut total = 0.0;
            for i in 0..n {
                let mut idx = 0usize;
                for (v, seq) in seqs.iter().enumerate() {
                    if mask >> v & 1 == 1 {
                        idx = idx * self.sizes[v] + seq[i] as usize;
                    }
                }
                total += loss[idx];
            }
            if !total.is_finite() {
                return false;
            }
            if (total / n as f64 - h).abs() > self.delta * h + 1e-12 {
                return false;
            }
        }
        true
    }
}
