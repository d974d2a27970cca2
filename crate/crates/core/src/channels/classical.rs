use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::sequence::ProbabilitySequence;
use crate::tolerances::STOCHASTIC;

/// Classical Markov chain. `transition` is column-stochastic and acts on
/// column probability vectors: `pi_{n+1} = T pi_n`. The readout is
/// `p_n = m . T^n pi_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChain {
    transition: RealMatrix,
    initial: Vec<f64>,
    indicator: Vec<f64>,
}

impl ClassicalChain {
    pub fn new(transition: RealMatrix, initial: Vec<f64>, indicator: Vec<f64>) -> Result<Self> {
        let d = transition.dim()?;
        if initial.len() != d || indicator.len() != d {
            return Err(Error::dim(format!(
                "chain of {d} states needs initial and indicator vectors of length {d}"
            )));
        }
        if transition.as_slice().iter().any(|&t| t < 0.0) {
            return Err(Error::invalid("transition matrix has a negative entry"));
        }
        for col in 0..d {
            let s: f64 = (0..d).map(|row| transition[(row, col)]).sum();
            if (s - 1.0).abs() > STOCHASTIC {
                return Err(Error::invalid(format!("column {col} of the transition matrix sums to {s}")));
            }
        }
        if initial.iter().any(|&x| x < 0.0) || (initial.iter().sum::<f64>() - 1.0).abs() > STOCHASTIC {
            return Err(Error::invalid("initial distribution must be nonnegative and sum to 1"));
        }
        if indicator.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::invalid("indicator entries must lie in [0, 1]"));
        }
        Ok(Self { transition, initial, indicator })
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn transition(&self) -> &RealMatrix {
        &self.transition
    }

    /// Random chain with Dirichlet(1)-distributed columns and initial
    /// distribution, and a uniform indicator.
    pub fn random(d: usize, rng: &mut impl Rng) -> Self {
        let simplex = |rng: &mut dyn rand::RngCore| {
            let raw: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let cols: Vec<Vec<f64>> = (0..d).map(|_| simplex(rng)).collect();
        let mut t = RealMatrix::from_fn(d, d, |i, j| cols[j][i]);
        // push the column sums onto exactly 1 at the diagonal
        for j in 0..d {
            let s: f64 = (0..d).map(|i| t[(i, j)]).sum();
            t[(j, j)] += 1.0 - s;
        }
        let initial = simplex(rng);
        let indicator = (0..d).map(|_| rng.random::<f64>()).collect();
        Self::new(t, initial, indicator).expect("valid by construction")
    }

    /// `p_n = m . T^n pi_0` for `n = 0 .. len-1`.
    pub fn sequence(&self, len: usize) -> Result<ProbabilitySequence> {
        let mut dist = self.initial.clone();
        let mut out = Vec::with_capacity(len);
        for n in 0..len {
            out.push(self.indicator.iter().zip(&dist).map(|(a, b)| a * b).sum());
            if n + 1 < len {
                dist = self.transition.matvec(&dist)?;
            }
        }
        ProbabilitySequence::clamped(out)
    }
}

/// Free-function form of [`ClassicalChain::sequence`].
pub fn classical_sequence(chain: &ClassicalChain, len: usize) -> Result<ProbabilitySequence> {
    chain.sequence(len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_chain_is_constant() {
        let chain = ClassicalChain::new(RealMatrix::identity(3), vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 1.0]).unwrap();
        let p = chain.sequence(6).unwrap();
        assert!(p.iter().all(|&x| (x - 0.7).abs() < 1e-15));
    }

    #[test]
    fn flip_chain_alternates() {
        let t = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let chain = ClassicalChain::new(t, vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(chain.sequence(6).unwrap().values(), &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn rejects_row_stochastic_matrix() {
        let t = RealMatrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(ClassicalChain::new(t, vec![1.0, 0.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn random_chains_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for d in 1..6 {
            let chain = ClassicalChain::random(d, &mut rng);
            assert!(chain.sequence(10).is_ok());
        }
    }
}
