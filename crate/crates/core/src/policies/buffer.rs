use crate::error::{Error, Result};

/// One interaction: the context shown, the action taken and its binary reward.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub step: usize,
    pub context: Vec<f64>,
    pub action: usize,
    pub reward: u8,
}

impl Round {
    pub fn new(step: usize, context: Vec<f64>, action: usize, reward: u8) -> Self {
        Self {
            step,
            context,
            action,
            reward,
        }
    }
}

/// Append-only log of rounds, strictly increasing in step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayBuffer {
    rounds: Vec<Round>,
}

impl ReplayBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, round: Round) -> Result<()> {
        if round.reward > 1 {
            return Err(Error::invalid(format!(
                "reward must be 0 or 1, got {}",
                round.reward
            )));
        }
        if let Some(last) = self.rounds.last() {
            if round.step <= last.step {
                return Err(Error::invalid(format!(
                    "round step {} does not follow step {}",
                    round.step, last.step
                )));
            }
        }
        self.rounds.push(round);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn count_action(&self, action: usize) -> usize {
        self.rounds.iter().filter(|r| r.action == action).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_must_increase() {
        let mut b = ReplayBuffer::new();
        b.push(Round::new(0, vec![1.0], 0, 1)).unwrap();
        b.push(Round::new(3, vec![1.0], 1, 0)).unwrap();
        assert!(b.push(Round::new(3, vec![1.0], 1, 0)).is_err());
        assert!(b.push(Round::new(4, vec![1.0], 1, 2)).is_err());
        assert_eq!(b.len(), 2);
        assert_eq!(b.count_action(1), 1);
    }
}
