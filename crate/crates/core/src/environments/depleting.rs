//! Cold-start recommendation with depleting rewards.
//!
//! Items are split at random into an existing half and a cold-start half.
//! A user's context summarizes their positive interactions with existing
//! items; the actions are the cold-start items. A positive (user, cold item)
//! pair pays 1 the first time it is recommended and 0 ever after.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Environment, Step};
use crate::error::{Error, Result};
use crate::models::split_indices;
use crate::seed;

/// Ratings at or above this value count as positive interactions.
pub const POSITIVE_RATING: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: u64,
    pub item: u64,
    pub rating: f64,
}

#[derive(Debug, Clone)]
pub struct DepletingEnv {
    user_ids: Vec<u64>,
    existing_items: Vec<u64>,
    cold_items: Vec<u64>,
    context_dim: usize,
    /// Row-major, one projected context per user.
    contexts: Vec<f64>,
    positives: HashSet<(usize, usize)>,
    depleted: HashSet<(usize, usize)>,
    /// Every answered step as (user, cold item, reward).
    log: Vec<(usize, usize, u8)>,
    passes: usize,
    seed: u64,
    order: Vec<usize>,
    cursor: usize,
    pending: Option<usize>,
}

impl DepletingEnv {
    pub fn from_ratings(
        ratings: &[Rating],
        seed: u64,
        context_dim: usize,
        passes: usize,
    ) -> Result<Self> {
        if context_dim == 0 {
            return Err(Error::invalid("context_dim must be positive"));
        }
        if passes == 0 {
            return Err(Error::invalid("passes must be positive"));
        }
        let mut users: Vec<u64> = ratings.iter().map(|r| r.user).collect();
        users.sort_unstable();
        users.dedup();
        let mut items: Vec<u64> = ratings.iter().map(|r| r.item).collect();
        items.sort_unstable();
        items.dedup();
        if items.len() < 4 {
            return Err(Error::invalid(format!(
                "need at least 4 distinct items to split, got {}",
                items.len()
            )));
        }

        let (existing_idx, cold_idx) =
            split_indices(items.len(), seed::derive(seed, seed::tag("items")));
        let existing_items: Vec<u64> = existing_idx.iter().map(|&i| items[i]).collect();
        let cold_items: Vec<u64> = cold_idx.iter().map(|&i| items[i]).collect();
        let user_pos: HashMap<u64, usize> =
            users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let existing_pos: HashMap<u64, usize> = existing_items
            .iter()
            .enumerate()
            .map(|(i, &u)| (u, i))
            .collect();
        let cold_pos: HashMap<u64, usize> = cold_items
            .iter()
            .enumerate()
            .map(|(i, &u)| (u, i))
            .collect();

        // Sparse random projection: entries ±√(3/k) with probability 1/6
        // each, 0 otherwise, drawn row by row for existing items.
        let mut rng = seed::rng(seed::derive(seed, seed::tag("projection")));
        let scale = (3.0 / context_dim as f64).sqrt();
        let projection: Vec<f64> = (0..existing_items.len() * context_dim)
            .map(|_| match rng.random_range(0..6) {
                0 => scale,
                1 => -scale,
                _ => 0.0,
            })
            .collect();

        let mut contexts = vec![0.0; users.len() * context_dim];
        let mut positives = HashSet::new();
        let mut seen_existing = HashSet::new();
        for r in ratings.iter().filter(|r| r.rating >= POSITIVE_RATING) {
            let u = user_pos[&r.user];
            if let Some(&c) = cold_pos.get(&r.item) {
                positives.insert((u, c));
            } else if seen_existing.insert((u, r.item)) {
                let e = existing_pos[&r.item];
                let row = &projection[e * context_dim..(e + 1) * context_dim];
                for (c, p) in contexts[u * context_dim..(u + 1) * context_dim]
                    .iter_mut()
                    .zip(row)
                {
                    *c += p;
                }
            }
        }

        let mut env = Self {
            user_ids: users,
            existing_items,
            cold_items,
            context_dim,
            contexts,
            positives,
            depleted: HashSet::new(),
            log: Vec::new(),
            passes,
            seed,
            order: Vec::new(),
            cursor: 0,
            pending: None,
        };
        env.reshuffle(0);
        Ok(env)
    }

    fn reshuffle(&mut self, pass: usize) {
        self.order = (0..self.user_ids.len()).collect();
        self.order
            .shuffle(&mut seed::rng(seed::derive(self.seed, pass as u64)));
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn existing_items(&self) -> &[u64] {
        &self.existing_items
    }

    pub fn cold_items(&self) -> &[u64] {
        &self.cold_items
    }

    pub fn user_context(&self, user: usize) -> &[f64] {
        &self.contexts[user * self.context_dim..(user + 1) * self.context_dim]
    }

    pub fn user_id(&self, user: usize) -> u64 {
        self.user_ids[user]
    }

    pub fn steps_per_pass(&self) -> usize {
        self.user_ids.len()
    }

    pub fn is_positive(&self, user: usize, cold_item: usize) -> bool {
        self.positives.contains(&(user, cold_item))
    }

    /// Every answered step as (user index, cold item index, reward).
    pub fn interaction_log(&self) -> &[(usize, usize, u8)] {
        &self.log
    }

    /// Total reward paid per (user, cold item) pair, recomputed from the log.
    pub fn reward_ledger(&self) -> BTreeMap<(usize, usize), u32> {
        let mut ledger = BTreeMap::new();
        for &(u, i, r) in &self.log {
            *ledger.entry((u, i)).or_insert(0) += u32::from(r);
        }
        ledger
    }
}

impl Environment for DepletingEnv {
    fn n_actions(&self) -> usize {
        self.cold_items.len()
    }

    fn context_dim(&self) -> usize {
        self.context_dim
    }

    fn len(&self) -> usize {
        self.user_ids.len() * self.passes
    }

    fn next_step(&mut self) -> Result<Option<Step>> {
        if self.pending.is_some() {
            return Err(Error::Protocol(
                "previous step has not been answered".into(),
            ));
        }
        if self.cursor >= self.len() {
            return Ok(None);
        }
        let per_pass = self.user_ids.len();
        if self.cursor > 0 && self.cursor.is_multiple_of(per_pass) {
            self.reshuffle(self.cursor / per_pass);
        }
        let user = self.order[self.cursor % per_pass];
        self.cursor += 1;
        self.pending = Some(user);
        Ok(Some(Step {
            context: self.user_context(user).to_vec(),
            eligible: (0..self.cold_items.len()).collect(),
        }))
    }

    fn reward(&mut self, action: usize) -> Result<u8> {
        let user = self
            .pending
            .take()
            .ok_or_else(|| Error::Protocol("no pending step to reward".into()))?;
        if action >= self.cold_items.len() {
            return Err(Error::invalid(format!("action {action} out of range")));
        }
        let pair = (user, action);
        let r = u8::from(self.positives.contains(&pair) && self.depleted.insert(pair));
        self.log.push((user, action, r));
        Ok(r)
    }

    fn optimal_action(&self) -> Option<usize> {
        let user = self.pending?;
        (0..self.cold_items.len())
            .find(|&c| self.positives.contains(&(user, c)) && !self.depleted.contains(&(user, c)))
    }
}

/// Ratings with group structure: users and items each belong to one of
/// `n_groups` groups; a user rates an item with probability `density`, and
/// the rating is high far more often within the user's own group.
pub fn gen_synthetic_ratings(
    n_users: usize,
    n_items: usize,
    n_groups: usize,
    density: f64,
    seed: u64,
) -> Vec<Rating> {
    let mut rng = seed::rng(seed);
    let groups = n_groups.max(1);
    let user_group: Vec<usize> = (0..n_users).map(|_| rng.random_range(0..groups)).collect();
    let item_group: Vec<usize> = (0..n_items).map(|_| rng.random_range(0..groups)).collect();
    let mut out = Vec::new();
    for u in 0..n_users {
        for i in 0..n_items {
            if rng.random::<f64>() >= density {
                continue;
            }
            let p_like = if user_group[u] == item_group[i] {
                0.8
            } else {
                0.1
            };
            let rating = if rng.random::<f64>() < p_like {
                5.0
            } else {
                2.0
            };
            out.push(Rating {
                user: u as u64 + 1,
                item: i as u64 + 1,
                rating,
            });
        }
    }
    out
}
