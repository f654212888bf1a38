//! Allocations: a bundle of good ids per agent.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    bundles: Vec<Vec<usize>>,
}

impl Allocation {
    /// Normalizes bundle order (ascending good ids). Disjointness and
    /// completeness are checked against a concrete instance separately.
    pub fn new(mut bundles: Vec<Vec<usize>>) -> Self {
        for b in &mut bundles {
            b.sort_unstable();
        }
        Allocation { bundles }
    }

    pub fn empty(agents: usize) -> Self {
        Allocation {
            bundles: vec![Vec::new(); agents],
        }
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> &[usize] {
        &self.bundles[agent]
    }

    pub fn push(&mut self, agent: usize, good: usize) {
        let b = &mut self.bundles[agent];
        match b.binary_search(&good) {
            Ok(_) => {}
            Err(pos) => b.insert(pos, good),
        }
    }

    pub fn remove(&mut self, agent: usize, good: usize) -> bool {
        let b = &mut self.bundles[agent];
        match b.binary_search(&good) {
            Ok(pos) => {
                b.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// All bundles pairwise disjoint, ids in range, and (when `complete`)
    /// every good allocated.
    pub fn validate(&self, instance: &Instance, complete: bool) -> Result<()> {
        let n = instance.agent_count();
        let m = instance.good_count();
        if self.bundles.len() != n {
            return Err(Error::InvalidAllocation(format!(
                "expected {n} bundles, got {}",
                self.bundles.len()
            )));
        }
        let mut owner = vec![usize::MAX; m];
        for (i, bundle) in self.bundles.iter().enumerate() {
            for &j in bundle {
                if j >= m {
                    return Err(Error::InvalidAllocation(format!(
                        "good id {j} out of range (m = {m})"
                    )));
                }
                if owner[j] != usize::MAX {
                    return Err(Error::InvalidAllocation(format!(
                        "good {j} assigned to agents {} and {i}",
                        owner[j]
                    )));
                }
                owner[j] = i;
            }
        }
        if complete {
            if let Some(j) = owner.iter().position(|&o| o == usize::MAX) {
                return Err(Error::InvalidAllocation(format!("good {j} is unallocated")));
            }
        }
        Ok(())
    }

    /// Exact utility of every agent under this allocation.
    pub fn utilities(&self, instance: &Instance) -> Vec<Rat> {
        self.bundles
            .iter()
            .enumerate()
            .map(|(i, b)| instance.bundle_value(i, b))
            .collect()
    }

    /// Builds an allocation from a good -> agent assignment vector.
    pub fn from_assignment(agents: usize, assignment: &[usize]) -> Self {
        let mut bundles = vec![Vec::new(); agents];
        for (good, &agent) in assignment.iter().enumerate() {
            bundles[agent].push(good);
        }
        Allocation { bundles }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Profile;
    use crate::rat::rat_int;

    fn identical(n: usize, values: Vec<i64>) -> Instance {
        Instance::new(
            vec![rat_int(1); n],
            Profile::Identical(values.into_iter().map(rat_int).collect()),
        )
        .unwrap()
    }

    #[test]
    fn validate_flags_overlap() {
        let inst = identical(2, vec![1, 2]);
        let alloc = Allocation::new(vec![vec![0, 1], vec![1]]);
        assert!(alloc.validate(&inst, true).is_err());
    }

    #[test]
    fn validate_flags_incomplete() {
        let inst = identical(2, vec![1, 2]);
        let alloc = Allocation::new(vec![vec![0], vec![]]);
        assert!(alloc.validate(&inst, true).is_err());
        assert!(alloc.validate(&inst, false).is_ok());
    }

    #[test]
    fn validate_flags_out_of_range() {
        let inst = identical(1, vec![1]);
        let alloc = Allocation::new(vec![vec![3]]);
        assert!(alloc.validate(&inst, false).is_err());
    }

    #[test]
    fn assignment_round_trip() {
        let alloc = Allocation::from_assignment(2, &[1, 0, 1]);
        assert_eq!(alloc.bundle(0), &[1]);
        assert_eq!(alloc.bundle(1), &[0, 2]);
    }
}
