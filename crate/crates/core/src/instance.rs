//! Problem instances: agents with positive weights plus a valuation profile.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{rat_zero, Rat};

/// Valuation table of a single agent in a 2-valuable instance: a set of at
/// most two relevant goods plus a value for every nonempty subset of it.
///
/// `values` is parallel to the subsets of `goods` in the order
/// `{g0}`, `{g1}`, `{g0,g1}` (shorter for smaller `goods`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoTable {
    pub goods: Vec<usize>,
    pub values: Vec<Rat>,
}

impl TwoTable {
    pub fn new(mut goods: Vec<usize>, mut values: Vec<Rat>) -> Result<Self> {
        if goods.len() > 2 {
            return Err(Error::parse("tables", "T_i may contain at most 2 goods"));
        }
        if goods.len() == 2 && goods[0] == goods[1] {
            return Err(Error::parse("tables", "duplicate good in T_i"));
        }
        let expected = match goods.len() {
            0 => 0,
            1 => 1,
            _ => 3,
        };
        if values.len() != expected {
            return Err(Error::parse(
                "tables",
                format!("expected {expected} subset values, got {}", values.len()),
            ));
        }
        if goods.len() == 2 && goods[0] > goods[1] {
            goods.swap(0, 1);
            values.swap(0, 1);
        }
        for v in &values {
            if *v < rat_zero() {
                return Err(Error::parse("tables", "values must be nonnegative"));
            }
        }
        if goods.len() == 2 && (values[2] < values[0] || values[2] < values[1]) {
            return Err(Error::parse(
                "tables",
                "value of {j,j'} must be at least each single-good value",
            ));
        }
        Ok(TwoTable { goods, values })
    }

    /// Value of an arbitrary bundle, which only depends on `bundle ∩ T_i`.
    pub fn value_of(&self, bundle: &[usize]) -> Rat {
        let has = |g: usize| bundle.contains(&g);
        match self.goods.len() {
            0 => rat_zero(),
            1 => {
                if has(self.goods[0]) {
                    self.values[0].clone()
                } else {
                    rat_zero()
                }
            }
            _ => match (has(self.goods[0]), has(self.goods[1])) {
                (false, false) => rat_zero(),
                (true, false) => self.values[0].clone(),
                (false, true) => self.values[1].clone(),
                (true, true) => self.values[2].clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Profile {
    /// n×m matrix of nonnegative values, `matrix[i][j] = v_ij`.
    Additive(Vec<Vec<Rat>>),
    /// One shared value per good, `values[j] = u_j`.
    Identical(Vec<Rat>),
    /// One table per agent; goods outside every table are worthless.
    TwoValuable { tables: Vec<TwoTable>, goods: usize },
}

impl Profile {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Profile::Additive(_) => "additive",
            Profile::Identical(_) => "identical",
            Profile::TwoValuable { .. } => "two_valuable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    weights: Vec<Rat>,
    profile: Profile,
    goods: usize,
}

impl Instance {
    pub fn new(weights: Vec<Rat>, profile: Profile) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::parse("weights", "at least one agent required"));
        }
        for (i, w) in weights.iter().enumerate() {
            if *w <= rat_zero() {
                return Err(Error::parse(format!("weights[{i}]"), "weights must be positive"));
            }
        }
        let n = weights.len();
        let goods = match &profile {
            Profile::Additive(matrix) => {
                if matrix.len() != n {
                    return Err(Error::parse(
                        "profile.matrix",
                        format!("expected {n} rows, got {}", matrix.len()),
                    ));
                }
                let m = matrix.first().map(Vec::len).unwrap_or(0);
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != m {
                        return Err(Error::parse(
                            format!("profile.matrix[{i}]"),
                            format!("expected {m} columns, got {}", row.len()),
                        ));
                    }
                    for (j, v) in row.iter().enumerate() {
                        if *v < rat_zero() {
                            return Err(Error::parse(
                                format!("profile.matrix[{i}][{j}]"),
                                "values must be nonnegative",
                            ));
                        }
                    }
                }
                m
            }
            Profile::Identical(values) => {
                for (j, v) in values.iter().enumerate() {
                    if *v < rat_zero() {
                        return Err(Error::parse(
                            format!("profile.values[{j}]"),
                            "values must be nonnegative",
                        ));
                    }
                }
                values.len()
            }
            Profile::TwoValuable { tables, goods } => {
                if tables.len() != n {
                    return Err(Error::parse(
                        "profile.tables",
                        format!("expected {n} tables, got {}", tables.len()),
                    ));
                }
                for (i, t) in tables.iter().enumerate() {
                    for &g in &t.goods {
                        if g >= *goods {
                            return Err(Error::parse(
                                format!("profile.tables[{i}]"),
                                format!("good id {g} out of range (m = {goods})"),
                            ));
                        }
                    }
                }
                *goods
            }
        };
        Ok(Instance {
            weights,
            profile,
            goods,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.weights.len()
    }

    pub fn good_count(&self) -> usize {
        self.goods
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn symmetric_weights(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// `v_i({j})`.
    pub fn good_value(&self, agent: usize, good: usize) -> Rat {
        match &self.profile {
            Profile::Additive(matrix) => matrix[agent][good].clone(),
            Profile::Identical(values) => values[good].clone(),
            Profile::TwoValuable { tables, .. } => tables[agent].value_of(&[good]),
        }
    }

    /// `v_i(bundle)` for an arbitrary set of goods.
    pub fn bundle_value(&self, agent: usize, bundle: &[usize]) -> Rat {
        match &self.profile {
            Profile::Additive(matrix) => {
                let mut acc = rat_zero();
                for &j in bundle {
                    acc += &matrix[agent][j];
                }
                acc
            }
            Profile::Identical(values) => {
                let mut acc = rat_zero();
                for &j in bundle {
                    acc += &values[j];
                }
                acc
            }
            Profile::TwoValuable { tables, .. } => tables[agent].value_of(bundle),
        }
    }

    /// Shared per-good values when the profile is identical-additive.
    pub fn identical_values(&self) -> Option<&[Rat]> {
        match &self.profile {
            Profile::Identical(values) => Some(values),
            _ => None,
        }
    }

    /// True when every agent's valuation is additive over single goods
    /// (identical profiles included).
    pub fn is_additive(&self) -> bool {
        !matches!(self.profile, Profile::TwoValuable { .. })
    }

    /// Distinct positive values in an identical profile, ascending.
    pub fn distinct_positive_values(&self) -> Option<Vec<Rat>> {
        let values = self.identical_values()?;
        let mut distinct: Vec<Rat> = Vec::new();
        for v in values {
            if v.is_zero() {
                continue;
            }
            if !distinct.contains(v) {
                distinct.push(v.clone());
            }
        }
        distinct.sort();
        Some(distinct)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn rejects_nonpositive_weights() {
        let err = Instance::new(
            vec![rat_int(0)],
            Profile::Identical(vec![rat_int(1)]),
        )
        .unwrap_err();
        assert!(err.to_string().contains("positive"));
    }

    #[test]
    fn rejects_negative_values() {
        let err = Instance::new(
            vec![rat_int(1)],
            Profile::Additive(vec![vec![rat_int(-1)]]),
        )
        .unwrap_err();
        assert!(err.to_string().contains("nonnegative"));
    }

    #[test]
    fn rejects_ragged_matrix() {
        let err = Instance::new(
            vec![rat_int(1), rat_int(1)],
            Profile::Additive(vec![vec![rat_int(1), rat_int(2)], vec![rat_int(1)]]),
        )
        .unwrap_err();
        assert!(err.to_string().contains("columns"));
    }

    #[test]
    fn two_table_requires_monotone_pair_value() {
        let err = TwoTable::new(vec![0, 1], vec![rat_int(3), rat_int(1), rat_int(2)]).unwrap_err();
        assert!(err.to_string().contains("at least each single-good value"));
    }

    #[test]
    fn two_table_normalizes_good_order() {
        let t = TwoTable::new(vec![3, 1], vec![rat_int(5), rat_int(2), rat_int(6)]).unwrap();
        assert_eq!(t.goods, vec![1, 3]);
        assert_eq!(t.value_of(&[1]), rat_int(2));
        assert_eq!(t.value_of(&[3]), rat_int(5));
        assert_eq!(t.value_of(&[1, 3]), rat_int(6));
        assert_eq!(t.value_of(&[0]), rat_int(0));
    }

    #[test]
    fn bundle_value_ignores_goods_outside_table() {
        let inst = Instance::new(
            vec![rat_int(1)],
            Profile::TwoValuable {
                tables: vec![TwoTable::new(vec![0, 2], vec![rat_int(1), rat_int(4), rat_int(5)]).unwrap()],
                goods: 4,
            },
        )
        .unwrap();
        assert_eq!(inst.bundle_value(0, &[0, 1, 3]), rat_int(1));
        assert_eq!(inst.bundle_value(0, &[0, 2, 3]), rat_int(5));
    }
}
