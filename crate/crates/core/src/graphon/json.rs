use serde::{Deserialize, Serialize};

use super::step::StepCochainGraphon;
use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// On-disk form: `values[i][j][g]` with `g` in `GroupSpec::enumerate` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphonJson {
    pub group: GroupSpec,
    pub part_measures: Vec<f64>,
    pub values: Vec<Vec<Vec<f64>>>,
}

impl GraphonJson {
    pub fn from_graphon(w: &StepCochainGraphon<f64>) -> Self {
        let k = w.parts();
        let order = w.group().order();
        let values = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..order).map(|g| *w.get(i, j, g)).collect())
                    .collect()
            })
            .collect();
        GraphonJson {
            group: w.group().clone(),
            part_measures: w.measures().to_vec(),
            values,
        }
    }

    /// Validates shape, symmetry and the `[0, 1]` range, naming the first
    /// violated invariant.
    pub fn into_graphon(self) -> Result<StepCochainGraphon<f64>> {
        let k = self.part_measures.len();
        let order = self.group.order();
        if self.values.len() != k || self.values.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidStepFunction(format!(
                "values must be {k} x {k} x {order}"
            )));
        }
        let mut flat = Vec::with_capacity(k * k * order);
        for (i, row) in self.values.iter().enumerate() {
            for (j, fiber) in row.iter().enumerate() {
                if fiber.len() != order {
                    return Err(Error::InvalidStepFunction(format!(
                        "values[{i}][{j}] has {} entries, group order is {order}",
                        fiber.len()
                    )));
                }
                flat.extend_from_slice(fiber);
            }
        }
        let w = StepCochainGraphon::new(self.group, self.part_measures, flat)?;
        w.check_graphon()?;
        Ok(w)
    }

    pub fn parse(s: &str) -> Result<StepCochainGraphon<f64>> {
        let raw: GraphonJson = serde_json::from_str(s)?;
        raw.into_graphon()
    }
}
