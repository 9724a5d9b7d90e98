use serde::{Deserialize, Serialize};

use super::rotations::RotationFamily;
use super::tower::{build_tower, Tower, TowerSpec};
use crate::error::Result;

/// A tower together with its rotation family, as archived in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcebergDocument {
    pub tower: TowerSpec,
    pub rotations: RotationFamily,
}

impl IcebergDocument {
    pub fn new(tower: &Tower, rotations: RotationFamily) -> Self {
        Self { tower: tower.spec().clone(), rotations }
    }

    /// Rebuilds the tower and checks the family against it.
    pub fn load(&self) -> Result<(Tower, RotationFamily)> {
        let tower = build_tower(&self.tower)?;
        self.rotations.validate(&tower)?;
        Ok((tower, self.rotations.clone()))
    }
}
