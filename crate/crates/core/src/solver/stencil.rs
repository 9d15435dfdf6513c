use crate::bellman::{build_bellman_family, BellmanFamily};
use crate::error::Result;
use crate::grid::{Direction, DirectionSet};

/// Stencil directions together with the Bellman family built on them.
#[derive(Clone, Debug)]
pub struct StencilSet {
    family: BellmanFamily,
}

impl StencilSet {
    pub fn new(n: usize, refinement: usize) -> Result<Self> {
        Ok(StencilSet {
            family: build_bellman_family(n, refinement)?,
        })
    }

    pub fn from_family(family: BellmanFamily) -> Self {
        StencilSet { family }
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn refinement(&self) -> usize {
        self.family.refinement()
    }

    pub fn family(&self) -> &BellmanFamily {
        &self.family
    }

    pub fn directions(&self) -> &[Direction] {
        self.family.directions().directions()
    }

    pub fn direction_set(&self) -> &DirectionSet {
        self.family.directions()
    }

    /// Largest grid offset along one axis used by any stencil arm.
    pub fn reach(&self) -> i32 {
        self.family.directions().reach()
    }
}
