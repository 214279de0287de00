//! Shape functions, quadrature and degree-of-freedom numbering.

mod basis;
mod dofmap;
mod quadrature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use basis::{p2_basis, pressure_basis, LocalPressure, ShapeSet};
pub use dofmap::{build_dof_map, DofMap, PressureLayout};
pub use quadrature::{quadrature, QuadratureRule};

/// The discrete pressure space paired with quadratic velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PressureSpaceKind {
    /// Continuous piecewise linear.
    TaylorHood,
    /// Continuous piecewise linear plus one constant per element.
    #[serde(rename = "LC")]
    Lc,
    /// `Lc` with the constant of every element having two boundary sides
    /// tied to the constant of its edge neighbour.
    #[serde(rename = "LCTied")]
    LcTied,
}

impl PressureSpaceKind {
    /// Local pressure functions per element: `L1, L2, L3` and, for the LC
    /// kinds, the constant.
    pub fn local_dofs(self) -> usize {
        if self.has_constants() {
            4
        } else {
            3
        }
    }

    pub fn has_constants(self) -> bool {
        !matches!(self, PressureSpaceKind::TaylorHood)
    }

    /// Short name used on the command line and in reports.
    pub fn short_name(self) -> &'static str {
        match self {
            PressureSpaceKind::TaylorHood => "th",
            PressureSpaceKind::Lc => "lc",
            PressureSpaceKind::LcTied => "lctied",
        }
    }
}

impl FromStr for PressureSpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "th" | "taylorhood" | "taylor-hood" => Ok(PressureSpaceKind::TaylorHood),
            "lc" => Ok(PressureSpaceKind::Lc),
            "lctied" | "lc-tied" => Ok(PressureSpaceKind::LcTied),
            _ => Err(Error::InvalidArgument(format!("unknown element '{s}' (expected th|lc|lctied)"))),
        }
    }
}

impl fmt::Display for PressureSpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}
