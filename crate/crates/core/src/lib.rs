pub mod arith;
pub mod error;
pub mod index;
pub mod monomial;
pub mod steenrod;
pub mod gf2;
pub mod solver;
pub mod planner;
pub mod invariants;
pub mod workbench;

pub use error::{Error, Result};
pub use monomial::{Monomial, WeightVector};
pub use planner::{PlanNode, ReductionPlan, Step};
pub use solver::{AdmissibleBasis, CohitSpace, MInterpretation, PositivePart};
pub use workbench::{Command, Format, JobSpec, Output, ResultRecord, Settings, Template, Workbench};
