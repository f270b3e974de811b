//! Dimensions and admissible bases of the cohits `F_2 ⊗_A P_k`.

mod direct;
mod positive;
mod reports;
mod space;

pub use direct::{admissibility_sweep, direct_dimension, DirectSolution};
pub use positive::{positive_dimension, PositivePart};
pub use reports::{
    induced_m_classes, kameko_image_dimension, kameko_kernel_report, mothebe_dimension, omega_block,
    omega_block_by_intersection, positive_block_dims, qp0_qpplus_split, quotient_dimension, AdmissibleBasis,
    ImageMethod, ImageReport, KernelBlock, KernelReport, MCandidate, MClassReport, MInterpretation,
    OmegaBlockReport, Provenance, SplitReport,
};
pub use space::{CohitSpace, Compute, PartSource};
