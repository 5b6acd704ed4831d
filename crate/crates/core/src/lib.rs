//! Distribution privacy for finite mechanisms.
//!
//! The crate covers finite labeled distributions and stochastic kernels,
//! f-divergences and (approximate) max divergence, exact discrete optimal
//! transport, coupling-based obfuscation mechanisms with their
//! compositions, and auditors that check privacy and utility bounds
//! numerically.
//!
//! ```
//! use distp::prelude::*;
//!
//! let g = Ground::new(["1", "2", "3"]).unwrap();
//! let lambda = FiniteDistribution::new(g.clone(), vec![0.2, 0.5, 0.3]).unwrap();
//! let mu = FiniteDistribution::new(g.clone(), vec![0.3, 0.2, 0.5]).unwrap();
//! let d = GroundMetric::line(g);
//! let w1 = emd(&lambda, &mu, &d).unwrap();
//! assert!((w1.cost - 0.3).abs() < 1e-12);
//! ```

pub mod audit;
pub mod divergence;
pub mod error;
pub mod io;
pub mod mechanism;
pub mod prob;
pub mod sample;
pub mod serde_ext;
pub mod tolerance;
pub mod transport;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::audit::{
        audit_distp, audit_div_dp, audit_div_xdp, audit_xdistp, check_cp_theorem, expected_utility_loss,
        worst_case_loss, AuditReport, Verdict,
    };
    pub use crate::divergence::{
        approx_max_divergence, approx_max_divergence_exhaustive, delta_required, f_divergence, max_divergence,
        Divergence, FDivergence,
    };
    pub use crate::error::{Error, Result};
    pub use crate::mechanism::{
        build_coupling_mechanism, cp_kernel, geometric_mechanism, liftseq_compose, post_process, randomized_response,
        seq_compose, AdaptiveKernel, AuxIndexedKernel, CouplingMechanismSpec, CouplingMode, Fallback,
    };
    pub use crate::prob::{
        DistributionPairRelation, FiniteDistribution, Ground, GroundMetric, Label, PointRelation, StochasticKernel,
        TaggedDistribution,
    };
    pub use crate::tolerance::{TAU_MASS, TAU_NUM, TAU_ZERO};
    pub use crate::transport::{
        diameter, emd, lifted_member, lifted_w1_member, northwest_corner, transport, validate_coupling,
        wasserstein_inf, wasserstein_p, Coupling, CostMatrix, DistributionMetric,
    };
}
