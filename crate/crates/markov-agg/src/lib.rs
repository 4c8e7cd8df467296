//! State space reduction of regular discrete-time Markov chains.
//!
//! Given a chain with kernel `P`, a partition of the state space induces a
//! projected process that is generally not Markov. This crate computes the
//! best Markov approximation of that projection, bounds the approximation
//! error from above through two lifting constructions (a fixed-distribution
//! lifting and a transition-profile lifting), and searches for good
//! partitions either exhaustively or greedily via agglomerative
//! information-bottleneck merging. A reaction-network front end turns
//! mass-action CTMC models into uniformized DTMCs so the same machinery
//! applies to stochastic chemical kinetics.
//!
//! All information quantities are in bits (log base 2).

pub mod aggregation;
pub mod chain;
pub mod error;
pub mod info;
pub mod partition;
pub mod reaction;
pub mod search;
pub mod textio;

pub use aggregation::{
    aggregate, lumpability_check, p_lift, pi_lift, AggregatedChain, LiftMethod, LiftedChain,
    LumpabilityReport, LUMPABILITY_TOL,
};
pub use chain::{DistributionVector, MarkovChain, StochasticMatrix};
pub use error::{Error, Result};
pub use info::{
    entropy, entropy_rate, evaluate, finite_n_projection_kld, kldr_markov, mu_lift_bound,
    relevant_loss_x, relevant_loss_y, MetricReport, RelevantLossX,
};
pub use partition::{enumerate_partitions, Partition};
pub use reaction::{
    gene_expression_network, parse_network, uniformize, Generator, Reaction, ReactionNetwork,
    Uniformized,
};
pub use search::{
    aib_greedy, aib_trace, exhaustive_search, strict_local_minima, sweep, Criterion, FixedClass,
    SearchResult, SweepMethod, SweepRecord,
};
