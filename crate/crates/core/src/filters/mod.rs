//! Filter methods: Pearson ranking, entropy-based symmetrical uncertainty and
//! correlation-based subset selection (CFS).

mod cfs;
mod entropy;
mod pearson;

pub use cfs::{cfs_merit, cfs_search, cfs_select, CfsConfig, CfsOutcome, MeritResult, SearchTrace, StopReason, SuTable};
pub use entropy::{discretize, entropy_bits, symmetrical_uncertainty, ContingencyTable, DiscretizedColumn, EntropyReport};
pub use pearson::{pearson, rank_pearson};
