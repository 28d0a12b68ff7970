//! Feature-selection toolkit: filter, embedded and wrapper rankers on tabular
//! data, plus a benchmark that retrains a random forest on each selection and
//! compares AUCs.
//!
//! ```
//! use featsel::dataset::{synthesize, SynthSpec};
//! use featsel::filters::rank_pearson;
//!
//! let synth = synthesize(&SynthSpec::hotspot_like(300, 1)).unwrap();
//! let ranking = rank_pearson(&synth.dataset).unwrap();
//! assert_eq!(ranking.len(), 34);
//! ```

pub mod dataset;
pub mod error;
pub mod eval;
pub mod fealect;
pub mod filters;
pub mod forest;
pub mod linear;
pub mod ranking;
pub mod rfe;
pub mod seed;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/filters.md")]
    mod filters {}
    #[doc = include_str!("../../../book/src/linear.md")]
    mod linear {}
    #[doc = include_str!("../../../book/src/forest.md")]
    mod forest {}
    #[doc = include_str!("../../../book/src/wrappers.md")]
    mod wrappers {}
    #[doc = include_str!("../../../book/src/benchmark.md")]
    mod benchmark {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
}
