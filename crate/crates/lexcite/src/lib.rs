//! Citation extraction and citation-graph analytics for Ukrainian
//! court-decision text.
//!
//! The crate is organized as a processing chain:
//!
//! * [`textcite`] turns raw decision text into typed citation edges,
//! * [`graphstore`] assembles those edges into a bipartite
//!   decision/legislation graph and its co-citation projection,
//! * [`netmetrics`] fits degree distributions and computes centralities,
//! * [`communities`] finds Louvain communities and compares partitions,
//! * [`temporal`] tracks per-period citation dynamics,
//! * [`predictor`] trains the citation-importance classifier,
//! * [`validator`] computes precision/recall estimates for extraction,
//! * [`pipeline`] wires everything into an end-to-end corpus run.

pub mod communities;
pub mod error;
pub mod graphstore;
pub mod netmetrics;
pub mod pipeline;
pub mod predictor;
pub mod temporal;
pub mod textcite;
pub mod validator;

pub use error::{Error, Result};
