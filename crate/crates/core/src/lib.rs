//! Health-insurance fraud analytics: claim ingestion, trigger rules, a boosted-tree
//! fraud classifier, ROC/F1 evaluation, and fraud-versus-epidemic rate statistics.
pub mod claims;
pub mod format;
pub mod gbm;
pub mod metrics;
pub mod stats;
pub mod synth;
pub mod triggers;

#[cfg(test)]
mod test_support;
