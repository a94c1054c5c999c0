//! Longitudinal crawling, curation, and trend analysis of archived privacy
//! policies.
//!
//! The crate is organized around a staged pipeline:
//!
//! 1. [`corpus`] — the half-year time axis, target lists, and the on-disk
//!    document store with its metadata log.
//! 2. [`archive`] — a polite client for a web archive's CDX index and raw
//!    captures, plus a fixture-replaying mock server for offline runs.
//! 3. [`extract`] — tolerant HTML parsing, boilerplate removal, markdown
//!    conversion, language detection, and policy-link discovery.
//! 4. [`classifier`] — from-scratch random forest and logistic regression
//!    over n-gram features, with cross-validation and precision-first
//!    threshold selection.
//! 5. [`curation`] — parked-domain, cross-origin-redirect, and duplicate
//!    filtering of the raw document set.
//! 6. [`analysis`] — longitudinal metrics: lengths, readability, fuzzy-match
//!    update detection, change points, and term trends.
//! 7. [`pipeline`] — stage orchestration with digest-chained manifests.

pub mod analysis;
pub mod archive;
pub mod classifier;
pub mod config;
pub mod corpus;
pub mod curation;
pub mod extract;
pub mod parallel;
pub mod pipeline;
