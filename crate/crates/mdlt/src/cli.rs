//! Batch front end (placeholder while the library stabilises).
