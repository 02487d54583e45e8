//! Acceptance criteria for the nibblepack workspace. The checks live in
//! `tests/acceptance.rs`; each criterion is one test that prints a single
//! `PASS` or `FAIL` line.
