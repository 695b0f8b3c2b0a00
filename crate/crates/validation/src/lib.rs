//! Holds the `acceptance` test target; run it with
//! `cargo test -p perturbreg-validation --test acceptance`.
