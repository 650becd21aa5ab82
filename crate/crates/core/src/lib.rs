//! Certified experiments on the Stein-Ulam spiral map, Volterra quadratic
//! stochastic operators and random voting trees.
//!
//! Every predicate is decided either in exact rational arithmetic or with
//! outward-rounded dyadic intervals whose precision escalates until the
//! verdict is settled.
//!
//! ## Examples
//!
//! ```text
//! examples/
//! ├── tournaments.rs            # build, relabel and enumerate tournaments
//! ├── voting_trees.rs           # winners and exact guarantees
//! ├── root_distribution.rs      # V^d(uniform) and Monte Carlo agreement
//! ├── spiral_orbit.rs           # orbit tables, CSV and SVG
//! ├── hitting_times.rs          # certified corner hitting times
//! ├── bounds.rs                 # closed-form radii and step bounds
//! ├── sixpoints_certificate.rs  # six-point coverage certificate
//! ├── theorem_demo.rs           # six tripartite tournaments
//! └── run_config.rs             # drive a command from configuration text
//! ```
//!
//! Run one with `cargo run --release --example spiral_orbit`.

pub mod arith;
pub mod error;
pub mod experiments;
pub mod qso;
pub mod sixpoints;
pub mod spiral;
pub mod tournament;
pub mod votetree;
