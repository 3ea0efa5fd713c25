//! Keeps the book honest: every chapter is included as a doc comment here,
//! so `cargo test` compiles and runs each of its code blocks. A snippet that
//! drifts out of sync with the library fails the build, chapter by chapter.

#[doc = include_str!("../../../README.md")]
pub mod readme {}

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/getting-started.md")]
pub mod getting_started {}

#[doc = include_str!("../../../book/src/wave-packets.md")]
pub mod wave_packets {}

#[doc = include_str!("../../../book/src/potentials.md")]
pub mod potentials {}

#[doc = include_str!("../../../book/src/propagation.md")]
pub mod propagation {}

#[doc = include_str!("../../../book/src/steering.md")]
pub mod steering {}

#[doc = include_str!("../../../book/src/feedback.md")]
pub mod feedback {}

#[doc = include_str!("../../../book/src/programmed-potentials.md")]
pub mod programmed_potentials {}

#[doc = include_str!("../../../book/src/coupled-systems.md")]
pub mod coupled_systems {}

#[doc = include_str!("../../../book/src/stability.md")]
pub mod stability {}

#[doc = include_str!("../../../book/src/scenarios-and-cli.md")]
pub mod scenarios_and_cli {}
