//! The guide's chapters, compiled as doc-tests.
//!
//! Each module below embeds one chapter from `book/src/`, so every fenced
//! Rust snippet in the book runs under `cargo test --workspace`. If the
//! library's API or behavior drifts from what the book claims, the build
//! breaks here — the guide cannot go stale silently.
//!
//! The rendered book is built separately with `mdbook build book` from the
//! workspace root.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/map.md")]
pub mod map {}

#[doc = include_str!("../../../book/src/modulation.md")]
pub mod modulation {}

#[doc = include_str!("../../../book/src/channel.md")]
pub mod channel {}

#[doc = include_str!("../../../book/src/receiver.md")]
pub mod receiver {}

#[doc = include_str!("../../../book/src/theory.md")]
pub mod theory {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
