//! Zero-shot word-image recognition core.
//!
//! This crate is `no_std` (it needs `alloc`) and holds everything that is pure
//! computation:
//!
//! * [`signature`]: PHOC / PHOS / Pho(SC) attribute-signature encoders.
//! * [`ctc`]: connectionist temporal classification loss, gradients and decoders.
//! * [`netcore`]: a small differentiable compute core (conv, pooling, SPP,
//!   dense, BiLSTM, Adam, finite-difference gradient checking).
//! * [`model`]: the multi-task signature network, the CTC recogniser, weight
//!   transfer between them and their training loops.
//! * [`matcher`]: cosine nearest-neighbour prediction for ZSL / GZSL.
//! * [`metrics`]: accuracies, harmonic mean, edit distance, CER and the
//!   length-wise confusion matrix.
//! * [`synth`]: procedural word-image rendering, augmentation and corpus plans.
//!
//! File formats, the CLI and all filesystem access live in the `phosc` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ctc;
pub mod image;
pub mod matcher;
pub mod metrics;
pub mod model;
pub mod netcore;
pub mod signature;
pub mod synth;

pub(crate) mod math;
pub(crate) mod rng;
