//! Illustrative textures at exact pixel-coverage densities, perceptual spaces
//! recovered from pairwise similarity ratings, and perceptually uniform
//! density levels derived from those spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`raster`] – coverage grids, primitive rasterization, pyramids, image I/O.
//! * [`geometry`] – Delaunay triangulation, discrete Voronoi labels, Lloyd relaxation.
//! * [`synth`] – stipple, triangle, hatch and crosshatch generators, weighted
//!   Linde-Buzo-Gray stippling and continuous texture maps.
//! * [`analysis`] – rating ingestion, participant screening, metric MDS, INDSCAL
//!   and Kabsch alignment.
//! * [`reparam`] – Savitzky-Golay curve fitting, arc-length sampling, density
//!   lookup and the sigmoid density mapping.
//! * [`study`] and [`server`] – rating sessions and their HTTP/JSON backend.
//! * [`cli`] – the `uniform-textures` command line.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod raster;
pub mod reparam;
pub mod server;
pub mod study;
pub mod synth;

pub use error::{Error, Result};
pub use raster::{Primitive, Raster};
