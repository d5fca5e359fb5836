//! A numerical laboratory for regular Cantor sets.
//!
//! Cantor sets are built from expanding Markov maps ([`cantor`]); the other
//! modules measure them ([`dimension`]), add and subtract them ([`setops`]),
//! decide when two of them must intersect ([`intersect`]), relate continued
//! fractions to the Lagrange spectrum ([`spectra`]) and ground everything in
//! small dynamical systems ([`dynamics`]).

pub mod cantor;
pub mod catalog;
pub mod dimension;
pub mod dynamics;
pub mod error;
pub mod interval;
pub mod intersect;
pub mod setops;
pub mod spectra;

pub use cantor::{Containment, Cover, CoverConfig, RegularCantorSet};
pub use error::{Error, Result};
pub use interval::{Interval, IntervalUnion};
