//! Single-qubit coherence transformations under the incoherent-operation
//! hierarchy CPO ⊂ PIO ⊂ SIO = IO.
//!
//! The crate answers two questions about a pair of qubit states written in
//! cylindrical Bloch coordinates `(z, r, theta)`:
//!
//! * **Reachability**: is the target inside the transformation region of
//!   the source under a given operation class? IO and SIO share an
//!   ellipse-with-cap region, PIO a convex hexagon, CPO a four-point orbit
//!   ([`regions`]).
//! * **Synthesis**: produce an explicit Kraus set (or mixture) that maps
//!   the source to the target: a two-operator diagonal/anti-diagonal
//!   channel for IO, a convex family mixture for PIO, a phased permutation
//!   for CPO, plus the state-dependent rewrite of any incoherent channel
//!   into a strictly incoherent one ([`synthesis`]).
//!
//! Everything analytic is double-checked at desk scale by brute-force
//! Monte-Carlo sampling and a numeric extremum certificate ([`oracle`]).

pub mod channels;
pub mod docs;
pub mod error;
pub mod mat2;
pub mod oracle;
pub mod qubit;
pub mod regions;
pub mod synthesis;

pub use channels::{
    apply, apply_selective, classify, conjugate_channel, ChannelClass, Classification,
    KrausOperator, KrausSet, PioFamily, SelectiveOutcome,
};
pub use error::{Error, Result};
pub use mat2::Mat2;
pub use qubit::{
    bloch_to_density, density_to_bloch, l1_coherence, phase_reduce, BlochState, DensityMatrix,
    DephasingPair, DiagUnitary, TOL,
};
pub use regions::{
    cpo_orbit, cpo_reachable, io_region_boundary, io_region_contains, pio_region_contains,
    pio_region_vertices, region_contains, BindingConstraint, Hexagon, RegionReport,
};
pub use synthesis::{
    io_to_sio, synth_cpo, synth_io, synth_pio, PioMixture, SioConversionSolution, SynthesisSolution,
};
