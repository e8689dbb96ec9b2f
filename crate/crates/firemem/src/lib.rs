//! Boolean networks with firing memory.
//!
//! A firing-memory network couples each node of a boolean network to a
//! countdown: when a node's local rule fires, the node switches on and
//! holds its state for up to `dt_i` steps while the counter drains. This
//! crate provides
//!
//! * the network representation and exact synchronous update ([`net`]),
//! * trajectory, attractor and prediction machinery plus an exhaustive
//!   state-space census ([`dynamics`]),
//! * the clock / block / prime-union gadget families with verifiable
//!   period claims ([`gadgets`]),
//! * monotone boolean circuits: parsing, iterated evaluation and
//!   normalization to the alternating degree-4 form ([`circuit`]),
//! * a compiler from alternating circuits to conjunctive firing-memory
//!   networks with uniform delay 2, together with the encoding between
//!   circuit inputs and block states ([`compiler`]).
//!
//! The `firemem` binary exposes the same operations as subcommands; the
//! crate `examples/` directory walks through each capability.

pub mod circuit;
pub mod cli;
pub mod compiler;
pub mod dynamics;
pub mod gadgets;
pub mod net;

pub use dynamics::{brute_force_census, find_attractor, period_of, predict};
pub use net::{FmNetwork, FmState, LocalRule, NodeId, RuleKind};
