//! Participatory budgeting rules, candidate control solvers and
//! control-based project strength measures.
//!
//! The crate is organised bottom-up:
//!
//! * [`instance`], [`tiebreak`], [`outcome`] and [`rational`] hold the domain model.
//! * [`rules`] implements GreedyAV, GreedyCost, Phragmén and Equal-Shares with exact arithmetic.
//! * [`control`] answers constructive/destructive control by deleting or adding projects.
//! * [`measures`] turns control into project-strength measures (optimal control size,
//!   cheapest deletion, win probability, rivalry, baselines, correlation).
//! * [`reductions`] builds the exact-cover based hardness instances used as test corpora.
//! * [`pabulib`] reads and writes `.pb` election files.
//! * [`cli`] is the command-line frontend used by the `pb-control` binary.

pub mod cli;
pub mod control;
pub mod instance;
pub mod measures;
pub mod outcome;
pub mod pabulib;
pub mod rational;
pub mod reductions;
pub mod report;
pub mod rules;
pub mod tiebreak;

pub use control::{ControlAnswer, ControlError, ControlQuery, Goal, Operation, Solver};
pub use instance::{validate_instance, Instance, InstanceBuilder, InstanceError, ProjectId, RawInstance};
pub use outcome::{Outcome, TraceEvent};
pub use rational::Rational;
pub use rules::{RuleError, RuleId};
pub use tiebreak::TieBreakOrder;
