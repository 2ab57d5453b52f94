//! Finite-prefix witnesses and decidable equality on the eventually
//! periodic subclass.

pub mod certify;
pub mod ep;
pub mod witness;

pub use certify::{ep_of_row, ep_of_term};
pub use ep::{ep_equal, ep_normalize, EpError, EventuallyPeriodic};
pub use witness::{
    certify_unknowns, find_disagreement, membership_scan, verify_designated_escape, verify_escape,
    write_csv, Witness, WitnessKind,
};
