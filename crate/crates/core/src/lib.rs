//! Decides whether finite set families are Frankl-complete, produces
//! checkable certificates for both answers, and computes the characteristic
//! minimal FC and maximal nonFC families of small universes.

pub mod characterize;
pub mod classify;
pub mod covering;
pub mod enumeration;
pub mod error;
pub mod family;
pub mod io;
pub mod irreducible;
pub mod iso;
pub mod linarith;
pub mod search;
pub mod small;
pub mod weights;

pub use error::{Error, Result};
pub use family::{
    closure, insert_close, insert_close_for, is_frankl, is_union_closed, is_union_closed_for,
    parse_family, sum_fam, Collection, Family, SetWord,
};
pub use weights::WeightFn;
