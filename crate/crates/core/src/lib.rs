//! Dagger categories of relations: dilators, independence structure,
//! relation composition by independent pullback and factorisation, and four
//! concrete instances (multivalued surjections, partial injections, finite
//! probability spaces, contractive matrices).

pub mod category;
pub mod cli;
pub mod demo;
pub mod dual;
pub mod error;
pub mod finprob;
pub mod independence;
pub mod kits;
pub mod laws;
pub mod matcontr;
pub mod msurj;
pub mod pinj;
pub mod relcat;
pub mod mutation;
pub mod report;
pub mod sample;
pub mod suites;

pub use category::{
    is_coisometry, is_isometry, is_unitary, Category, Codilatory, Cospan, DaggerCategory, Dilatory,
    Span, Square,
};
pub use dual::{dualize, Dual};
pub use error::{CatError, Result};
pub use report::Report;
