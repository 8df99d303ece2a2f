//! Exact convex analysis over rational polyhedra.
//!
//! Sets are [`HPoly`](polyhedron::HPoly)s with [`Rat`](rational::Rat)
//! coefficients, and every question about them is settled by an exact LP
//! ([`lp`]) or an exact projection ([`projection`]). On that base the crate
//! provides relative interiors, normal cones and proper separation
//! ([`cone`]), max-affine functions and their subdifferentials
//! ([`function`]), and set-valued mappings with their coderivatives
//! ([`mapping`]). [`harness`] checks the calculus rules that connect them on
//! seeded random instances; [`cli`] and [`doc`] expose all of it through a
//! JSON command line.
//!
//! ```
//! use polycal::cone::{cone_member, normal_cone};
//! use polycal::linalg::ints;
//! use polycal::polyhedron::{ri_member, HPoly};
//!
//! let square = HPoly::bounds(&ints(&[0, 0]), &ints(&[2, 2]));
//! assert!(ri_member(&square, &ints(&[1, 1])).unwrap());
//!
//! // at the corner (2, 0) the normal cone is the fourth quadrant
//! let n = normal_cone(&square, &ints(&[2, 0])).unwrap();
//! assert!(cone_member(&n, &ints(&[3, -1])).unwrap());
//! assert!(!cone_member(&n, &ints(&[-1, 0])).unwrap());
//! ```

pub mod error;
pub mod linalg;
pub mod lp;
pub mod polyhedron;
pub mod projection;
pub mod rational;
pub mod cone;
pub mod function;
pub mod mapping;
pub mod doc;
pub mod harness;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/polyhedra.md")]
    mod polyhedra {}
    #[doc = include_str!("../../../book/src/relative-interior.md")]
    mod relative_interior {}
    #[doc = include_str!("../../../book/src/cones.md")]
    mod cones {}
    #[doc = include_str!("../../../book/src/functions.md")]
    mod functions {}
    #[doc = include_str!("../../../book/src/mappings.md")]
    mod mappings {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
