//! Exact computational homological algebra on finite-dimensional graded spaces.
//!
//! The crate is `no_std` (it needs `alloc`). All arithmetic is exact, either over the
//! rationals or over a prime field. Degrees are stored in the *shifted* convention:
//! every structure map (`m_k`, `l_k`, coderivations) has degree `+1`, Maurer-Cartan
//! elements have degree `0`, and all Koszul signs are computed from parities.
//!
//! Layout:
//! - [`scalar`], [`graded`], [`linalg`], [`symplectic`]: the substrate.
//! - [`family`], [`coalgebra`]: multilinear maps and their coderivation lifts.
//! - [`structures`], [`ibl`]: A∞, L∞, cyclic and loop structures, cyclic cochains.
//! - [`transfer`]: pre-Hodge data, tree expansion and the decomposition model.
//! - [`deformation`]: Maurer-Cartan residuals, order-by-order solving, cohomology.
//! - [`ocha`]: classical and quantum open-closed morphism identities.
#![no_std]

extern crate alloc;

pub mod coalgebra;
pub mod cohomology;
pub mod deformation;
pub mod error;
pub mod family;
pub mod graded;
pub mod ibl;
pub mod linalg;
pub mod poly;
pub mod ocha;
pub mod report;
pub mod scalar;
pub mod structures;
pub mod symplectic;
pub mod transfer;
pub mod trees;

pub use error::{Error, Result};
pub use graded::{Element, GradedSpace};
pub use scalar::Scalar;
