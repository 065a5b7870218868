pub mod catalog;
pub mod exact;
pub mod kodaira;
pub mod lattice;
pub mod multiplicity;
pub mod mwl;
pub mod rootsys;
pub mod weierstrass;
