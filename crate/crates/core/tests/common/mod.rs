#![allow(dead_code)]

use std::collections::BTreeSet;

use intsec::catalog::TableFixture;
use intsec::multiplicity::embedding_outcomes;
use intsec::mwl::{build_mw, MWStructure};
use intsec::rootsys::LatticeSpec;

/// Distinct trivial lattices of the reference table, in entry order.
pub fn table_specs() -> Vec<LatticeSpec> {
    let mut seen = BTreeSet::new();
    TableFixture::embedded().entries.into_iter().map(|e| e.spec).filter(|s| seen.insert(s.clone())).collect()
}

/// One structure per inequivalent embedding of every table lattice.
pub fn all_structures() -> Vec<MWStructure> {
    table_specs().iter().flat_map(embedding_outcomes).map(|(emb, _)| build_mw(&emb)).collect()
}
