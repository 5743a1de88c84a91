//! Induction of natural language resources for ontology verbalizers: names
//! for entities and sentence plans for relations, mined from an annotated
//! document corpus.

pub mod corpus;
pub mod features;
pub mod nlname;
pub mod maxent;
pub mod ontology;
pub mod pipeline;
pub mod ranker;
pub mod realize;
pub mod sentplan;
pub mod slots;
pub mod store;
pub mod text;
