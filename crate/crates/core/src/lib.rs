//! IS-A relation extraction from dependency-parsed Polish text.
//!
//! The pipeline reads CoNLL sentences ([`conll`]), selects copular trees
//! whose class noun carries the nominative or instrumental case
//! ([`copular`]), builds lemmatized instance and class phrases and filters
//! them ([`phrase`]), optionally collects "taki jak" enumerations
//! ([`hearst`]), aggregates everything with pseudo-subclass boosting
//! ([`store`]) and reports support-level sweeps and precision estimates
//! ([`eval`]). [`pipeline`] wires the stages to files.
//!
//! ```
//! use taxon::conll::parse_conll_str;
//! use taxon::phrase::{extract, FilterDictionaries};
//!
//! let text = "\
//! 1 Golden golden subst subst sg:nom:m3 3 subj
//! 2 retriever retriever subst subst sg:nom:m2 1 app
//! 3 jest być fin fin sg:ter:imperf 0 pred
//! 4 psem pies subst subst sg:inst:m2 3 pd
//! 5 myśliwskim myśliwski adj adj sg:loc:m3:pos 4 adjunct
//! 6 . . interp interp _ 3 punct
//! ";
//! let (sentences, _) = parse_conll_str("example", text);
//! let x = extract(&sentences[0], &FilterDictionaries::bundled()).unwrap();
//! assert_eq!(x.instance.text(), "golden retriever");
//! assert_eq!(x.class.text(), "pies myśliwski");
//! ```

pub mod conll;
pub mod copular;
pub mod error;
pub mod eval;
pub mod hearst;
pub mod phrase;
pub mod pipeline;
pub mod store;

pub use conll::{Sentence, Token};
pub use copular::ConstructKind;
pub use error::{Error, Result};
pub use phrase::{FilterDictionaries, Phrase, RawExtraction};
pub use store::{RelationKey, RelationRecord, RelationStore, SupportPolicy};
