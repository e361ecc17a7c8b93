//! Language tags, numeric-literal filtering, sampling and agreement between
//! declared tags and a language identifier.

mod agreement;
mod identify;
mod numeric;
mod sampling;
mod tags;
mod trigram;

pub use agreement::{judge, measure_agreement, Agreement, AgreementCounts, AgreementTable, CodeShares};
pub use identify::{
    normalize_code, CommandIdentifier, Identification, IdentifyError, LanguageIdentifier, MapIdentifier,
    NormalizedCode,
};
pub use numeric::{digit_ratio, is_numeric_literal};
pub use sampling::{is_text_literal, sample_literals, LanguageSample, LiteralSampler};
pub use tags::{reconcile_tag, LanguageCluster, TagReconciler};
pub use trigram::{TrigramIdentifier, DEFAULT_MIN_LENGTH};
