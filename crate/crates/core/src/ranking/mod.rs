//! Feature ranking by MDL variable importance.

mod discretize;
mod mdl;
mod report;
mod table;

pub use discretize::{bin_of, discretize, DiscreteAttribute, DiscretizeConfig};
pub use mdl::{info_gain, log2_binomial, log2_multinomial, mdl_score, post_bits, prior_bits, Entropies};
pub use report::{rank_and_select, score_column, ChannelScore, FaultGroup, MdlReport, RankConfig, Stratum};
pub use table::ContingencyTable;
