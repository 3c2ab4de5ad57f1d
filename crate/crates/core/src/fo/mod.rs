//! Many-sorted first-order (and monadic second-order) logic over finite
//! structures: evaluation, the standard translation, EF games, locality.

mod eval;
mod formula;
mod gaifman;
mod games;
mod iso;
mod structure;
mod translate;

pub use eval::{env_of, eval_fo, eval_fo_capped, Compiled, Env, FoError, Value, VarKind, DEFAULT_SET_CAP};
pub use formula::{parse_fo, FoFormula, SexpError};
pub use gaifman::{gaifman_distances, gaifman_graph, gaifman_neighborhood, local_equiv, CENTRE};
pub use games::{
    coloured_set, ef_fo, ef_mso, eq_cutoff, hintikka, threshold_equiv, EfResult, EfRound, GameError,
    DEFAULT_MSO_CAP,
};
pub use structure::{GenericStructure, Relation, RelationJson, SortJson, StructureBuilder, StructureError, StructureJson};
pub use translate::{rel_e, rel_p, standard_translation, translate_with, LeafHook, Target, REL_IN, SORT_S, SORT_W};
