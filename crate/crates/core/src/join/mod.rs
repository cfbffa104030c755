//! Stream-join components: the hash-based join storage (HB-SJ), the generic
//! multiway circular pipeline, and the three-way variant customized for the
//! shipping-priority query.

pub mod cmj;
pub mod hash;
pub mod hbsj;
pub mod q3;

pub use cmj::{CmjCost, CmjPipeline, CmjStage, JoinedTuple};
pub use hash::{hash_key, murmur3_x86_32, HASH_SEED_1, HASH_SEED_2};
pub use hbsj::{
    DualIndexWindow, HbsjConfig, HbsjConfigError, IndexStore, InsertOutcome, Location,
    SlidingJoinState, StoredTuple,
};
pub use q3::{OverflowOccupancy, Q3FieldMap, Q3JoinCore, Q3Match, Q3Variant};
