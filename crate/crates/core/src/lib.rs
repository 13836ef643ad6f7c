pub mod model;
pub mod proof;
pub mod reduction;
pub mod search;
pub mod semantics;
pub mod syntax;
