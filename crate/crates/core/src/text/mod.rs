//! Text encodings of a factsheet: the canonical `.efs` format and the JSON
//! interchange form.

mod canonical;
mod error;
mod interchange;

pub use canonical::{parse_canonical, serialize_canonical};
pub use error::{ErrorCode, ParseError};
pub use interchange::{from_interchange, to_interchange};
