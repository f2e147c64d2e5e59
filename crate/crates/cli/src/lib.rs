//! Library side of the `adaptmesh` command: table cells, order fits and
//! trajectory output, kept here so they can be tested without spawning the
//! binary.

pub mod order;
pub mod output;
pub mod table;

use adaptmesh::Error;

/// Process exit status for a library error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) => 2,
        Error::OracleFailure(_) => 4,
        _ => 3,
    }
}
