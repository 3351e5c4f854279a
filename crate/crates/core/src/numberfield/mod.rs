pub mod field;
pub mod norms;
