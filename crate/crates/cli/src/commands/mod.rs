pub mod eval;
pub mod gen_data;
pub mod optimize;
pub mod train;
pub mod validate_fem;
