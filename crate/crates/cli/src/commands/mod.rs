pub mod analysis;
pub mod eval;
pub mod images;
pub mod report;
pub mod theory;
