pub mod catalog;
pub mod design;
pub mod locexp;
pub mod minp;
pub mod simulate;
pub mod verify;
