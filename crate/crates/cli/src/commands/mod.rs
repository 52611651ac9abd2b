pub mod moments;
pub mod simulate;
pub mod susy;
pub mod twopoint;
pub mod verify;
