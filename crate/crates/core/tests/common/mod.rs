#![allow(dead_code)]

pub mod figures;
