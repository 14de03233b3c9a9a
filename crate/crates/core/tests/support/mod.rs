#![allow(dead_code)]

pub mod ml_oracle;
