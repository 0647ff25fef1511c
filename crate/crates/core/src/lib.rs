pub mod cli;
pub mod kv;
pub mod lexicon;
pub mod pipeline;
pub mod protocol;
pub mod report;
pub mod scoring;
pub mod sem;
pub mod subject;
