//! Subgoal-chunked working memory for LLM agents: planning environments,
//! memory rendering, chat backends, the agent loop, and evaluation.

pub mod domains;
pub mod env;
pub mod backend;
pub mod memory;
pub mod agent;
pub mod eval;
pub mod fixtures;
pub mod envcheck;
