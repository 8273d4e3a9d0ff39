pub mod gcuc;
pub mod instance;
pub mod maritime;
pub mod orchestrator;
pub mod validator;
