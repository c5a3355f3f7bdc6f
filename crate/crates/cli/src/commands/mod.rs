pub mod evolve;
pub mod spectrum;
pub mod sweep;
pub mod verify;

/// Shared per-invocation settings from the global flags.
#[derive(Debug, Clone)]
pub struct Globals {
    pub out: Option<std::path::PathBuf>,
    pub format: Option<crate::args::Format>,
    pub quiet: bool,
}

impl Globals {
    pub fn note(&self, message: &str) {
        if !self.quiet {
            eprintln!("{message}");
        }
    }
}
