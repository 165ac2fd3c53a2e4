//! imgql: spatial model checking of 2D images.
//!
//! A specification is parsed ([`frontend`]), expanded into a hash-consed task
//! graph ([`graph`]) and evaluated by a parallel scheduler ([`exec`]) whose
//! tasks run data-parallel image kernels ([`kernels`]). Reachability is
//! computed by connected component labelling ([`ccl`], [`reach`]).

pub mod bench;
pub mod ccl;
pub mod exec;
pub mod frontend;
pub mod graph;
pub mod image;
pub mod kernels;
pub mod reach;
pub mod synth;

pub use exec::{run, RunOptions, RunOutput, RunReport};
pub use graph::{FsResolver, ImportResolver, MapResolver, TaskGraph};
pub use image::Value;

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("{0}")]
    Syntax(#[from] frontend::SyntaxError),
    #[error("{0}")]
    Expand(#[from] graph::ExpandError),
}

/// Where the derived operators come from.
#[derive(Debug, Clone, Default)]
pub enum Prelude {
    /// The built-in library.
    #[default]
    Builtin,
    /// A replacement library text.
    Custom(String),
    None,
}

/// Parses and expands `text`, with the prelude's definitions in scope.
pub fn compile(text: &str, prelude: &Prelude, resolver: &mut dyn ImportResolver) -> Result<TaskGraph, CompileError> {
    let mut ex = graph::Expander::new(resolver);
    let lib = match prelude {
        Prelude::Builtin => Some(reach::STDLIB),
        Prelude::Custom(t) => Some(t.as_str()),
        Prelude::None => None,
    };
    if let Some(lib) = lib {
        let cmds = frontend::parse_str(lib).map_err(|mut e| {
            e.message = format!("stdlib.imgql: {}", e.message);
            e
        })?;
        ex.include(&cmds, Some("stdlib.imgql"))?;
    }
    let program = frontend::parse_str(text)?;
    ex.include(&program, None)?;
    Ok(ex.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stdlib_is_available() {
        let g = compile(
            "load a = \"a.png\"\nlet x = intensity(a) >. 3\nsave \"o.png\" grow(x, interior(x))",
            &Prelude::Builtin,
            &mut MapResolver::default(),
        )
        .unwrap();
        assert_eq!(g.count_op(graph::Op::Reach), 1);
        assert_eq!(g.outputs().len(), 1);
    }

    #[test]
    fn without_prelude_derived_names_are_unbound() {
        let err = compile("load a = \"a.png\"\nsave \"o.png\" interior(a)", &Prelude::None, &mut MapResolver::default())
            .unwrap_err();
        assert!(err.to_string().contains("unbound identifier `interior`"), "{err}");
    }

    #[test]
    fn program_cannot_redefine_stdlib_names() {
        let err = compile("let touch(a, b) = a", &Prelude::Builtin, &mut MapResolver::default()).unwrap_err();
        assert!(err.to_string().contains("already defined"), "{err}");
    }
}
