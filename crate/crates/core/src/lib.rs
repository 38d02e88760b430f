pub mod approx;
pub mod asymptotics;
pub mod crlb;
pub mod deployment;
pub mod ffunc;
pub mod fisher;
pub mod geometry;
pub mod phase;
pub mod quadrature;
pub mod signal;
pub mod spherical;
pub mod validation;

// Each book chapter becomes a module so its snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/fisher.md")]
    mod fisher {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/approximations.md")]
    mod approximations {}
    #[doc = include_str!("../../../book/src/phase.md")]
    mod phase {}
    #[doc = include_str!("../../../book/src/spherical.md")]
    mod spherical {}
    #[doc = include_str!("../../../book/src/deployments.md")]
    mod deployments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
