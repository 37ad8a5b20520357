//! Fixtures by name, as the command line and the probe address them.

use linklock_core::constructions::{
    comb, fig2_augmented, fig2_cut, fig2_tree, fig2b_tree, fig3_orthogonal_tree, random_chain, ConstructionError, FixtureParams,
};
use linklock_core::touching::TouchingConfig;
use linklock_core::Configuration;

/// Names accepted by [`generate`]; `chain-N` takes any N ≥ 1.
pub const FIXTURE_NAMES: [&str; 7] = ["fig2", "fig2b", "fig2-aug", "fig2-cut", "fig3", "comb", "chain-N"];

/// Names accepted by [`probe_fixture`].
pub const PROBE_FIXTURES: [&str; 3] = ["fig2", "fig2-aug", "fig2-cut"];

#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Touching(TouchingConfig),
    Configuration(Configuration),
}

fn chain_len(name: &str) -> Option<usize> {
    name.strip_prefix("chain-")?.parse().ok().filter(|&n| n >= 1)
}

pub fn is_known(name: &str) -> bool {
    FIXTURE_NAMES[..6].contains(&name) || chain_len(name).is_some()
}

/// The touching fixtures come out as touching configurations unless
/// `perturb` is set, in which case they are perturbed by `params.delta`
/// with `params.seed`. `fig2-cut` is always perturbed; chains use the seed.
pub fn generate(name: &str, params: &FixtureParams, perturb: bool) -> Result<Fixture, ConstructionError> {
    let touching = |tc: TouchingConfig| -> Result<Fixture, ConstructionError> {
        if perturb {
            Ok(Fixture::Configuration(tc.perturb(params.delta, params.seed)?))
        } else {
            Ok(Fixture::Touching(tc))
        }
    };
    match name {
        "fig2" => touching(fig2_tree(params)?),
        "fig2b" => touching(fig2b_tree(params)?),
        "fig2-aug" => touching(fig2_augmented(params)?),
        "fig2-cut" => Ok(Fixture::Configuration(fig2_cut(params)?)),
        "fig3" => Ok(Fixture::Configuration(fig3_orthogonal_tree(params)?.config)),
        "comb" => Ok(Fixture::Configuration(comb())),
        _ => match chain_len(name) {
            Some(n) => Ok(Fixture::Configuration(random_chain(n, params.seed))),
            None => Err(ConstructionError::UnknownFixture(name.to_string())),
        },
    }
}

/// A touching fixture for the probe and whether it is expected to be locked.
/// `fig2-cut` is the eleven-edge tree without DG, the unlocked control.
pub fn probe_fixture(name: &str, params: &FixtureParams) -> Result<(TouchingConfig, bool), ConstructionError> {
    match name {
        "fig2" => Ok((fig2_tree(params)?, true)),
        "fig2-aug" => Ok((fig2_augmented(params)?, true)),
        "fig2-cut" => {
            let tc = fig2_tree(params)?;
            let dg = tc.linkage().edge_by_label("DG").expect("fixture has DG");
            Ok((tc.without_edge(dg)?, false))
        }
        _ => Err(ConstructionError::UnknownFixture(name.to_string())),
    }
}
