//! Reaction networks with mass-action kinetics: state space enumeration,
//! CTMC generator construction, and uniformization to a DTMC.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::chain::StochasticMatrix;
use crate::error::{Error, Result};

/// One reaction: consumed and produced stoichiometric counts per species,
/// and a mass-action rate constant.
#[derive(Debug, Clone)]
pub struct Reaction {
    pub consumed: Vec<u64>,
    pub produced: Vec<u64>,
    pub rate_constant: f64,
}

/// A chemical reaction network under mass-action kinetics.
#[derive(Debug, Clone)]
pub struct ReactionNetwork {
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
    pub initial_state: Vec<u64>,
}

/// CTMC generator over an explicitly enumerated reachable state set.
#[derive(Debug, Clone)]
pub struct Generator {
    pub states: Vec<Vec<u64>>,
    /// Row-major rate matrix with zero row sums.
    pub rates: Vec<f64>,
}

impl Generator {
    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rates[i * self.states.len() + j]
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n()).map(|i| -self.rate(i, i)).fold(0.0, f64::max)
    }
}

/// Exact binomial coefficient as integer arithmetic, converted to float at
/// the end.
fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

impl ReactionNetwork {
    /// Mass-action propensity of reaction `k` in `state`:
    /// c_k * prod_i C(x_i, nu_ik).
    pub fn propensity(&self, state: &[u64], k: usize) -> f64 {
        let reaction = &self.reactions[k];
        let mut acc = reaction.rate_constant;
        for (x, &need) in state.iter().zip(&reaction.consumed) {
            if *x < need {
                return 0.0;
            }
            acc *= binomial(*x, need);
        }
        acc
    }

    /// Stoichiometric change vector of reaction `k` applied to `state`, or
    /// None if a count would go negative.
    fn apply(&self, state: &[u64], k: usize) -> Option<Vec<u64>> {
        let reaction = &self.reactions[k];
        let mut next = state.to_vec();
        for i in 0..next.len() {
            next[i] = next[i].checked_sub(reaction.consumed[i])?;
            next[i] += reaction.produced[i];
        }
        Some(next)
    }

    /// Breadth-first closure from the initial state under reactions with
    /// positive propensity. States appear in FIFO discovery order, with
    /// neighbors expanded in reaction-index order.
    pub fn enumerate_reachable(&self, cap: usize) -> Result<Vec<Vec<u64>>> {
        assert!(cap >= 1, "cap must be at least 1");
        let mut states = vec![self.initial_state.clone()];
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        seen.insert(self.initial_state.clone(), 0);
        let mut frontier = VecDeque::from([0usize]);
        while let Some(idx) = frontier.pop_front() {
            let state = states[idx].clone();
            for k in 0..self.reactions.len() {
                if self.propensity(&state, k) <= 0.0 {
                    continue;
                }
                let Some(next) = self.apply(&state, k) else { continue };
                if !seen.contains_key(&next) {
                    if states.len() >= cap {
                        return Err(Error::StateSpaceExceeded { cap });
                    }
                    seen.insert(next.clone(), states.len());
                    frontier.push_back(states.len());
                    states.push(next);
                }
            }
        }
        Ok(states)
    }

    /// Assembles the generator over a state list closed under
    /// positive-propensity transitions.
    pub fn build_generator(&self, states: Vec<Vec<u64>>) -> Result<Generator> {
        let n = states.len();
        let index: HashMap<&[u64], usize> =
            states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let mut rates = vec![0.0; n * n];
        for (i, state) in states.iter().enumerate() {
            for k in 0..self.reactions.len() {
                let lambda = self.propensity(state, k);
                if lambda <= 0.0 {
                    continue;
                }
                let target = self
                    .apply(state, k)
                    .expect("positive propensity implies applicable reaction");
                if target == *state {
                    continue;
                }
                let j = *index
                    .get(target.as_slice())
                    .ok_or(Error::TargetNotInStateList { target: target.clone() })?;
                rates[i * n + j] += lambda;
            }
            let exit: f64 = rates[i * n..(i + 1) * n].iter().sum();
            rates[i * n + i] = -exit;
        }
        Ok(Generator { states, rates })
    }
}

/// A uniformized (subordinated) DTMC: P = R/lambda + I.
#[derive(Debug, Clone)]
pub struct Uniformized {
    pub p: StochasticMatrix,
    pub lambda_used: f64,
}

/// Uniformizes a generator. The default constant is max |R_ii| + 1, which
/// keeps every diagonal entry positive.
pub fn uniformize(generator: &Generator, lambda: Option<f64>) -> Result<Uniformized> {
    let required = generator.max_exit_rate();
    let lambda_used = match lambda {
        None => required + 1.0,
        Some(l) => {
            if l < required {
                return Err(Error::LambdaTooSmall { lambda: l, required });
            }
            l
        }
    };
    let n = generator.n();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let base = if i == j { 1.0 } else { 0.0 };
            entries[i * n + j] = generator.rate(i, j) / lambda_used + base;
        }
    }
    Ok(Uniformized { p: StochasticMatrix::from_rows_normalized(n, entries), lambda_used })
}

/// Parses the reaction-network text format: sections `SPECIES`, `INIT`,
/// `REACTIONS`; reactions written `a*Name + b*Name -> c*Name + d*Name @ rate`
/// with `*` optional for unit coefficients and `0` for an empty side.
pub fn parse_network(text: &str) -> Result<ReactionNetwork> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Species,
        Init,
        Reactions,
    }
    let mut section = Section::None;
    let mut species: Vec<String> = Vec::new();
    let mut init: HashMap<String, u64> = HashMap::new();
    let mut reactions: Vec<Reaction> = Vec::new();
    let mut pending: Vec<(usize, String)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "SPECIES" => {
                section = Section::Species;
                continue;
            }
            "INIT" => {
                section = Section::Init;
                continue;
            }
            "REACTIONS" => {
                section = Section::Reactions;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("content before any section header: {line}"),
                })
            }
            Section::Species => {
                for name in line.split_whitespace() {
                    if species.iter().any(|s| s == name) {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("duplicate species {name}"),
                        });
                    }
                    species.push(name.to_string());
                }
            }
            Section::Init => {
                let (name, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: format!("expected `name = integer`, got {line}"),
                })?;
                let count = value.trim().parse::<u64>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad count {}: {e}", value.trim()),
                })?;
                init.insert(name.trim().to_string(), count);
            }
            Section::Reactions => {
                pending.push((lineno, line.to_string()));
            }
        }
    }

    let species_index: HashMap<&str, usize> =
        species.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    for (name, _) in &init {
        if !species_index.contains_key(name.as_str()) {
            return Err(Error::Parse {
                line: 0,
                message: format!("INIT references unknown species {name}"),
            });
        }
    }
    let parse_side = |side: &str, lineno: usize| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; species.len()];
        let side = side.trim();
        if side == "0" {
            return Ok(counts);
        }
        for term in side.split('+') {
            let term = term.trim();
            let (coeff, name) = match term.split_once('*') {
                Some((c, n)) => {
                    let coeff = c.trim().parse::<u64>().map_err(|e| Error::Parse {
                        line: lineno,
                        message: format!("bad coefficient {}: {e}", c.trim()),
                    })?;
                    (coeff, n.trim())
                }
                None => (1, term),
            };
            let idx = *species_index.get(name).ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("unknown species {name}"),
            })?;
            counts[idx] += coeff;
        }
        Ok(counts)
    };
    for (lineno, line) in pending {
        let (arrow, rate) = line.rsplit_once('@').ok_or_else(|| Error::Parse {
            line: lineno,
            message: "missing `@ rate`".to_string(),
        })?;
        let rate_constant = rate.trim().parse::<f64>().map_err(|e| Error::Parse {
            line: lineno,
            message: format!("bad rate {}: {e}", rate.trim()),
        })?;
        if !(rate_constant > 0.0) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("rate constant must be positive, got {rate_constant}"),
            });
        }
        let (lhs, rhs) = arrow.split_once("->").ok_or_else(|| Error::Parse {
            line: lineno,
            message: "missing `->`".to_string(),
        })?;
        reactions.push(Reaction {
            consumed: parse_side(lhs, lineno)?,
            produced: parse_side(rhs, lineno)?,
            rate_constant,
        });
    }

    let initial_state: Vec<u64> =
        species.iter().map(|s| init.get(s).copied().unwrap_or(0)).collect();
    Ok(ReactionNetwork { species, reactions, initial_state })
}

/// The two-species gene expression network used as the bundled example:
/// G0 <-> G1 at rates c1/c2, G1 + P0 -> G1 + P at c3, P -> P0 at c4, with
/// initial state G1 = 1, P = n_p.
pub fn gene_expression_network(n_p: u64, c: [f64; 4]) -> ReactionNetwork {
    // species order: G0, G1, P0, P
    ReactionNetwork {
        species: vec!["G0".into(), "G1".into(), "P0".into(), "P".into()],
        reactions: vec![
            Reaction { consumed: vec![1, 0, 0, 0], produced: vec![0, 1, 0, 0], rate_constant: c[0] },
            Reaction { consumed: vec![0, 1, 0, 0], produced: vec![1, 0, 0, 0], rate_constant: c[1] },
            Reaction { consumed: vec![0, 1, 1, 0], produced: vec![0, 1, 0, 1], rate_constant: c[2] },
            Reaction { consumed: vec![0, 0, 0, 1], produced: vec![0, 0, 1, 0], rate_constant: c[3] },
        ],
        initial_state: vec![0, 1, 0, n_p],
    }
}
