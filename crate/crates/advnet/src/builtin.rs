//! Built-in instance library: the small benchmark networks used throughout
//! the test and acceptance suites, constructible by name.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::{simple_two_level, Network};

/// Two-terminal network with a shared relay chain: four source edges feed
/// `V1`/`V2`, which cross over through `V3 -> V4` to both terminals.
/// Unit min-cut 2 to each terminal. No vulnerable edges.
pub fn crossover() -> Network {
    let names = ["S", "V1", "V2", "V3", "V4", "T1", "T2"];
    let edges = vec![
        (0, 1), // e0: S -> V1
        (0, 1), // e1: S -> V1
        (0, 2), // e2: S -> V2
        (0, 2), // e3: S -> V2
        (1, 5), // e4: V1 -> T1
        (1, 3), // e5: V1 -> V3
        (2, 3), // e6: V2 -> V3
        (2, 6), // e7: V2 -> T2
        (3, 4), // e8: V3 -> V4
        (4, 5), // e9: V4 -> T1
        (4, 6), // e10: V4 -> T2
    ];
    Network::from_parts(
        names.iter().map(|s| s.to_string()).collect(),
        edges,
        0,
        vec![5, 6],
        vec![],
    )
    .expect("crossover network is valid")
}

/// [`crossover`] with every edge vulnerable.
pub fn crossover_full() -> Network {
    let mut net = crossover();
    let all: Vec<usize> = (0..net.edge_count()).collect();
    net.set_vulnerable(all).unwrap();
    net
}

/// [`crossover`] with the vulnerable set restricted to the source edges and
/// the relay chain `{e0..e3, e5, e6, e8}`.
pub fn crossover_restricted() -> Network {
    let mut net = crossover();
    net.set_vulnerable(vec![0, 1, 2, 3, 5, 6, 8]).unwrap();
    net
}

/// Single-terminal network with a direct source-terminal edge bypassing two
/// relays; vulnerable on the three source edges.
pub fn bypass() -> Network {
    let names = ["S", "V1", "V2", "T"];
    let edges = vec![
        (0, 1), // e0: S -> V1
        (0, 3), // e1: S -> T
        (0, 2), // e2: S -> V2
        (1, 3), // e3: V1 -> T
        (2, 3), // e4: V2 -> T
    ];
    Network::from_parts(
        names.iter().map(|s| s.to_string()).collect(),
        edges,
        0,
        vec![3],
        vec![0, 1, 2],
    )
    .expect("bypass network is valid")
}

/// The diamond network `([1,2],[1,1])`, vulnerable on its source edges.
pub fn diamond() -> Network {
    simple_two_level(&[1, 2], &[1, 1]).unwrap()
}

/// The mirrored diamond network `([2,2],[1,1])`, vulnerable on its source edges.
pub fn mirrored_diamond() -> Network {
    simple_two_level(&[2, 2], &[1, 1]).unwrap()
}

/// Simple 3-level network with six fan-in relays feeding four collectors in
/// two blocks; vulnerable on the source edges.
pub fn hexagon() -> Network {
    let names = [
        "S", "A1", "A2", "A3", "A4", "A5", "A6", "B1", "B2", "B3", "B4", "T",
    ];
    let mut edges = vec![];
    for v in 1..=6 {
        edges.push((0usize, v)); // source fan-out
    }
    // first block: A1..A4 -> B1, B2
    for a in 1..=4 {
        edges.push((a, 7));
        edges.push((a, 8));
    }
    // second block: A5, A6 -> B3, B4
    for a in 5..=6 {
        edges.push((a, 9));
        edges.push((a, 10));
    }
    for b in 7..=10 {
        edges.push((b, 11));
    }
    Network::from_parts(
        names.iter().map(|s| s.to_string()).collect(),
        edges,
        0,
        vec![11],
        (0..6).collect(),
    )
    .expect("hexagon network is valid")
}

/// Two-terminal interchange: a direct edge to each terminal plus a shared
/// `V3 -> V4` relay stage; vulnerable on the direct edge to `T1` and the
/// four edges into `V3`.
pub fn interchange() -> Network {
    let names = ["S", "V1", "V2", "V3", "V4", "T1", "T2"];
    let edges = vec![
        (0, 5), // e0: S -> T1
        (0, 1), // e1: S -> V1
        (0, 1), // e2: S -> V1
        (0, 2), // e3: S -> V2
        (0, 2), // e4: S -> V2
        (0, 6), // e5: S -> T2
        (1, 3), // e6: V1 -> V3
        (1, 3), // e7: V1 -> V3
        (2, 3), // e8: V2 -> V3
        (2, 3), // e9: V2 -> V3
        (3, 4), // e10
        (3, 4), // e11
        (3, 4), // e12: V3 -> V4 x3
        (4, 5), // e13
        (4, 5), // e14
        (4, 5), // e15: V4 -> T1 x3
        (4, 6), // e16
        (4, 6), // e17
        (4, 6), // e18: V4 -> T2 x3
    ];
    Network::from_parts(
        names.iter().map(|s| s.to_string()).collect(),
        edges,
        0,
        vec![5, 6],
        vec![0, 6, 7, 8, 9],
    )
    .expect("interchange network is valid")
}

/// Family of simple 2-level shapes studied by the bound machinery. Each is
/// parametrized by one positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `([t, 2t], [t, t])`
    A,
    /// `([1, s+1], [1, s])`
    B,
    /// `([t, t+1], [t, t])`, defined for `t >= 2`
    C,
    /// `([2t, 2t], [1, 1])`
    D,
    /// `([t, t+1], [1, 1])`
    E,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Family::A),
            "b" => Ok(Family::B),
            "c" => Ok(Family::C),
            "d" => Ok(Family::D),
            "e" => Ok(Family::E),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    /// Degree profile `(ins, outs)` of the family member with the given
    /// parameter.
    pub fn profile(&self, param: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        if param == 0 {
            return Err(Error::ParameterOutOfRange("family parameter must be positive".into()));
        }
        let t = param;
        Ok(match self {
            Family::A => (vec![t, 2 * t], vec![t, t]),
            Family::B => (vec![1, t + 1], vec![1, t]),
            Family::C => {
                if t < 2 {
                    return Err(Error::ParameterOutOfRange(
                        "family c starts at parameter 2".into(),
                    ));
                }
                (vec![t, t + 1], vec![t, t])
            }
            Family::D => (vec![2 * t, 2 * t], vec![1, 1]),
            Family::E => (vec![t, t + 1], vec![1, 1]),
        })
    }

    pub fn network(&self, param: usize) -> Result<Network> {
        let (ins, outs) = self.profile(param)?;
        simple_two_level(&ins, &outs)
    }

    /// The adversarial budget conventionally paired with this family member.
    pub fn default_budget(&self, param: usize) -> usize {
        match self {
            Family::B => 1,
            _ => param,
        }
    }
}

/// Named instances for the CLI. Family members are spelled like `a2`, `b3`.
pub fn by_name(name: &str) -> Result<Network> {
    match name.to_ascii_lowercase().as_str() {
        "crossover" => Ok(crossover()),
        "crossover-full" => Ok(crossover_full()),
        "crossover-restricted" => Ok(crossover_restricted()),
        "bypass" => Ok(bypass()),
        "diamond" => Ok(diamond()),
        "mirrored-diamond" => Ok(mirrored_diamond()),
        "hexagon" => Ok(hexagon()),
        "interchange" => Ok(interchange()),
        other => {
            if let Some(first) = other.chars().next() {
                if let (Ok(family), Ok(param)) = (Family::parse(&first.to_string()), other[1..].parse::<usize>()) {
                    return family.network(param);
                }
            }
            Err(Error::Parse(format!("unknown instance {other}")))
        }
    }
}

pub fn names() -> Vec<&'static str> {
    vec![
        "crossover",
        "crossover-full",
        "crossover-restricted",
        "bypass",
        "diamond",
        "mirrored-diamond",
        "hexagon",
        "interchange",
        "a<t>",
        "b<s>",
        "c<t>",
        "d<t>",
        "e<t>",
    ]
}
