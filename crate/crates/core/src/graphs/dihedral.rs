//! Balls in the Cayley graph of the infinite dihedral group
//! `<x, g | g^2 = 1, g x g = x^-1>`, which contains `Z = <x>` with index 2.
//!
//! Generators are `{x, x^-1, g}` acting by left multiplication, and every
//! element is written uniquely as `x^k` or `g x^k`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DihedralElement {
    /// Coset of `Z`: false for `x^k`, true for `g x^k`.
    pub flip: bool,
    pub power: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    X,
    XInv,
    G,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::X, Generator::XInv, Generator::G];
}

impl DihedralElement {
    pub const IDENTITY: Self = Self { flip: false, power: 0 };

    pub fn x_pow(power: i64) -> Self {
        Self { flip: false, power }
    }

    pub fn g_x_pow(power: i64) -> Self {
        Self { flip: true, power }
    }

    /// `s * self`. Uses `x g = g x^-1`.
    pub fn left_mul(self, s: Generator) -> Self {
        match (s, self.flip) {
            (Generator::X, false) => Self::x_pow(self.power + 1),
            (Generator::X, true) => Self::g_x_pow(self.power - 1),
            (Generator::XInv, false) => Self::x_pow(self.power - 1),
            (Generator::XInv, true) => Self::g_x_pow(self.power + 1),
            (Generator::G, f) => Self {
                flip: !f,
                power: self.power,
            },
        }
    }

    pub fn word_length(self) -> u64 {
        self.power.unsigned_abs() + u64::from(self.flip)
    }

    pub fn label(self) -> String {
        let base = match self.power {
            0 => String::new(),
            1 => "x".to_string(),
            k => format!("x^{k}"),
        };
        match (self.flip, base.is_empty()) {
            (false, true) => "e".into(),
            (false, false) => base,
            (true, _) => format!("g{base}"),
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        let (flip, rest) = match label.strip_prefix('g') {
            Some(r) => (true, r),
            None => (false, label),
        };
        let power = match rest {
            "" if flip => 0,
            "e" if !flip => 0,
            "x" => 1,
            _ => rest.strip_prefix("x^")?.parse().ok()?,
        };
        Some(Self { flip, power })
    }
}

/// A ball of the Cayley graph around the identity, with unit edges.
#[derive(Debug, Clone)]
pub struct DihedralBall {
    pub radius: u64,
    pub graph: WeightedGraph,
    /// Group element of each vertex; vertices are in breadth-first order.
    pub elements: Vec<DihedralElement>,
}

impl DihedralBall {
    /// Radius below which ball distances coincide with word distances.
    pub fn interior_radius(&self) -> u64 {
        self.radius - 1
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&i| self.elements[i].word_length() <= self.interior_radius())
            .collect()
    }

    pub fn index_of(&self, e: DihedralElement) -> Option<usize> {
        self.elements.iter().position(|&x| x == e)
    }
}

pub fn dinfinity_ball(radius: u64) -> Result<DihedralBall> {
    if !(1..=1_000_000).contains(&radius) {
        return Err(Error::InvalidParameter(format!("ball radius must be in 1..=1000000, got {radius}")));
    }
    let mut elements = vec![DihedralElement::IDENTITY];
    let mut index = HashMap::from([(DihedralElement::IDENTITY, 0usize)]);
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < elements.len() {
        let u = elements[i];
        for s in Generator::ALL {
            let v = u.left_mul(s);
            if v.word_length() > radius {
                continue;
            }
            let j = *index.entry(v).or_insert_with(|| {
                elements.push(v);
                elements.len() - 1
            });
            if i < j {
                pairs.push((i, j));
            }
        }
        i += 1;
    }
    let labels = elements.iter().map(|e| e.label()).collect();
    let graph = WeightedGraph::unit(elements.len(), pairs)?.with_labels(labels)?;
    Ok(DihedralBall { radius, graph, elements })
}
