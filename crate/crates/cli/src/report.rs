//! Output documents: one fixed JSON schema for explored systems, plus DOT
//! and plain-text renderings of the same data.
//!
//! The schema keeps a fixed key order and sorted arrays so identical runs
//! produce byte-identical output: `states` (canonical renderings, indexed
//! by id), `unary` rows, `binary` rows, `lts` rows, `partition` (blocks of
//! state indices), then `verdict`, `policy`, `pool`, `budget_exhausted`.
//! Sections that do not apply to a command stay empty rather than
//! disappearing.

use std::fmt::Display;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use dialg_core::engine::{DialgebraTable, LtsTable, Partition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnaryRow {
    pub src: usize,
    pub dst: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryRow {
    pub left: usize,
    pub right: usize,
    pub dst: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LtsRow {
    pub src: usize,
    pub label: String,
    pub dst: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub states: Vec<String>,
    pub unary: Vec<UnaryRow>,
    pub binary: Vec<BinaryRow>,
    pub lts: Vec<LtsRow>,
    pub partition: Vec<Vec<usize>>,
    pub verdict: Option<String>,
    pub policy: Option<String>,
    pub pool: Vec<String>,
    pub budget_exhausted: bool,
}

impl Document {
    fn empty() -> Document {
        Document {
            states: Vec::new(),
            unary: Vec::new(),
            binary: Vec::new(),
            lts: Vec::new(),
            partition: Vec::new(),
            verdict: None,
            policy: None,
            pool: Vec::new(),
            budget_exhausted: false,
        }
    }

    /// Document for a reaction table. Witness states are part of `states`
    /// like any other.
    pub fn from_dialgebra(table: &DialgebraTable) -> Document {
        let mut doc = Document::empty();
        doc.states = table.states.iter().map(|s| s.rendering().to_string()).collect();
        doc.unary = table
            .unary
            .iter()
            .map(|(src, dst)| UnaryRow { src: src.0, dst: dst.iter().map(|d| d.0).collect() })
            .collect();
        doc.binary = table
            .binary
            .iter()
            .map(|(&(l, r), dst)| BinaryRow {
                left: l.0,
                right: r.0,
                dst: dst.iter().map(|d| d.0).collect(),
            })
            .collect();
        doc.budget_exhausted = !table.complete();
        doc
    }

    /// Document for a transition table; labels are rendered to text.
    pub fn from_lts<L: Ord + Display>(table: &LtsTable<L>) -> Document {
        let mut doc = Document::empty();
        doc.states = table.states.iter().map(|s| s.rendering().to_string()).collect();
        for (src, moves) in &table.transitions {
            for (label, dst) in moves {
                doc.lts.push(LtsRow { src: src.0, label: label.to_string(), dst: dst.0 });
            }
        }
        doc.lts.sort();
        doc.budget_exhausted = !table.complete;
        doc
    }

    pub fn with_partition(mut self, partition: &Partition) -> Document {
        self.partition =
            partition.blocks().iter().map(|block| block.iter().copied().collect()).collect();
        self
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("document serializes");
        text.push('\n');
        text
    }

    /// DOT graph: one box per state labelled with its rendering, solid
    /// edges for unary reactions and labelled transitions, and a point node
    /// `exp_i` per binary experiment with dashed edges from the two
    /// participants and solid edges to the results.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "digraph system {{").unwrap();
        writeln!(out, "    rankdir=LR;").unwrap();
        for (i, state) in self.states.iter().enumerate() {
            writeln!(out, "    s{} [shape=box label=\"{}\"];", i, escape(state)).unwrap();
        }
        for row in &self.unary {
            for dst in &row.dst {
                writeln!(out, "    s{} -> s{};", row.src, dst).unwrap();
            }
        }
        for (i, row) in self.binary.iter().enumerate() {
            writeln!(out, "    exp_{i} [shape=point];").unwrap();
            writeln!(out, "    s{} -> exp_{i} [style=dashed];", row.left).unwrap();
            writeln!(out, "    s{} -> exp_{i} [style=dashed];", row.right).unwrap();
            for dst in &row.dst {
                writeln!(out, "    exp_{i} -> s{dst};").unwrap();
            }
        }
        for row in &self.lts {
            writeln!(out, "    s{} -> s{} [label=\"{}\"];", row.src, row.dst, escape(&row.label))
                .unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "states:").unwrap();
        for (i, state) in self.states.iter().enumerate() {
            writeln!(out, "  {i}: {state}").unwrap();
        }
        if !self.unary.is_empty() {
            writeln!(out, "unary:").unwrap();
            for row in &self.unary {
                writeln!(out, "  {} -> {}", row.src, ids(&row.dst)).unwrap();
            }
        }
        if !self.binary.is_empty() {
            writeln!(out, "binary:").unwrap();
            for row in &self.binary {
                writeln!(out, "  ({}, {}) -> {}", row.left, row.right, ids(&row.dst)).unwrap();
            }
        }
        if !self.lts.is_empty() {
            writeln!(out, "transitions:").unwrap();
            for row in &self.lts {
                writeln!(out, "  {} -{}-> {}", row.src, row.label, row.dst).unwrap();
            }
        }
        if !self.partition.is_empty() {
            let blocks: Vec<String> = self.partition.iter().map(|b| ids(b)).collect();
            writeln!(out, "partition: {}", blocks.join(" ")).unwrap();
        }
        if let Some(verdict) = &self.verdict {
            writeln!(out, "verdict: {verdict}").unwrap();
        }
        if let Some(policy) = &self.policy {
            writeln!(out, "policy: {policy}").unwrap();
        }
        if !self.pool.is_empty() {
            writeln!(out, "pool: {}", self.pool.join(" ")).unwrap();
        }
        if self.budget_exhausted {
            writeln!(out, "budget exhausted: exploration is partial").unwrap();
        }
        out
    }
}

fn ids(list: &[usize]) -> String {
    let inner: Vec<String> = list.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use dialg_core::engine::{explore_dialgebra, refine_dialgebra, ChallengerPolicy, NamePool};
    use dialg_core::{parse_term, Calculus, Name};

    fn sample() -> Document {
        let term = parse_term("a.0 | ~a.0", Calculus::Ccs).unwrap();
        let pool = NamePool::new([Name::new("a").unwrap()]);
        let table =
            explore_dialgebra(&[term], &ChallengerPolicy::WitnessSet { pool }, 1000).unwrap();
        let partition = refine_dialgebra(&table);
        Document::from_dialgebra(&table).with_partition(&partition)
    }

    #[test]
    fn json_round_trips_to_an_equal_document() {
        let doc = sample();
        let parsed: Document = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(parsed, doc);
    }

    #[test]
    fn json_keys_keep_the_documented_order() {
        let json = sample().to_json();
        let positions: Vec<usize> = [
            "\"states\"",
            "\"unary\"",
            "\"binary\"",
            "\"lts\"",
            "\"partition\"",
            "\"verdict\"",
            "\"policy\"",
            "\"pool\"",
            "\"budget_exhausted\"",
        ]
        .iter()
        .map(|key| json.find(key).unwrap_or_else(|| panic!("missing {key}")))
        .collect();
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        assert_eq!(positions, sorted);
    }

    #[test]
    fn dot_renders_binary_experiments_as_hyperedge_nodes() {
        let dot = sample().to_dot();
        assert!(dot.contains("digraph system {"));
        assert!(dot.contains("shape=box"));
        assert!(dot.contains("exp_0 [shape=point];"));
        assert!(dot.contains("[style=dashed]"));
    }

    #[test]
    fn text_lists_every_section_it_has_data_for() {
        let text = sample().to_text();
        assert!(text.contains("states:"));
        assert!(text.contains("unary:"));
        assert!(text.contains("binary:"));
        assert!(text.contains("partition:"));
        assert!(!text.contains("transitions:"));
    }
}
