//! Generative graph grammar for mission graphs.
//!
//! A backbone chain of non-terminal symbols is rewritten until only terminals
//! remain. Each step picks a random rewrite site (a single non-terminal node,
//! or an edge whose endpoints match a pair rule) and a random applicable rule,
//! then splices the rule's mini-graph in place of the matched nodes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::model::{MissionGraph, RoomSymbol, SymbolKind};

pub const DEFAULT_MAX_STEPS: usize = 200;
pub const DEFAULT_RULES: &str = include_str!("../data/default_rules.toml");
pub const DEFAULT_BACKBONE: &str = include_str!("../data/backbone.txt");

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct GrammarFileError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("backbone is empty")]
    EmptyBackbone,
    #[error("backbone must start with a start symbol and end with a triforce symbol")]
    BadBackbone,
    #[error("step budget of {max_steps} exhausted with {remaining} non-terminals left")]
    Budget { max_steps: usize, remaining: usize },
    #[error("no rule applies to non-terminal {0}")]
    Stuck(RoomSymbol),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// One symbol, or the two endpoints of an edge.
    pub lhs: Vec<RoomSymbol>,
    pub rhs_names: Vec<String>,
    pub rhs_nodes: Vec<RoomSymbol>,
    pub rhs_edges: Vec<(usize, usize)>,
    pub in_attach: usize,
    pub out_attach: usize,
    /// Line of the rule in its source file (0 for rules built in code).
    pub line: usize,
}

impl Rule {
    fn check(&self) -> Result<(), String> {
        if self.lhs.is_empty() || self.lhs.len() > 2 {
            return Err(format!("lhs must have 1 or 2 symbols, found {}", self.lhs.len()));
        }
        if let Some(t) = self.lhs.iter().find(|s| s.is_terminal()) {
            return Err(format!("lhs symbol {t} is a terminal"));
        }
        if self.rhs_nodes.is_empty() {
            return Err("rhs has no nodes".into());
        }
        // Connectivity of the rhs, ignoring direction.
        let n = self.rhs_nodes.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.rhs_edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == u && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(format!("rhs node {} is not connected", self.rhs_names[i]));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub max_steps: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRuleFile {
    max_steps: Option<Spanned<usize>>,
    #[serde(default)]
    rule: Vec<Spanned<RawRule>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    lhs: Vec<Spanned<String>>,
    rhs: RawRhs,
    #[serde(rename = "in")]
    in_attach: Spanned<String>,
    out: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRhs {
    nodes: BTreeMap<String, Spanned<String>>,
    #[serde(default)]
    edges: Vec<Spanned<(String, String)>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl RuleSet {
    pub fn default_rules() -> Self {
        RuleSet::parse(DEFAULT_RULES).expect("built-in rule file is valid")
    }

    pub fn parse(text: &str) -> Result<Self, GrammarFileError> {
        let raw: RawRuleFile = toml::from_str(text).map_err(|e| GrammarFileError {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let err = |offset: usize, message: String| GrammarFileError { line: line_of(text, offset), message };

        let mut rules = Vec::with_capacity(raw.rule.len());
        for spanned in raw.rule {
            let rule_start = spanned.span().start;
            let r = spanned.into_inner();
            let mut lhs = Vec::new();
            for s in &r.lhs {
                lhs.push(s.get_ref().parse::<RoomSymbol>().map_err(|m| err(s.span().start, m))?);
            }
            let rhs_names: Vec<String> = r.rhs.nodes.keys().cloned().collect();
            let mut rhs_nodes = Vec::new();
            for sym in r.rhs.nodes.values() {
                rhs_nodes.push(sym.get_ref().parse::<RoomSymbol>().map_err(|m| err(sym.span().start, m))?);
            }
            let index = |name: &Spanned<String>| {
                rhs_names
                    .iter()
                    .position(|n| n == name.get_ref())
                    .ok_or_else(|| err(name.span().start, format!("unknown rhs node {:?}", name.get_ref())))
            };
            let mut rhs_edges = Vec::new();
            for e in &r.rhs.edges {
                let (a, b) = e.get_ref();
                let find = |n: &String| {
                    rhs_names
                        .iter()
                        .position(|x| x == n)
                        .ok_or_else(|| err(e.span().start, format!("edge names unknown rhs node {n:?}")))
                };
                rhs_edges.push((find(a)?, find(b)?));
            }
            let rule = Rule {
                lhs,
                in_attach: index(&r.in_attach)?,
                out_attach: index(&r.out)?,
                rhs_names,
                rhs_nodes,
                rhs_edges,
                line: line_of(text, rule_start),
            };
            rule.check().map_err(|m| err(rule_start, m))?;
            rules.push(rule);
        }
        let max_steps = match raw.max_steps {
            Some(s) if *s.get_ref() == 0 => return Err(err(s.span().start, "max_steps must be positive".into())),
            Some(s) => s.into_inner(),
            None => DEFAULT_MAX_STEPS,
        };
        let set = RuleSet { rules, max_steps };
        let stuck = set.unterminable_symbols(&[]);
        if let Some(sym) = stuck.first() {
            return Err(GrammarFileError {
                line: 0,
                message: format!("non-terminal {sym} can never be rewritten to terminals"),
            });
        }
        Ok(set)
    }

    /// Non-terminals (from rule right-hand sides and `extra`) that no chain of
    /// single-symbol rules can reduce to terminals. Computed as a least fixpoint.
    pub fn unterminable_symbols(&self, extra: &[RoomSymbol]) -> Vec<RoomSymbol> {
        let mut good: BTreeSet<RoomSymbol> = BTreeSet::new();
        loop {
            let before = good.len();
            for rule in self.rules.iter().filter(|r| r.lhs.len() == 1) {
                if rule.rhs_nodes.iter().all(|s| s.is_terminal() || good.contains(s)) {
                    good.insert(rule.lhs[0]);
                }
            }
            if good.len() == before {
                break;
            }
        }
        let mentioned: BTreeSet<RoomSymbol> = self
            .rules
            .iter()
            .flat_map(|r| r.rhs_nodes.iter().chain(r.lhs.iter()))
            .chain(extra.iter())
            .copied()
            .filter(|s| !s.is_terminal())
            .collect();
        mentioned.into_iter().filter(|s| !good.contains(s)).collect()
    }

    fn rules_for(&self, lhs: &[RoomSymbol]) -> Vec<&Rule> {
        self.rules.iter().filter(|r| r.lhs == lhs).collect()
    }
}

/// Parses a backbone: symbols separated by whitespace and/or `->`; `#` starts a comment.
pub fn parse_backbone(text: &str) -> Result<Vec<RoomSymbol>, GrammarFileError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace().flat_map(|t| t.split("->")).filter(|t| !t.is_empty()) {
            let sym = token.parse().map_err(|message| GrammarFileError { line: i + 1, message })?;
            out.push(sym);
        }
    }
    if out.is_empty() {
        return Err(GrammarFileError { line: 0, message: "backbone is empty".into() });
    }
    Ok(out)
}

pub fn default_backbone() -> Vec<RoomSymbol> {
    parse_backbone(DEFAULT_BACKBONE).expect("built-in backbone is valid")
}

#[derive(Debug, Clone, Copy)]
struct WorkNode {
    symbol: RoomSymbol,
    origin: usize,
}

enum Site {
    Node(usize),
    Edge(usize, usize),
}

/// Working graph during expansion. Node ids are stable; removed nodes become `None`.
struct WorkGraph {
    nodes: Vec<Option<WorkNode>>,
    edges: Vec<(usize, usize)>,
}

impl WorkGraph {
    fn non_terminals(&self) -> impl Iterator<Item = (usize, WorkNode)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.filter(|n| !n.symbol.is_terminal()).map(|n| (i, n)))
    }

    fn symbol(&self, id: usize) -> RoomSymbol {
        self.nodes[id].expect("live node").symbol
    }

    fn splice(&mut self, matched: &[usize], rule: &Rule) {
        let origins: Vec<usize> = matched.iter().map(|&id| self.nodes[id].unwrap().origin).collect();
        let base = self.nodes.len();
        for (i, &symbol) in rule.rhs_nodes.iter().enumerate() {
            // The out-attach node inherits the last matched node's backbone
            // position, everything else the first's.
            let origin = if i == rule.out_attach && i != rule.in_attach {
                *origins.last().unwrap()
            } else {
                origins[0]
            };
            self.nodes.push(Some(WorkNode { symbol, origin }));
        }
        let in_id = base + rule.in_attach;
        let out_id = base + rule.out_attach;
        let is_matched = |id: usize| matched.contains(&id);
        self.edges.retain(|&(a, b)| !(is_matched(a) && is_matched(b)));
        for e in &mut self.edges {
            if is_matched(e.1) {
                e.1 = in_id;
            }
            if is_matched(e.0) {
                e.0 = out_id;
            }
        }
        self.edges.extend(rule.rhs_edges.iter().map(|&(a, b)| (base + a, base + b)));
        for &id in matched {
            self.nodes[id] = None;
        }
    }

    /// Compacts live nodes in id order into a mission graph.
    fn finish(self) -> MissionGraph {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        let mut origins = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(n) = n {
                remap[i] = nodes.len();
                nodes.push(n.symbol);
                origins.push(n.origin);
            }
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (remap[a], remap[b])).collect();
        let find = |kind| nodes.iter().position(|s: &RoomSymbol| s.kind() == kind).unwrap_or(0);
        MissionGraph {
            start_node: find(SymbolKind::Start),
            triforce_node: find(SymbolKind::Triforce),
            nodes,
            edges,
            origins,
        }
    }
}

/// Rewrites `backbone` (a chain) until only terminals remain.
pub fn expand<R: Rng + ?Sized>(
    backbone: &[RoomSymbol],
    rules: &RuleSet,
    rng: &mut R,
) -> Result<MissionGraph, ExpansionError> {
    let (first, last) = match (backbone.first(), backbone.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(ExpansionError::EmptyBackbone),
    };
    if first.kind() != SymbolKind::Start || last.kind() != SymbolKind::Triforce {
        return Err(ExpansionError::BadBackbone);
    }
    let mut g = WorkGraph {
        nodes: backbone.iter().enumerate().map(|(i, &symbol)| Some(WorkNode { symbol, origin: i })).collect(),
        edges: (1..backbone.len()).map(|i| (i - 1, i)).collect(),
    };

    let mut steps = 0;
    loop {
        let remaining = g.non_terminals().count();
        if remaining == 0 {
            return Ok(g.finish());
        }
        if steps >= rules.max_steps {
            return Err(ExpansionError::Budget { max_steps: rules.max_steps, remaining });
        }
        let mut sites: Vec<(Site, Vec<&Rule>)> = Vec::new();
        for (id, node) in g.non_terminals() {
            let applicable = rules.rules_for(&[node.symbol]);
            if !applicable.is_empty() {
                sites.push((Site::Node(id), applicable));
            }
        }
        for &(a, b) in &g.edges {
            let pair = [g.symbol(a), g.symbol(b)];
            if pair.iter().any(|s| s.is_terminal()) {
                continue;
            }
            let applicable = rules.rules_for(&pair);
            if !applicable.is_empty() {
                sites.push((Site::Edge(a, b), applicable));
            }
        }
        let Some((site, applicable)) = sites.choose(rng) else {
            let (_, stuck) = g.non_terminals().next().expect("non-terminal present");
            return Err(ExpansionError::Stuck(stuck.symbol));
        };
        let rule = *applicable.choose(rng).expect("site has a rule");
        match *site {
            Site::Node(id) => g.splice(&[id], rule),
            Site::Edge(a, b) => g.splice(&[a, b], rule),
        }
        steps += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural mission checks on a terminal graph.
pub fn validate(graph: &MissionGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let count = |kind| graph.nodes.iter().filter(|s| s.kind() == kind).count();
    if let Some(nt) = graph.nodes.iter().find(|s| !s.is_terminal()) {
        violations.push(format!("non-terminal {nt} remains"));
    }
    match count(SymbolKind::Start) {
        1 => {}
        0 => violations.push("missing Start".into()),
        _ => violations.push("duplicate Start".into()),
    }
    match count(SymbolKind::Triforce) {
        1 => {}
        0 => violations.push("missing Triforce".into()),
        _ => violations.push("duplicate Triforce".into()),
    }
    if count(SymbolKind::SoftLock) == 0 {
        violations.push("no SoftLock room".into());
    }
    if graph.nodes.get(graph.start_node).map(|s| s.kind()) != Some(SymbolKind::Start) {
        violations.push("startNode is not a Start room".into());
    }
    if graph.nodes.get(graph.triforce_node).map(|s| s.kind()) != Some(SymbolKind::Triforce) {
        violations.push("triforceNode is not a Triforce room".into());
    }
    if graph.edges.iter().any(|&(a, b)| a >= graph.len() || b >= graph.len()) {
        violations.push("edge references a missing node".into());
        return ValidationReport { violations };
    }
    if graph.nodes.is_empty() {
        return ValidationReport { violations };
    }
    if graph.edges.iter().any(|&(_, b)| b == graph.start_node) {
        violations.push("Start has an incoming edge".into());
    }

    let reach_from = |src: usize| {
        let mut seen = vec![false; graph.len()];
        let mut queue = VecDeque::from([src]);
        seen[src] = true;
        while let Some(u) = queue.pop_front() {
            for v in graph.successors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    };
    let from_start = reach_from(graph.start_node);
    if let Some(i) = from_start.iter().position(|r| !r) {
        violations.push(format!("node {i} ({}) is not reachable from Start", graph.nodes[i]));
    }
    for (lock, sym) in graph.nodes.iter().enumerate() {
        if sym.kind() != SymbolKind::Lock {
            continue;
        }
        let keyed = graph.nodes.iter().enumerate().any(|(k, s)| {
            s.kind() == SymbolKind::Key && k != lock && from_start[k] && reach_from(k)[lock]
        });
        if !keyed {
            violations.push(format!("lock node {lock} has no key before it"));
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(s: &str) -> RoomSymbol {
        s.parse().unwrap()
    }

    fn chain(symbols: &str) -> Vec<RoomSymbol> {
        parse_backbone(symbols).unwrap()
    }

    #[test]
    fn default_files_load() {
        let rules = RuleSet::default_rules();
        assert_eq!(rules.max_steps, 200);
        assert!(rules.rules.len() >= 10);
        assert_eq!(default_backbone().len(), 10);
        assert!(rules.unterminable_symbols(&default_backbone()).is_empty());
    }

    #[test]
    fn key_lock_pair_rule_from_default_set() {
        let rules = RuleSet::default_rules();
        let kl: Vec<&Rule> = rules.rules_for(&[sym("K"), sym("L")]);
        assert_eq!(kl.len(), 1);
        let only = RuleSet { rules: vec![kl[0].clone()], max_steps: 10 };
        // Splice it directly into a K -> L chain with no neighbours.
        let mut g = WorkGraph {
            nodes: vec![
                Some(WorkNode { symbol: sym("K"), origin: 0 }),
                Some(WorkNode { symbol: sym("L"), origin: 1 }),
            ],
            edges: vec![(0, 1)],
        };
        g.splice(&[0, 1], &only.rules[0]);
        let out = g.finish();
        assert_eq!(out.nodes, vec![sym("k"), sym("e"), sym("l")]);
        assert_eq!(out.edges, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn all_terminal_backbone_is_unchanged() {
        let rules = RuleSet::default_rules();
        let backbone = chain("s -> e -> t");
        let g = expand(&backbone, &rules, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(g.nodes, backbone);
        assert_eq!(g.edges, vec![(0, 1), (1, 2)]);
    }

    const DETERMINISTIC: &str = r#"
[[rule]]
lhs = ["S"]
rhs.nodes = { a = "s" }
in = "a"
out = "a"

[[rule]]
lhs = ["K"]
rhs.nodes = { a = "k", b = "e" }
rhs.edges = [["a", "b"]]
in = "a"
out = "a"

[[rule]]
lhs = ["T"]
rhs.nodes = { a = "sl", b = "t" }
rhs.edges = [["a", "b"]]
in = "a"
out = "b"
"#;

    /// Every derivation of a backbone: all site orders and rule choices.
    fn enumerate(g: &WorkGraph, rules: &RuleSet, out: &mut Vec<MissionGraph>) {
        let nts: Vec<usize> = g.non_terminals().map(|(i, _)| i).collect();
        if nts.is_empty() {
            let copy = WorkGraph { nodes: g.nodes.clone(), edges: g.edges.clone() };
            out.push(copy.finish());
            return;
        }
        for id in nts {
            for rule in rules.rules_for(&[g.symbol(id)]) {
                let mut next = WorkGraph { nodes: g.nodes.clone(), edges: g.edges.clone() };
                next.splice(&[id], rule);
                enumerate(&next, rules, out);
            }
        }
    }

    fn canonical(g: &MissionGraph) -> (Vec<String>, BTreeSet<(String, String)>) {
        let mut labels: Vec<String> = g.nodes.iter().map(|s| s.to_string()).collect();
        labels.sort();
        let edges = g.edges.iter().map(|&(a, b)| (g.nodes[a].to_string(), g.nodes[b].to_string())).collect();
        (labels, edges)
    }

    #[test]
    fn one_rule_per_symbol_is_deterministic() {
        let rules = RuleSet::parse(DETERMINISTIC).unwrap();
        let backbone = chain("S K T");
        let start = WorkGraph {
            nodes: backbone.iter().enumerate().map(|(i, &symbol)| Some(WorkNode { symbol, origin: i })).collect(),
            edges: vec![(0, 1), (1, 2)],
        };
        let mut all = Vec::new();
        enumerate(&start, &rules, &mut all);
        assert_eq!(all.len(), 6, "3! site orders");
        let first = canonical(&all[0]);
        assert!(all.iter().all(|g| canonical(g) == first));
        for seed in 0..20 {
            let g = expand(&backbone, &rules, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(canonical(&g), first);
        }
        assert_eq!(first.0, vec!["e", "k", "s", "sl", "t"]);
    }

    #[test]
    fn expansion_is_reproducible_and_monotone() {
        let rules = RuleSet::default_rules();
        let backbone = default_backbone();
        let a = expand(&backbone, &rules, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = expand(&backbone, &rules, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
        assert!(validate(&a).passed(), "{:?}", validate(&a));
    }

    #[test]
    fn origins_contract_to_the_backbone_chain() {
        let rules = RuleSet::default_rules();
        let backbone = default_backbone();
        for seed in 0..200 {
            let g = expand(&backbone, &rules, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for &(a, b) in &g.edges {
                let step = g.origins[b] as i64 - g.origins[a] as i64;
                assert!(step == 0 || step == 1, "seed {seed}: edge {a}->{b} jumps {step}");
            }
            let covered: BTreeSet<usize> = g.origins.iter().copied().collect();
            assert_eq!(covered, (0..backbone.len()).collect());
        }
    }

    #[test]
    fn stuck_symbol_is_named() {
        let text = r#"
[[rule]]
lhs = ["S"]
rhs.nodes = { a = "s" }
in = "a"
out = "a"

[[rule]]
lhs = ["T"]
rhs.nodes = { a = "t" }
in = "a"
out = "a"
"#;
        let rules = RuleSet::parse(text).unwrap();
        let err = expand(&chain("S P T"), &rules, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert_eq!(err, ExpansionError::Stuck(sym("P")));
    }

    #[test]
    fn budget_exhaustion() {
        let text = r#"
max_steps = 3
[[rule]]
lhs = ["E"]
rhs.nodes = { a = "e", b = "E" }
rhs.edges = [["a", "b"]]
in = "a"
out = "b"

[[rule]]
lhs = ["E"]
rhs.nodes = { a = "e" }
in = "a"
out = "a"
"#;
        let rules = RuleSet::parse(text).unwrap();
        let mut hit_budget = false;
        for seed in 0..50 {
            if let Err(ExpansionError::Budget { max_steps: 3, .. }) =
                expand(&chain("s E E E E t"), &rules, &mut ChaCha8Rng::seed_from_u64(seed))
            {
                hit_budget = true;
            }
        }
        assert!(hit_budget);
    }

    #[test]
    fn rule_file_errors_are_line_precise() {
        let text = "max_steps = 10\n\n[[rule]]\nlhs = [\"Q\"]\nrhs.nodes = { a = \"s\" }\nin = \"a\"\nout = \"a\"\n";
        let err = RuleSet::parse(text).unwrap_err();
        assert_eq!(err.line, 4, "{err}");

        let text = "[[rule]]\nlhs = [\"S\"]\nrhs.nodes = { a = \"s\" }\nin = \"zz\"\nout = \"a\"\n";
        assert_eq!(RuleSet::parse(text).unwrap_err().line, 4);

        let text = "[[rule]]\nlhs = [\"S\"]\nrhs.nodes = { a = \"s\" }\nin = \"a\"\nout = \"a\"\nbogus = 1\n";
        assert!(RuleSet::parse(text).is_err());
    }

    #[test]
    fn unterminable_rule_set_rejected_at_load() {
        let text = "[[rule]]\nlhs = [\"E\"]\nrhs.nodes = { a = \"e\", b = \"E\" }\nrhs.edges = [[\"a\", \"b\"]]\nin = \"a\"\nout = \"b\"\n";
        let err = RuleSet::parse(text).unwrap_err();
        assert!(err.message.contains("E"), "{err}");
    }

    #[test]
    fn disconnected_rhs_rejected() {
        let text = "[[rule]]\nlhs = [\"S\"]\nrhs.nodes = { a = \"s\", b = \"e\" }\nin = \"a\"\nout = \"a\"\n";
        let err = RuleSet::parse(text).unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn backbone_errors_name_the_line() {
        let err = parse_backbone("S -> E\nK -> X\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_backbone("# nothing\n").is_err());
    }

    #[test]
    fn validate_flags_duplicate_triforce() {
        let g = MissionGraph {
            nodes: vec![sym("s"), sym("sl"), sym("t"), sym("t")],
            edges: vec![(0, 1), (1, 2), (1, 3)],
            start_node: 0,
            triforce_node: 2,
            origins: vec![],
        };
        let report = validate(&g);
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.contains("duplicate Triforce")));
    }

    #[test]
    fn validate_flags_lock_without_key() {
        let g = MissionGraph {
            nodes: vec![sym("s"), sym("l"), sym("k"), sym("sl"), sym("t")],
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 4)],
            start_node: 0,
            triforce_node: 4,
            origins: vec![],
        };
        let report = validate(&g);
        assert_eq!(report.violations, vec!["lock node 1 has no key before it".to_string()]);
    }

    #[test]
    fn backbone_must_be_start_to_triforce() {
        let rules = RuleSet::default_rules();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(expand(&[], &rules, &mut rng), Err(ExpansionError::EmptyBackbone));
        assert_eq!(expand(&chain("E T"), &rules, &mut rng), Err(ExpansionError::BadBackbone));
    }
}
