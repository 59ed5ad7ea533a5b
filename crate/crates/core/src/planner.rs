//! Tile planning: hierarchical region trees, the post-order dynamic program
//! that picks non-overlapping tiles and a model for each under a latency
//! budget, the exhaustive oracle used to cross-check it, uniform grid plans,
//! and plan election.
//!
//! Feasible selections obey two constraints: no selected node is an ancestor
//! or descendant of another selected node (C1 — their regions would overlap),
//! and each node carries at most one model (C2). The DP threads a running
//! solution row through a depth-first post-order traversal, so one
//! (budget+1)-column row per live node suffices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::plan_estimated_accuracy;
use crate::geometry::BBox;
use crate::profile::{Mode, ModelFamily, ModelProfile, SizeBinning};

/// Maximum quad-tree depth.
pub const MAX_TREE_DEPTH: u8 = 6;

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("tree depth {0} out of range 0..={MAX_TREE_DEPTH}")]
    DepthOutOfRange(u8),
    #[error("nodes are not in depth-first post-order: {0}")]
    NotPostOrder(String),
    #[error("instance exceeds brute-force guard (nodes ≤ {max_nodes}, models ≤ {max_models}, budget ≤ {max_budget}): {got}")]
    BruteForceGuard { max_nodes: usize, max_models: usize, max_budget: u32, got: String },
    #[error("instance shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// One node of a region tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionNode {
    pub region: BBox,
    /// Child indices, left to right; empty for leaves.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    pub depth: u8,
}

/// A tree of frame regions stored in depth-first post-order (children before
/// their parent, left to right; the root is last).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTree {
    nodes: Vec<RegionNode>,
    /// Number of nodes in each node's subtree (itself included).
    subtree_sizes: Vec<usize>,
}

impl RegionTree {
    /// Builds the quad-tree over `[0,1]²`: every internal node splits into
    /// four equal quadrants, down to `depth` levels below the root.
    pub fn quad(depth: u8) -> Result<Self, PlannerError> {
        if depth > MAX_TREE_DEPTH {
            return Err(PlannerError::DepthOutOfRange(depth));
        }
        // Recursive post-order construction; returns the node's index.
        fn build(nodes: &mut Vec<RegionNode>, region: BBox, level: u8, max: u8) -> usize {
            let mut children = Vec::new();
            if level < max {
                let (x0, y0, x1, y1) = (region.x_min, region.y_min, region.x_max, region.y_max);
                let xm = 0.5 * (x0 + x1);
                let ym = 0.5 * (y0 + y1);
                for quadrant in [
                    BBox::new(x0, y0, xm, ym),
                    BBox::new(xm, y0, x1, ym),
                    BBox::new(x0, ym, xm, y1),
                    BBox::new(xm, ym, x1, y1),
                ] {
                    children.push(build(nodes, quadrant, level + 1, max));
                }
            }
            let idx = nodes.len();
            nodes.push(RegionNode { region, children: children.clone(), parent: None, depth: level });
            for c in children {
                nodes[c].parent = Some(idx);
            }
            idx
        }
        let mut nodes = Vec::new();
        build(&mut nodes, BBox::unit(), 0, depth);
        Self::from_nodes(nodes)
    }

    /// Wraps explicit nodes, validating the post-order layout: each node's
    /// children precede it contiguously, parent links are consistent, and the
    /// final node is the root covering everything.
    pub fn from_nodes(nodes: Vec<RegionNode>) -> Result<Self, PlannerError> {
        if nodes.is_empty() {
            return Err(PlannerError::NotPostOrder("empty node list".into()));
        }
        let n = nodes.len();
        let mut subtree_sizes = vec![1usize; n];
        for (i, node) in nodes.iter().enumerate() {
            let mut next_subtree_end = i; // exclusive end of the next child's range
            for &c in node.children.iter().rev() {
                if c >= i {
                    return Err(PlannerError::NotPostOrder(format!(
                        "node {i} lists child {c} at or after itself"
                    )));
                }
                if nodes[c].parent != Some(i) {
                    return Err(PlannerError::NotPostOrder(format!(
                        "child {c} does not point back to parent {i}"
                    )));
                }
                if c + 1 != next_subtree_end {
                    return Err(PlannerError::NotPostOrder(format!(
                        "child {c} of node {i} is not contiguous in post-order"
                    )));
                }
                next_subtree_end = c + 1 - subtree_sizes[c];
                subtree_sizes[i] += subtree_sizes[c];
            }
        }
        if nodes[n - 1].parent.is_some() || subtree_sizes[n - 1] != n {
            return Err(PlannerError::NotPostOrder(
                "final node is not a root covering all nodes".into(),
            ));
        }
        for (i, node) in nodes.iter().enumerate().take(n - 1) {
            if node.parent.is_none() {
                return Err(PlannerError::NotPostOrder(format!("node {i} is an orphan")));
            }
        }
        Ok(Self { nodes, subtree_sizes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[RegionNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &RegionNode {
        &self.nodes[i]
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// True when `a` is a strict ancestor of `b`. In post-order, `a`'s subtree
    /// occupies the contiguous index range `[a+1-size(a), a]`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        b < a && b + self.subtree_sizes[a] > a
    }
}

/// The discretized planning problem: per-(node, model) accuracy contributions,
/// per-model latency in units, and the unit budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningInstance {
    /// `accuracy[node][model]`, each ≥ 0. The value already folds in the
    /// node's object-fraction weight, so the DP objective is the plan's
    /// estimated accuracy.
    pub accuracy: Vec<Vec<f64>>,
    /// Latency per model in budget units, each ≥ 1.
    pub latency_units: Vec<u32>,
    pub budget_units: u32,
    /// Milliseconds per budget unit.
    pub step_ms: f64,
}

impl PlanningInstance {
    pub fn model_count(&self) -> usize {
        self.latency_units.len()
    }

    fn check_shape(&self, tree: &RegionTree) -> Result<(), PlannerError> {
        if self.accuracy.len() != tree.len() {
            return Err(PlannerError::ShapeMismatch(format!(
                "{} accuracy rows for {} nodes",
                self.accuracy.len(),
                tree.len()
            )));
        }
        for (i, row) in self.accuracy.iter().enumerate() {
            if row.len() != self.model_count() {
                return Err(PlannerError::ShapeMismatch(format!(
                    "node {i} has {} accuracy entries for {} models",
                    row.len(),
                    self.model_count()
                )));
            }
            if row.iter().any(|a| !a.is_finite() || *a < 0.0) {
                return Err(PlannerError::ShapeMismatch(format!(
                    "node {i} has a negative or non-finite accuracy"
                )));
            }
        }
        if self.latency_units.contains(&0) {
            return Err(PlannerError::ShapeMismatch("model latency of 0 units".into()));
        }
        Ok(())
    }
}

/// A solved instance: the objective, the per-node model choice (`None` =
/// node not selected), and the total latency units consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub objective: f64,
    pub assignment: Vec<Option<usize>>,
    pub latency_units: u32,
}

/// Intermediate DP state recorded after one node's pass, at the full budget
/// column: the best solution over the nodes threaded so far.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTrace {
    pub node: usize,
    pub objective: f64,
    pub latency_units: u32,
    pub assignment: Vec<Option<usize>>,
}

/// One DP row: per budget column, the best (value, units, selection) triple.
/// The selection ("SOL") stores model+1 per node, 0 meaning unselected.
#[derive(Clone)]
struct Row {
    value: Vec<f64>,
    units: Vec<u32>,
    sol: Vec<Vec<u8>>,
}

impl Row {
    fn zero(budget: usize, nodes: usize) -> Self {
        Self {
            value: vec![0.0; budget + 1],
            units: vec![0; budget + 1],
            sol: vec![vec![0u8; nodes]; budget + 1],
        }
    }
}

/// Strictly-better comparison for DP entries: greater value, then fewer
/// latency units, then the lexicographically smaller selection row.
fn better(v_new: f64, u_new: u32, s_new: &[u8], v_old: f64, u_old: u32, s_old: &[u8]) -> bool {
    if v_new != v_old {
        return v_new > v_old;
    }
    if u_new != u_old {
        return u_new < u_old;
    }
    s_new < s_old
}

/// Lexicographic comparison of (`base` with `base[node] = model_byte`)
/// against `right`, without materializing the substituted row.
fn substituted_lex_less(base: &[u8], node: usize, model_byte: u8, right: &[u8]) -> bool {
    for (k, (&b, &r)) in base.iter().zip(right).enumerate() {
        let left = if k == node { model_byte } else { b };
        if left != r {
            return left < r;
        }
    }
    false
}

fn decode_assignment(sol: &[u8]) -> Vec<Option<usize>> {
    sol.iter().map(|&b| if b == 0 { None } else { Some(b as usize - 1) }).collect()
}

/// Solves one node's subtree. `dp_left` is the solution row over everything
/// threaded before this subtree; the returned row covers that plus this
/// subtree. Each column of the output is the best of: selecting this node
/// with some model on top of `dp_left` at the remaining budget (which
/// forfeits the node's descendants), `dp_left` unchanged (skip the subtree),
/// or the threaded last-child row (best selection strictly inside the
/// subtree).
fn solve_node(
    node: usize,
    instance: &PlanningInstance,
    tree: &RegionTree,
    dp_left: &Row,
    trace: &mut Vec<NodeTrace>,
    want_trace: bool,
) -> Row {
    let budget = instance.budget_units as usize;
    let n_nodes = tree.len();

    let mut threaded_owned: Option<Row> = None;
    for &child in &tree.node(node).children {
        let prev = threaded_owned.as_ref().unwrap_or(dp_left);
        threaded_owned = Some(solve_node(child, instance, tree, prev, trace, want_trace));
    }
    let threaded: &Row = threaded_owned.as_ref().unwrap_or(dp_left);

    let mut out = Row::zero(budget, n_nodes);
    for i in 0..=budget {
        // Option 1: select this node with model m. Bases on the original
        // dp_left, never the threaded row — C1 forbids combining a node with
        // its own descendants.
        for (m, &lat) in instance.latency_units.iter().enumerate() {
            let lat = lat as usize;
            if lat > i {
                continue;
            }
            let j = i - lat;
            let v = dp_left.value[j] + instance.accuracy[node][m];
            let u = dp_left.units[j] + lat as u32;
            let model_byte = (m + 1) as u8;
            let wins = if v != out.value[i] {
                v > out.value[i]
            } else if u != out.units[i] {
                u < out.units[i]
            } else {
                substituted_lex_less(&dp_left.sol[j], node, model_byte, &out.sol[i])
            };
            if wins {
                out.value[i] = v;
                out.units[i] = u;
                out.sol[i].copy_from_slice(&dp_left.sol[j]);
                out.sol[i][node] = model_byte;
            }
        }
        // Option 2: keep the left solution, skipping this subtree entirely.
        if better(
            dp_left.value[i],
            dp_left.units[i],
            &dp_left.sol[i],
            out.value[i],
            out.units[i],
            &out.sol[i],
        ) {
            out.value[i] = dp_left.value[i];
            out.units[i] = dp_left.units[i];
            out.sol[i].copy_from_slice(&dp_left.sol[i]);
        }
        // Option 3: the threaded children row.
        if better(
            threaded.value[i],
            threaded.units[i],
            &threaded.sol[i],
            out.value[i],
            out.units[i],
            &out.sol[i],
        ) {
            out.value[i] = threaded.value[i];
            out.units[i] = threaded.units[i];
            out.sol[i].copy_from_slice(&threaded.sol[i]);
        }
    }

    if want_trace {
        trace.push(NodeTrace {
            node,
            objective: out.value[budget],
            latency_units: out.units[budget],
            assignment: decode_assignment(&out.sol[budget]),
        });
    }
    out
}

fn dp_dp_inner(
    instance: &PlanningInstance,
    tree: &RegionTree,
    want_trace: bool,
) -> Result<(DpSolution, Vec<NodeTrace>), PlannerError> {
    instance.check_shape(tree)?;
    let budget = instance.budget_units as usize;
    let zero = Row::zero(budget, tree.len());
    let mut trace = Vec::new();
    let final_row = solve_node(tree.root(), instance, tree, &zero, &mut trace, want_trace);
    Ok((
        DpSolution {
            objective: final_row.value[budget],
            assignment: decode_assignment(&final_row.sol[budget]),
            latency_units: final_row.units[budget],
        },
        trace,
    ))
}

/// Optimal tile/model selection under the budget: maximizes the summed
/// accuracy contribution over all C1/C2-feasible selections. Deterministic:
/// ties fall to smaller total latency, then the lexicographically smaller
/// selection row.
pub fn dp_dp(instance: &PlanningInstance, tree: &RegionTree) -> Result<DpSolution, PlannerError> {
    dp_dp_inner(instance, tree, false).map(|(sol, _)| sol)
}

/// Like [`dp_dp`], additionally reporting the threaded solution state after
/// each node's pass (in traversal order) at the full budget column.
pub fn dp_dp_with_trace(
    instance: &PlanningInstance,
    tree: &RegionTree,
) -> Result<(DpSolution, Vec<NodeTrace>), PlannerError> {
    dp_dp_inner(instance, tree, true)
}

/// Exhaustive reference solver: tries every C1/C2-feasible assignment within
/// the budget via depth-first search with an admissible optimistic bound.
/// Guarded to small instances; exact within the guard.
pub fn brute_force_plan(
    instance: &PlanningInstance,
    tree: &RegionTree,
) -> Result<DpSolution, PlannerError> {
    const MAX_NODES: usize = 25;
    const MAX_MODELS: usize = 4;
    const MAX_BUDGET: u32 = 64;
    instance.check_shape(tree)?;
    if tree.len() > MAX_NODES
        || instance.model_count() > MAX_MODELS
        || instance.budget_units > MAX_BUDGET
    {
        return Err(PlannerError::BruteForceGuard {
            max_nodes: MAX_NODES,
            max_models: MAX_MODELS,
            max_budget: MAX_BUDGET,
            got: format!(
                "nodes {}, models {}, budget {}",
                tree.len(),
                instance.model_count(),
                instance.budget_units
            ),
        });
    }

    let n = tree.len();
    // Best possible remaining contribution from node i onward, ignoring
    // compatibility — an admissible bound for pruning.
    let mut rest_bound = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let node_max = instance.accuracy[i].iter().cloned().fold(0.0, f64::max);
        rest_bound[i] = rest_bound[i + 1] + node_max;
    }

    struct Search<'a> {
        instance: &'a PlanningInstance,
        tree: &'a RegionTree,
        rest_bound: &'a [f64],
        chosen: Vec<(usize, usize)>,
        best: DpSolution,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize, value: f64, units: u32) {
            if value + self.rest_bound[i] < self.best.objective {
                return;
            }
            if i == self.tree.len() {
                let mut assignment = vec![None; self.tree.len()];
                for &(node, model) in &self.chosen {
                    assignment[node] = Some(model);
                }
                let sol: Vec<u8> =
                    assignment.iter().map(|a| a.map_or(0, |m| m as u8 + 1)).collect();
                let best_sol: Vec<u8> =
                    self.best.assignment.iter().map(|a| a.map_or(0, |m| m as u8 + 1)).collect();
                if better(value, units, &sol, self.best.objective, self.best.latency_units, &best_sol)
                {
                    self.best = DpSolution { objective: value, assignment, latency_units: units };
                }
                return;
            }
            let compatible = self
                .chosen
                .iter()
                .all(|&(c, _)| !self.tree.is_ancestor(c, i) && !self.tree.is_ancestor(i, c));
            if compatible {
                for (m, &lat) in self.instance.latency_units.iter().enumerate() {
                    let lat_total = units + lat;
                    if lat_total <= self.instance.budget_units {
                        self.chosen.push((i, m));
                        self.run(i + 1, value + self.instance.accuracy[i][m], lat_total);
                        self.chosen.pop();
                    }
                }
            }
            self.run(i + 1, value, units);
        }
    }

    let mut search = Search {
        instance,
        tree,
        rest_bound: &rest_bound,
        chosen: Vec::new(),
        best: DpSolution { objective: 0.0, assignment: vec![None; n], latency_units: 0 },
    };
    search.run(0, 0.0, 0);
    Ok(search.best)
}

/// Where a plan came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "model")]
pub enum PlanSource {
    Adaptive,
    Uniform(String),
    Downsample(String),
    Empty,
}

impl PlanSource {
    /// Coarse kind label ("adaptive" / "uniform" / "downsample" / "empty").
    pub fn kind(&self) -> &'static str {
        match self {
            PlanSource::Adaptive => "adaptive",
            PlanSource::Uniform(_) => "uniform",
            PlanSource::Downsample(_) => "downsample",
            PlanSource::Empty => "empty",
        }
    }
}

impl std::fmt::Display for PlanSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlanSource::Adaptive => write!(f, "adaptive"),
            PlanSource::Uniform(m) => write!(f, "uniform({m})"),
            PlanSource::Downsample(m) => write!(f, "downsample({m})"),
            PlanSource::Empty => write!(f, "empty"),
        }
    }
}

/// One region of a plan with its assigned model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanTile {
    #[serde(flatten)]
    pub region: BBox,
    pub model: String,
}

/// A complete tile plan: disjoint regions, one model each, with the
/// planner's accuracy and latency estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilePlan {
    pub tiles: Vec<PlanTile>,
    pub estimated_accuracy: f64,
    pub estimated_latency_ms: f64,
    pub source: PlanSource,
}

impl TilePlan {
    pub fn empty() -> Self {
        Self {
            tiles: Vec::new(),
            estimated_accuracy: 0.0,
            estimated_latency_ms: 0.0,
            source: PlanSource::Empty,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

/// Builds the planning instance for a tree against the local objects:
/// `accuracy[n][m]` = (tile n's eAP under model m) · (tile n's object share),
/// latencies are the mode's estimates rounded *up* to whole units, and the
/// budget is rounded *down* — so unit-feasible plans never overrun the
/// millisecond budget.
pub fn assemble_instance(
    tree: &RegionTree,
    local_objects: &[BBox],
    family: &ModelFamily,
    mode: Mode,
    budget_ms: f64,
    step_ms: f64,
    binning: &SizeBinning,
) -> PlanningInstance {
    assert!(step_ms > 0.0, "step_ms must be positive");
    assert!(budget_ms >= 0.0, "budget_ms must be non-negative");
    let mut accuracy = Vec::with_capacity(tree.len());
    for node in tree.nodes() {
        let dist = crate::distribution::tile_distribution(
            local_objects,
            &node.region,
            local_objects.len(),
            binning,
        )
        .expect("tree regions have positive area");
        let row = family
            .models
            .iter()
            .map(|m| crate::distribution::estimated_accuracy(&dist, m) * dist.weight)
            .collect();
        accuracy.push(row);
    }
    let latency_units = family
        .models
        .iter()
        .map(|m| (m.latency_ms(mode) / step_ms).ceil().max(1.0) as u32)
        .collect();
    PlanningInstance {
        accuracy,
        latency_units,
        budget_units: (budget_ms / step_ms).floor().max(0.0) as u32,
        step_ms,
    }
}

/// Converts a DP solution over a tree into a concrete plan, with the latency
/// estimate in true milliseconds of the chosen models.
pub fn solution_to_plan(
    solution: &DpSolution,
    tree: &RegionTree,
    family: &ModelFamily,
    mode: Mode,
) -> TilePlan {
    let mut tiles = Vec::new();
    let mut latency_ms = 0.0;
    for (node, choice) in solution.assignment.iter().enumerate() {
        if let Some(m) = choice {
            tiles.push(PlanTile {
                region: tree.node(node).region,
                model: family.models[*m].name.clone(),
            });
            latency_ms += family.models[*m].latency_ms(mode);
        }
    }
    if tiles.is_empty() {
        return TilePlan::empty();
    }
    TilePlan {
        tiles,
        estimated_accuracy: solution.objective,
        estimated_latency_ms: latency_ms,
        source: PlanSource::Adaptive,
    }
}

/// Full adaptive planning path: assemble the instance and solve it.
pub fn adaptive_plan(
    tree: &RegionTree,
    local_objects: &[BBox],
    family: &ModelFamily,
    mode: Mode,
    budget_ms: f64,
    step_ms: f64,
    binning: &SizeBinning,
) -> TilePlan {
    let instance = assemble_instance(tree, local_objects, family, mode, budget_ms, step_ms, binning);
    let solution = dp_dp(&instance, tree).expect("assembled instances are well-shaped");
    solution_to_plan(&solution, tree, family, mode)
}

/// The equal `n×n` grid over the frame in normalized coordinates.
pub fn uniform_grid(n: u32) -> Vec<BBox> {
    assert!(n >= 1);
    let nf = f64::from(n);
    let mut tiles = Vec::with_capacity((n * n) as usize);
    for row in 0..n {
        for col in 0..n {
            tiles.push(BBox::new(
                f64::from(col) / nf,
                f64::from(row) / nf,
                f64::from(col + 1) / nf,
                f64::from(row + 1) / nf,
            ));
        }
    }
    tiles
}

/// Builds the uniform plan for one model regardless of budget: the equal
/// grid sized by `ceil(frame_side / input_side)`, every tile running that
/// model. A 1×1 grid is the model's down-sampling plan.
pub fn uniform_plan_for_model(
    family: &ModelFamily,
    model_idx: usize,
    local_objects: &[BBox],
    frame_side_px: u32,
    mode: Mode,
    binning: &SizeBinning,
) -> TilePlan {
    let profile = &family.models[model_idx];
    let n = frame_side_px.div_ceil(profile.input_side_px.max(1)).max(1);
    let grid = uniform_grid(n);
    let tiles_for_est: Vec<(BBox, &ModelProfile)> = grid.iter().map(|r| (*r, profile)).collect();
    let estimated_accuracy = plan_estimated_accuracy(&tiles_for_est, local_objects, binning)
        .expect("grid tiles are disjoint");
    TilePlan {
        tiles: grid
            .into_iter()
            .map(|region| PlanTile { region, model: profile.name.clone() })
            .collect(),
        estimated_accuracy,
        estimated_latency_ms: f64::from(n * n) * profile.latency_ms(mode),
        source: if n == 1 {
            PlanSource::Downsample(profile.name.clone())
        } else {
            PlanSource::Uniform(profile.name.clone())
        },
    }
}

/// One uniform plan per model, excluding those whose estimated latency
/// exceeds the budget.
pub fn uniform_plans(
    family: &ModelFamily,
    local_objects: &[BBox],
    frame_side_px: u32,
    budget_ms: f64,
    mode: Mode,
    binning: &SizeBinning,
) -> Vec<TilePlan> {
    (0..family.models.len())
        .map(|i| uniform_plan_for_model(family, i, local_objects, frame_side_px, mode, binning))
        .filter(|p| p.estimated_latency_ms <= budget_ms)
        .collect()
}

/// The single-tile whole-frame plan for one model (the down-sampling plan).
pub fn downsample_plan(
    family: &ModelFamily,
    model_idx: usize,
    local_objects: &[BBox],
    mode: Mode,
    binning: &SizeBinning,
) -> TilePlan {
    let profile = &family.models[model_idx];
    let region = BBox::unit();
    let estimated_accuracy = plan_estimated_accuracy(&[(region, profile)], local_objects, binning)
        .expect("single tile cannot overlap");
    TilePlan {
        tiles: vec![PlanTile { region, model: profile.name.clone() }],
        estimated_accuracy,
        estimated_latency_ms: profile.latency_ms(mode),
        source: PlanSource::Downsample(profile.name.clone()),
    }
}

/// Picks the most accurate candidate; ties break to the lower latency
/// estimate, then to the adaptive plan (candidates are compared in the order
/// adaptive, then uniforms, with strict improvement required to displace).
/// With no candidates at all, returns the empty plan — callers fall back to
/// the cheapest down-sampling plan.
pub fn elect(adaptive: Option<TilePlan>, uniforms: Vec<TilePlan>) -> TilePlan {
    let mut best: Option<TilePlan> = adaptive;
    for candidate in uniforms {
        best = Some(match best {
            None => candidate,
            Some(cur) => {
                let wins = candidate.estimated_accuracy > cur.estimated_accuracy
                    || (candidate.estimated_accuracy == cur.estimated_accuracy
                        && candidate.estimated_latency_ms < cur.estimated_latency_ms);
                if wins {
                    candidate
                } else {
                    cur
                }
            }
        });
    }
    best.unwrap_or_else(TilePlan::empty)
}
