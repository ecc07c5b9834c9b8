//! Diagnostics for the one-dimensional selection processes.
//!
//! Along the top row (and symmetrically the leftmost column) tile selection
//! is a Markov process over overlap states, so it can be modelled by a
//! finite automaton and inspected for *embedding traps*: closed strongly
//! connected state sets, reachable from some initial state, in which every
//! transition offers a single candidate and thus embeds nothing. An empty
//! trap list certifies that embedding cannot stall forever along that
//! axis. The two-dimensional interior process has no such finite model;
//! for it we only report empirical statistics.

use std::collections::BTreeMap;

use crate::bitgrid::BitMatrix;
use crate::collection::TileCollection;

/// Which one-dimensional selection process to model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Top-row process: states are producible right strips.
    Horizontal,
    /// Left-column process: states are producible bottom strips.
    Vertical,
}

/// One transition: selecting `tile` moves the process to `successor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub tile: u32,
    pub successor: u32,
}

/// Finite automaton of a one-dimensional selection process. States index
/// into `states`; `transitions[s]` lists the candidate selections from
/// state `s`, each embedding `bits[s]` payload bits.
#[derive(Debug, Clone)]
pub struct ContextAutomaton {
    pub axis: Axis,
    /// Overlap value of each state.
    pub states: Vec<BitMatrix>,
    /// States the first (unconstrained) selection can produce.
    pub initial: Vec<u32>,
    pub transitions: Vec<Vec<Transition>>,
    /// Bits embedded by any transition out of each state.
    pub bits: Vec<u32>,
}

impl ContextAutomaton {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }
}

/// Models the top-row (`Horizontal`) or leftmost-column (`Vertical`)
/// selection process of a collection.
pub fn build_row_automaton(coll: &TileCollection, axis: Axis) -> ContextAutomaton {
    // Producible interface ids, renumbered densely as states.
    let interface_ids: Vec<u32> = match axis {
        Axis::Horizontal => coll.producible_rights(),
        Axis::Vertical => coll.producible_bottoms(),
    };
    let state_of: BTreeMap<u32, u32> = interface_ids
        .iter()
        .enumerate()
        .map(|(s, &id)| (id, s as u32))
        .collect();
    let states: Vec<BitMatrix> = interface_ids
        .iter()
        .map(|&id| match axis {
            Axis::Horizontal => coll.overlaps().horizontal()[id as usize].clone(),
            Axis::Vertical => coll.overlaps().vertical()[id as usize].clone(),
        })
        .collect();

    let trailing = |tile: u32| match axis {
        Axis::Horizontal => coll.boundary_ids(tile).right,
        Axis::Vertical => coll.boundary_ids(tile).bottom,
    };

    let mut transitions = Vec::with_capacity(states.len());
    let mut bits = Vec::with_capacity(states.len());
    for &id in &interface_ids {
        let cands = match axis {
            Axis::Horizontal => coll.candidates_by_ids(Some(id), None),
            Axis::Vertical => coll.candidates_by_ids(None, Some(id)),
        };
        let outgoing: Vec<Transition> = cands
            .iter()
            .map(|&tile| Transition {
                tile,
                successor: state_of[&trailing(tile)],
            })
            .collect();
        bits.push(if cands.is_empty() {
            0
        } else {
            usize::BITS - 1 - cands.len().leading_zeros()
        });
        transitions.push(outgoing);
    }

    let mut initial: Vec<u32> = (0..coll.len() as u32)
        .map(|tile| state_of[&trailing(tile)])
        .collect();
    initial.sort_unstable();
    initial.dedup();

    ContextAutomaton {
        axis,
        states,
        initial,
        transitions,
        bits,
    }
}

/// Finds every embedding trap: a strongly connected, closed set of states,
/// reachable from an initial state, whose internal transitions all embed
/// zero bits. Returned sets are sorted; an empty list certifies that the
/// process cannot stall forever.
pub fn find_embedding_traps(a: &ContextAutomaton) -> Vec<Vec<u32>> {
    let n = a.state_count();

    // Zero-bit subgraph.
    let zero_edges: Vec<Vec<u32>> = (0..n)
        .map(|s| {
            if a.bits[s] == 0 {
                a.transitions[s]
                    .iter()
                    .filter(|t| a.bits[t.successor as usize] == 0)
                    .map(|t| t.successor)
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();

    // Reachability from the initial states over the full automaton.
    let mut reachable = vec![false; n];
    let mut stack: Vec<u32> = a.initial.clone();
    for &s in &stack {
        reachable[s as usize] = true;
    }
    while let Some(s) = stack.pop() {
        for t in &a.transitions[s as usize] {
            if !reachable[t.successor as usize] {
                reachable[t.successor as usize] = true;
                stack.push(t.successor);
            }
        }
    }

    let mut traps = Vec::new();
    for scc in tarjan_sccs(n, &zero_edges) {
        let nontrivial = scc.len() > 1 || zero_edges[scc[0] as usize].contains(&scc[0]);
        if !nontrivial {
            continue;
        }
        // Closed: every transition of every member stays inside.
        let inside = |s: u32| scc.binary_search(&s).is_ok();
        let closed = scc.iter().all(|&s| {
            a.transitions[s as usize]
                .iter()
                .all(|t| inside(t.successor))
        });
        if closed && scc.iter().any(|&s| reachable[s as usize]) {
            traps.push(scc);
        }
    }
    traps.sort();
    traps
}

/// Iterative Tarjan; returns each SCC as a sorted vector.
fn tarjan_sccs(n: usize, edges: &[Vec<u32>]) -> Vec<Vec<u32>> {
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut sccs = Vec::new();

    // (node, next edge offset)
    let mut call: Vec<(u32, usize)> = Vec::new();
    for root in 0..n as u32 {
        if index[root as usize] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            let vu = v as usize;
            if *ei == 0 {
                index[vu] = next_index;
                low[vu] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[vu] = true;
            }
            if let Some(&w) = edges[vu].get(*ei) {
                *ei += 1;
                let wu = w as usize;
                if index[wu] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[wu] {
                    low[vu] = low[vu].min(index[wu]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    let pu = parent as usize;
                    low[pu] = low[pu].min(low[vu]);
                }
                if low[vu] == index[vu] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    scc.sort_unstable();
                    sccs.push(scc);
                }
            }
        }
    }
    sccs
}

/// Histogram of candidate counts over the realized interior contexts.
pub fn choice_histogram(coll: &TileCollection) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for (hi, vi) in coll.realized_contexts() {
        let n = coll.candidates_by_ids(Some(hi), Some(vi)).len();
        *hist.entry(n).or_insert(0) += 1;
    }
    hist
}
