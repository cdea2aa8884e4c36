//! Binary-tree traversals. The trajectory is the visited-node prefix after
//! each visit.

use std::collections::VecDeque;

use super::{bad_data, start_node, ZooError};
use crate::types::{InstanceData, ProblemInstance, Solution, StartPoint};

type Children = [[Option<u32>; 2]];

pub(super) fn run(
    inst: &ProblemInstance,
    start: &StartPoint,
    order: fn(&Children, usize) -> Vec<u32>,
) -> Result<Vec<Solution>, ZooError> {
    let InstanceData::Tree { children } = &inst.data else {
        return Err(bad_data(inst));
    };
    let s = start_node(inst, start, children.len())?;
    let visits = order(children, s);
    Ok(super::tsp::prefixes(&visits))
}

fn kids(c: &Children, v: usize, right_first: bool) -> impl Iterator<Item = u32> {
    let [l, r] = c[v];
    let pair = if right_first { [r, l] } else { [l, r] };
    pair.into_iter().flatten()
}

fn bfs(c: &Children, s: usize, right_first: bool) -> Vec<u32> {
    let mut out = Vec::new();
    let mut q = VecDeque::from([s as u32]);
    while let Some(v) = q.pop_front() {
        out.push(v);
        q.extend(kids(c, v as usize, right_first));
    }
    out
}

fn dfs(c: &Children, v: usize, right_first: bool, out: &mut Vec<u32>) {
    out.push(v as u32);
    for k in kids(c, v, right_first) {
        dfs(c, k as usize, right_first, out);
    }
}

pub(super) fn bfs_left(c: &Children, s: usize) -> Vec<u32> {
    bfs(c, s, false)
}

pub(super) fn bfs_right(c: &Children, s: usize) -> Vec<u32> {
    bfs(c, s, true)
}

pub(super) fn dfs_left(c: &Children, s: usize) -> Vec<u32> {
    let mut out = Vec::new();
    dfs(c, s, false, &mut out);
    out
}

pub(super) fn dfs_right(c: &Children, s: usize) -> Vec<u32> {
    let mut out = Vec::new();
    dfs(c, s, true, &mut out);
    out
}

/// Level by level: visit the current frontier, recurse on the next one.
pub(super) fn bfs_recursive(c: &Children, s: usize) -> Vec<u32> {
    fn level(c: &Children, frontier: Vec<u32>, out: &mut Vec<u32>) {
        if frontier.is_empty() {
            return;
        }
        let mut next = Vec::new();
        for v in frontier {
            out.push(v);
            next.extend(kids(c, v as usize, false));
        }
        level(c, next, out);
    }
    let mut out = Vec::new();
    level(c, vec![s as u32], &mut out);
    out
}

/// Array-backed queue with a read cursor.
pub(super) fn bfs_iterative(c: &Children, s: usize) -> Vec<u32> {
    let mut queue = vec![s as u32];
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head] as usize;
        head += 1;
        if let Some(l) = c[v][0] {
            queue.push(l);
        }
        if let Some(r) = c[v][1] {
            queue.push(r);
        }
    }
    queue
}

pub(super) fn dfs_recursive(c: &Children, s: usize) -> Vec<u32> {
    dfs_left(c, s)
}

/// Explicit stack; the right child is pushed first so the left pops first.
pub(super) fn dfs_iterative(c: &Children, s: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut stack = vec![s as u32];
    while let Some(v) = stack.pop() {
        out.push(v);
        let [l, r] = c[v as usize];
        stack.extend(r);
        stack.extend(l);
    }
    out
}

pub(super) const BFS_LEFT: &str = r#"
def bfs(root):
    visited = []
    queue = deque([root])
    while queue:
        node = queue.popleft()
        visited.append(node.id)
        if node.left:
            queue.append(node.left)
        if node.right:
            queue.append(node.right)
    return visited
"#;

pub(super) const BFS_RIGHT: &str = r#"
def bfs(root):
    visited = []
    queue = deque([root])
    while queue:
        node = queue.popleft()
        visited.append(node.id)
        if node.right:
            queue.append(node.right)
        if node.left:
            queue.append(node.left)
    return visited
"#;

pub(super) const DFS_LEFT: &str = r#"
def dfs(node, visited):
    if node is None:
        return visited
    visited.append(node.id)
    dfs(node.left, visited)
    dfs(node.right, visited)
    return visited
"#;

pub(super) const DFS_RIGHT: &str = r#"
def dfs(node, visited):
    if node is None:
        return visited
    visited.append(node.id)
    dfs(node.right, visited)
    dfs(node.left, visited)
    return visited
"#;

pub(super) const BFS_REC: &str = r#"
def bfs_recursive(level_nodes, order):
    if not level_nodes:
        return order
    upcoming = []
    for current in level_nodes:
        order.append(current.id)
        upcoming += [child for child in (current.left, current.right) if child]
    return bfs_recursive(upcoming, order)
"#;

pub(super) const BFS_ITER: &str = r#"
def bfs_iterative(root):
    pending = [root]
    head = 0
    while head < len(pending):
        item = pending[head]
        head += 1
        if item.left is not None:
            pending.append(item.left)
        if item.right is not None:
            pending.append(item.right)
    return [item.id for item in pending]
"#;

pub(super) const DFS_REC: &str = r#"
def dfs_recursive(node, seen):
    if node:
        seen.append(node.id)
        dfs_recursive(node.left, seen)
        dfs_recursive(node.right, seen)
    return seen
"#;

pub(super) const DFS_ITER: &str = r#"
def dfs_iterative(root):
    result, stack = [], [root]
    while stack:
        top = stack.pop()
        result.append(top.id)
        if top.right is not None:
            stack.append(top.right)
        if top.left is not None:
            stack.append(top.left)
    return result
"#;
