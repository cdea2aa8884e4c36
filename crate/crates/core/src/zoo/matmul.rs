//! Naive matrix multiplication. The trajectory is the flattened output
//! matrix, starting from zeros, after each completed cell.

use super::{bad_data, ZooError};
use crate::types::{InstanceData, ProblemInstance, Solution};

pub(super) fn run(inst: &ProblemInstance, column_major: bool) -> Result<Vec<Solution>, ZooError> {
    let InstanceData::MatMul { a, b } = &inst.data else {
        return Err(bad_data(inst));
    };
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != k) || b.iter().any(|r| r.len() != m) {
        return Err(ZooError::BadInstance(format!("{}: incompatible shapes", inst.id)));
    }
    let mut c = vec![0.0; n * m];
    let mut steps = vec![c.clone()];
    let mut cell = |i: usize, j: usize, c: &mut Vec<f64>| {
        let mut s = 0.0;
        for t in 0..k {
            s += a[i][t] * b[t][j];
        }
        c[i * m + j] = s;
        steps.push(c.clone());
    };
    if column_major {
        for j in 0..m {
            for i in 0..n {
                cell(i, j, &mut c);
            }
        }
    } else {
        for i in 0..n {
            for j in 0..m {
                cell(i, j, &mut c);
            }
        }
    }
    steps
        .into_iter()
        .map(|v| Solution::real(v).map_err(|e| ZooError::BadInstance(e.to_string())))
        .collect()
}

/// Frobenius norm of `a * b`, the natural distance scale for these trajectories.
pub fn product_norm(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let m = b.first().map_or(0, Vec::len);
    let mut s = 0.0;
    for row in a {
        for j in 0..m {
            let v: f64 = row.iter().zip(b).map(|(x, br)| x * br[j]).sum();
            s += v * v;
        }
    }
    s.sqrt()
}

pub(super) const IJK: &str = r#"
def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    C = [[0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            for t in range(k):
                C[i][j] += A[i][t] * B[t][j]
    return C
"#;

pub(super) const JIK: &str = r#"
def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    C = [[0] * m for _ in range(n)]
    for j in range(m):
        for i in range(n):
            for t in range(k):
                C[i][j] += A[i][t] * B[t][j]
    return C
"#;
