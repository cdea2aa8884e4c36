//! Comparison sorts. A snapshot of the whole array is recorded initially and
//! after every mutation that changes it (swap, shift, merged-run write-back).

use super::{bad_data, ZooError};
use crate::types::{InstanceData, ProblemInstance, Solution};

pub(super) struct Recorder {
    steps: Vec<Vec<u32>>,
}

impl Recorder {
    fn new(a: &[u32]) -> Self {
        Recorder { steps: vec![a.to_vec()] }
    }

    fn snap(&mut self, a: &[u32]) {
        if self.steps.last().is_some_and(|l| l.as_slice() != a) {
            self.steps.push(a.to_vec());
        }
    }
}

pub(super) fn run(inst: &ProblemInstance, sort: fn(&mut [u32], &mut Recorder)) -> Result<Vec<Solution>, ZooError> {
    let InstanceData::Sort { values } = &inst.data else {
        return Err(bad_data(inst));
    };
    let mut a = values.clone();
    let mut rec = Recorder::new(&a);
    sort(&mut a, &mut rec);
    rec.steps
        .into_iter()
        .map(|s| Solution::perm(s).map_err(|e| ZooError::BadInstance(e.to_string())))
        .collect()
}

fn swap(a: &mut [u32], i: usize, j: usize, rec: &mut Recorder) {
    a.swap(i, j);
    rec.snap(a);
}

pub(super) fn bubble(a: &mut [u32], rec: &mut Recorder) {
    let n = a.len();
    for i in 0..n {
        for j in 0..n.saturating_sub(i + 1) {
            if a[j] > a[j + 1] {
                swap(a, j, j + 1, rec);
            }
        }
    }
}

pub(super) fn bubble_recursive(a: &mut [u32], rec: &mut Recorder) {
    fn pass(a: &mut [u32], n: usize, rec: &mut Recorder) {
        if n <= 1 {
            return;
        }
        for j in 0..n - 1 {
            if a[j] > a[j + 1] {
                swap(a, j, j + 1, rec);
            }
        }
        pass(a, n - 1, rec);
    }
    let n = a.len();
    pass(a, n, rec);
}

pub(super) fn insertion(a: &mut [u32], rec: &mut Recorder) {
    for i in 1..a.len() {
        let mut j = i;
        while j > 0 && a[j - 1] > a[j] {
            swap(a, j - 1, j, rec);
            j -= 1;
        }
    }
}

pub(super) fn insertion_recursive(a: &mut [u32], rec: &mut Recorder) {
    fn go(a: &mut [u32], n: usize, rec: &mut Recorder) {
        if n <= 1 {
            return;
        }
        go(a, n - 1, rec);
        let mut j = n - 1;
        while j > 0 && a[j - 1] > a[j] {
            swap(a, j - 1, j, rec);
            j -= 1;
        }
    }
    let n = a.len();
    go(a, n, rec);
}

pub(super) fn selection(a: &mut [u32], rec: &mut Recorder) {
    let n = a.len();
    for i in 0..n {
        let mut m = i;
        for j in i + 1..n {
            if a[j] < a[m] {
                m = j;
            }
        }
        if m != i {
            swap(a, i, m, rec);
        }
    }
}

fn merge(a: &mut [u32], lo: usize, mid: usize, hi: usize, rec: &mut Recorder) {
    let mut merged = Vec::with_capacity(hi - lo);
    let (mut i, mut j) = (lo, mid);
    while i < mid && j < hi {
        if a[i] <= a[j] {
            merged.push(a[i]);
            i += 1;
        } else {
            merged.push(a[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a[i..mid]);
    merged.extend_from_slice(&a[j..hi]);
    a[lo..hi].copy_from_slice(&merged);
    rec.snap(a);
}

pub(super) fn merge_recursive(a: &mut [u32], rec: &mut Recorder) {
    fn sort(a: &mut [u32], lo: usize, hi: usize, rec: &mut Recorder) {
        if hi - lo <= 1 {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        sort(a, lo, mid, rec);
        sort(a, mid, hi, rec);
        merge(a, lo, mid, hi, rec);
    }
    let n = a.len();
    sort(a, 0, n, rec);
}

/// Same split points and merge order as the recursive version, driven by an
/// explicit stack.
pub(super) fn merge_iterative(a: &mut [u32], rec: &mut Recorder) {
    let mut stack = vec![(0usize, a.len(), false)];
    while let Some((lo, hi, children_done)) = stack.pop() {
        if hi - lo <= 1 {
            continue;
        }
        let mid = lo + (hi - lo) / 2;
        if children_done {
            merge(a, lo, mid, hi, rec);
        } else {
            stack.push((lo, hi, true));
            stack.push((mid, hi, false));
            stack.push((lo, mid, false));
        }
    }
}

pub(super) fn quick(a: &mut [u32], rec: &mut Recorder) {
    fn sort(a: &mut [u32], lo: isize, hi: isize, rec: &mut Recorder) {
        if lo >= hi {
            return;
        }
        let pivot = a[hi as usize];
        let mut i = lo;
        for j in lo..hi {
            if a[j as usize] < pivot {
                swap(a, i as usize, j as usize, rec);
                i += 1;
            }
        }
        swap(a, i as usize, hi as usize, rec);
        sort(a, lo, i - 1, rec);
        sort(a, i + 1, hi, rec);
    }
    let n = a.len() as isize;
    sort(a, 0, n - 1, rec);
}

pub(super) fn heap(a: &mut [u32], rec: &mut Recorder) {
    fn sift(a: &mut [u32], mut root: usize, end: usize, rec: &mut Recorder) {
        loop {
            let l = 2 * root + 1;
            if l >= end {
                return;
            }
            let mut big = l;
            if l + 1 < end && a[l + 1] > a[l] {
                big = l + 1;
            }
            if a[root] >= a[big] {
                return;
            }
            swap(a, root, big, rec);
            root = big;
        }
    }
    let n = a.len();
    for i in (0..n / 2).rev() {
        sift(a, i, n, rec);
    }
    for end in (1..n).rev() {
        swap(a, 0, end, rec);
        sift(a, 0, end, rec);
    }
}

pub(super) const BUBBLE: &str = r#"
def bubble_sort(arr):
    n = len(arr)
    for i in range(n):
        for j in range(0, n - i - 1):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
    return arr
"#;

pub(super) const BUBBLE_REC: &str = r#"
def bubble_sort_recursive(arr, n=None):
    if n is None:
        n = len(arr)
    if n == 1:
        return arr
    count = 0
    for k in range(n - 1):
        if arr[k] > arr[k + 1]:
            tmp = arr[k]
            arr[k] = arr[k + 1]
            arr[k + 1] = tmp
            count += 1
    return bubble_sort_recursive(arr, n - 1)
"#;

pub(super) const INSERTION: &str = r#"
def insertion_sort(arr):
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            j -= 1
    return arr
"#;

pub(super) const INSERTION_REC: &str = r#"
def insertion_sort_recursive(seq, size):
    if size <= 1:
        return
    insertion_sort_recursive(seq, size - 1)
    pos = size - 1
    while pos > 0 and seq[pos - 1] > seq[pos]:
        seq[pos], seq[pos - 1] = seq[pos - 1], seq[pos]
        pos = pos - 1
"#;

pub(super) const SELECTION: &str = r#"
def selection_sort(arr):
    n = len(arr)
    for i in range(n):
        min_idx = i
        for j in range(i + 1, n):
            if arr[j] < arr[min_idx]:
                min_idx = j
        if min_idx != i:
            arr[i], arr[min_idx] = arr[min_idx], arr[i]
    return arr
"#;

pub(super) const MERGE: &str = r#"
def merge_sort(arr, lo, hi):
    if hi - lo <= 1:
        return
    mid = (lo + hi) // 2
    merge_sort(arr, lo, mid)
    merge_sort(arr, mid, hi)
    left, right = arr[lo:mid], arr[mid:hi]
    i = j = 0
    out = []
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            out.append(left[i]); i += 1
        else:
            out.append(right[j]); j += 1
    arr[lo:hi] = out + left[i:] + right[j:]
"#;

pub(super) const MERGE_ITER: &str = r#"
def merge_sort_iterative(data):
    stack = [(0, len(data), False)]
    while stack:
        start, stop, ready = stack.pop()
        if stop - start < 2:
            continue
        middle = start + (stop - start) // 2
        if not ready:
            stack.extend([(start, stop, True), (middle, stop, False), (start, middle, False)])
            continue
        merged = sorted_merge(data[start:middle], data[middle:stop])
        data[start:stop] = merged
    return data
"#;

pub(super) const QUICK: &str = r#"
def quick_sort(arr, lo, hi):
    if lo >= hi:
        return
    pivot = arr[hi]
    i = lo
    for j in range(lo, hi):
        if arr[j] < pivot:
            arr[i], arr[j] = arr[j], arr[i]
            i += 1
    arr[i], arr[hi] = arr[hi], arr[i]
    quick_sort(arr, lo, i - 1)
    quick_sort(arr, i + 1, hi)
"#;

pub(super) const HEAP: &str = r#"
def heapify(arr, n, root):
    largest = root
    l = 2 * root + 1
    r = 2 * root + 2
    if l < n and arr[l] > arr[largest]:
        largest = l
    if r < n and arr[r] > arr[largest]:
        largest = r
    if largest != root:
        arr[root], arr[largest] = arr[largest], arr[root]
        heapify(arr, n, largest)

def heap_sort(arr):
    n = len(arr)
    for i in range(n // 2 - 1, -1, -1):
        heapify(arr, n, i)
    for end in range(n - 1, 0, -1):
        arr[end], arr[0] = arr[0], arr[end]
        heapify(arr, end, 0)
"#;
