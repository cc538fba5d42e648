#![allow(dead_code)]

use ctxhist::{CMatrix, Context, Frame};

/// All set partitions of `0..n`, blocks in order of their smallest element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(current.clone());
            return;
        }
        for k in 0..current.len() {
            current[k].push(i);
            rec(i + 1, n, current, out);
            current[k].pop();
        }
        current.push(vec![i]);
        rec(i + 1, n, current, out);
        current.pop();
    }
    rec(0, n, &mut current, &mut out);
    out
}

fn projector(frame: &Frame, indices: &[usize]) -> CMatrix {
    let n = frame.dim();
    let mut p = CMatrix::zeros(n);
    for &i in indices {
        p = p.add(&CMatrix::outer(frame.vector(i), frame.vector(i)));
    }
    p
}

/// Finest partition pair by enumerating every partition of the source indices and
/// every subset of the target indices, keeping the valid pairing with most blocks.
pub type Blocks = Vec<Vec<usize>>;

pub fn brute_force_partitions(a: &Context, b: &Context) -> Option<(Blocks, Blocks)> {
    let n = a.dim();
    let subsets: Vec<(Vec<usize>, CMatrix)> = (1u32..(1 << n))
        .map(|mask| {
            let s: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            let p = projector(b.frame(), &s);
            (s, p)
        })
        .collect();
    let mut best: Option<(Blocks, Blocks)> = None;
    for partition in set_partitions(n) {
        let mut targets = Vec::new();
        let mut ok = true;
        for block in &partition {
            let p = projector(a.frame(), block);
            match subsets.iter().find(|(s, q)| s.len() == block.len() && p.max_abs_diff(q) < 1e-7) {
                Some((s, _)) => targets.push(s.clone()),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && best.as_ref().is_none_or(|(i, _)| partition.len() > i.len()) {
            best = Some((partition, targets));
        }
    }
    best
}
