//! Small permutation helpers shared by the graph and coefficient code.
//!
//! Permutations are stored in one-line notation on `0..n`: `p[i]` is the image of `i`.

/// Sign of a permutation given in one-line notation.
pub fn sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut s = 1;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            s = -s;
        }
    }
    s
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        q[pi] = i;
    }
    q
}

/// `(a ∘ b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

/// Koszul sign of reordering a list of graded tokens.
///
/// `order[k]` is the index (into `odd`) of the token placed at position `k`;
/// only pairs of odd tokens that get swapped contribute.
pub fn koszul_sign(order: &[usize], odd: &[bool]) -> i32 {
    let mut s = 1;
    for i in 0..order.len() {
        if !odd[order[i]] {
            continue;
        }
        for j in (i + 1)..order.len() {
            if odd[order[j]] && order[j] < order[i] {
                s = -s;
            }
        }
    }
    s
}

/// Adjacent transpositions `j` (0-based, swapping `j` and `j+1`) whose product,
/// applied right to left in the returned order, equals `p`.
///
/// That is, `p = s_{w[0]} ∘ s_{w[1]} ∘ … ∘ s_{w[k-1]}`.
pub fn reduced_word(p: &[usize]) -> Vec<usize> {
    let mut q = p.to_vec();
    let mut word = Vec::new();
    // bubble sort q; each swap of positions j, j+1 replaces q by q ∘ s_j
    let n = q.len();
    loop {
        let mut swapped = false;
        for j in 0..n.saturating_sub(1) {
            if q[j] > q[j + 1] {
                q.swap(j, j + 1);
                word.push(j);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    // p ∘ s_{j1} ∘ … ∘ s_{jk} = id, so p = s_{jk} ∘ … ∘ s_{j1}
    word.reverse();
    word
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
