//! Induced-sorting suffix array construction (SA-IS).
//!
//! Works on any unsigned symbol type and orders suffixes by plain
//! lexicographic comparison (a proper prefix sorts first), so the input does
//! not need a unique terminator.

use super::Symbol;

const EMPTY: usize = usize::MAX;
const NAIVE_THRESHOLD: usize = 16;

/// Suffix array of `s`, whose symbols all lie in `0..=upper`.
pub(crate) fn sa_is<S: Symbol>(s: &[S], upper: usize) -> Vec<usize> {
    let n = s.len();
    match n {
        0 => return Vec::new(),
        1 => return vec![0],
        2 => return if s[0] < s[1] { vec![0, 1] } else { vec![1, 0] },
        _ => {}
    }
    if n < NAIVE_THRESHOLD {
        let mut sa: Vec<usize> = (0..n).collect();
        sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        return sa;
    }

    // ls[i]: suffix i is S-type. The last suffix is L-type because the
    // virtual terminator past the end is smaller than every symbol.
    let mut ls = vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if s[i] == s[i + 1] {
            ls[i + 1]
        } else {
            s[i] < s[i + 1]
        };
    }

    let mut sum_l = vec![0usize; upper + 1];
    let mut sum_s = vec![0usize; upper + 1];
    for i in 0..n {
        let c: usize = s[i].as_();
        if ls[i] {
            sum_l[c + 1] += 1;
        } else {
            sum_s[c] += 1;
        }
    }
    for i in 0..=upper {
        sum_s[i] += sum_l[i];
        if i < upper {
            sum_l[i + 1] += sum_s[i];
        }
    }

    let mut sa = vec![EMPTY; n];

    let mut lms_map = vec![EMPTY; n + 1];
    let mut lms = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms_map[i] = lms.len();
            lms.push(i);
        }
    }
    let m = lms.len();

    induce(s, &ls, &sum_s, &sum_l, &lms, &mut sa);

    if m > 0 {
        let mut sorted_lms: Vec<usize> = sa
            .iter()
            .copied()
            .filter(|&v| v != EMPTY && lms_map[v] != EMPTY)
            .collect();
        let mut rec_s = vec![0usize; m];
        let mut rec_upper = 0usize;
        rec_s[lms_map[sorted_lms[0]]] = 0;
        for i in 1..m {
            let (mut l, mut r) = (sorted_lms[i - 1], sorted_lms[i]);
            let end_l = if lms_map[l] + 1 < m {
                lms[lms_map[l] + 1]
            } else {
                n
            };
            let end_r = if lms_map[r] + 1 < m {
                lms[lms_map[r] + 1]
            } else {
                n
            };
            let mut same = true;
            if end_l - l != end_r - r {
                same = false;
            } else {
                while l < end_l {
                    if s[l] != s[r] {
                        break;
                    }
                    l += 1;
                    r += 1;
                }
                if l == n || r == n || s[l] != s[r] {
                    same = false;
                }
            }
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i]]] = rec_upper;
        }
        drop(lms_map);

        let rec_sa = sa_is(&rec_s, rec_upper);
        drop(rec_s);
        for (slot, &r) in sorted_lms.iter_mut().zip(&rec_sa) {
            *slot = lms[r];
        }
        induce(s, &ls, &sum_s, &sum_l, &sorted_lms, &mut sa);
    }
    sa
}

fn induce<S: Symbol>(
    s: &[S],
    ls: &[bool],
    sum_s: &[usize],
    sum_l: &[usize],
    lms: &[usize],
    sa: &mut [usize],
) {
    let n = s.len();
    sa.fill(EMPTY);
    let mut buf = sum_s.to_vec();
    for &d in lms {
        if d == n {
            continue;
        }
        let c: usize = s[d].as_();
        sa[buf[c]] = d;
        buf[c] += 1;
    }
    buf.copy_from_slice(sum_l);
    let c: usize = s[n - 1].as_();
    sa[buf[c]] = n - 1;
    buf[c] += 1;
    for i in 0..n {
        let v = sa[i];
        if v != EMPTY && v >= 1 && !ls[v - 1] {
            let c: usize = s[v - 1].as_();
            sa[buf[c]] = v - 1;
            buf[c] += 1;
        }
    }
    buf.copy_from_slice(sum_l);
    for i in (0..n).rev() {
        let v = sa[i];
        if v != EMPTY && v >= 1 && ls[v - 1] {
            let c: usize = s[v - 1].as_();
            buf[c + 1] -= 1;
            sa[buf[c + 1]] = v - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute<T: Ord>(s: &[T]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..s.len()).collect();
        sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        sa
    }

    #[test]
    fn small_strings() {
        for s in [
            &b"abracadabra"[..],
            b"mississippi",
            b"aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa",
            b"abababababababababababababababab",
            b"ba",
            b"a",
            b"",
            b"zyxwvutsrqponmlkjihgfedcba",
        ] {
            assert_eq!(sa_is(s, 255), brute(s), "{:?}", String::from_utf8_lossy(s));
        }
    }

    #[test]
    fn embedded_zero_bytes() {
        let s = b"ab\0\0ab\x01ab\0\0ab\x01\0";
        assert_eq!(sa_is(s, 255), brute(s));
    }

    #[test]
    fn wide_symbols() {
        let s: Vec<u32> = (0..500u32)
            .map(|i| (i * 7919) % 13 + (i % 3) * 100)
            .collect();
        let upper = *s.iter().max().unwrap() as usize;
        assert_eq!(sa_is(&s, upper), brute(&s));
    }
}
