/// Call `f` on every subset of `0..n` with at most `max` elements, in order of
/// size and then lexicographically. Stops early when `f` returns `false`.
pub(crate) fn for_each_subset_up_to<F: FnMut(&[usize]) -> bool>(n: usize, max: usize, mut f: F) {
    let mut buf = Vec::with_capacity(max);
    for size in 0..=max.min(n) {
        if !combos(n, size, 0, &mut buf, &mut f) {
            return;
        }
    }
}

fn combos<F: FnMut(&[usize]) -> bool>(n: usize, size: usize, start: usize, buf: &mut Vec<usize>, f: &mut F) -> bool {
    if buf.len() == size {
        return f(buf);
    }
    for i in start..n {
        if n - i < size - buf.len() {
            break;
        }
        buf.push(i);
        let go_on = combos(n, size, i + 1, buf, f);
        buf.pop();
        if !go_on {
            return false;
        }
    }
    true
}
