use super::sparse::SparseEliminator;

/// Rank of a sparse GF(2) matrix, ignoring any column order.
///
/// Singleton rows and singleton columns are peeled off first, each adding one
/// to the rank; the remaining core goes through bucket elimination. Entries
/// repeated within a row cancel.
pub fn sparse_rank(ncols: usize, rows: Vec<Vec<u32>>) -> usize {
    let rows: Vec<Vec<u32>> = rows.into_iter().map(normalize).filter(|r| !r.is_empty()).collect();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &c in r {
            assert!((c as usize) < ncols, "column {c} out of range");
            col_rows[c as usize].push(i as u32);
        }
    }
    let mut row_cnt: Vec<u32> = rows.iter().map(|r| r.len() as u32).collect();
    let mut col_cnt: Vec<u32> = col_rows.iter().map(|v| v.len() as u32).collect();
    let mut row_alive: Vec<bool> = vec![true; rows.len()];
    let mut col_alive: Vec<bool> = col_cnt.iter().map(|&n| n > 0).collect();
    let mut row_queue: Vec<u32> = (0..rows.len() as u32).filter(|&i| row_cnt[i as usize] == 1).collect();
    let mut col_queue: Vec<u32> = (0..ncols as u32).filter(|&c| col_cnt[c as usize] == 1).collect();
    let mut rank = 0;

    loop {
        if let Some(c) = col_queue.pop() {
            let c = c as usize;
            if !col_alive[c] || col_cnt[c] != 1 {
                continue;
            }
            let i = col_rows[c].iter().map(|&i| i as usize).find(|&i| row_alive[i]).expect("one live row");
            rank += 1;
            col_alive[c] = false;
            row_alive[i] = false;
            for &c2 in &rows[i] {
                let c2 = c2 as usize;
                if col_alive[c2] {
                    col_cnt[c2] -= 1;
                    match col_cnt[c2] {
                        0 => col_alive[c2] = false,
                        1 => col_queue.push(c2 as u32),
                        _ => {}
                    }
                }
            }
        } else if let Some(i) = row_queue.pop() {
            let i = i as usize;
            if !row_alive[i] || row_cnt[i] != 1 {
                continue;
            }
            let c = rows[i].iter().map(|&c| c as usize).find(|&c| col_alive[c]).expect("one live column");
            rank += 1;
            col_alive[c] = false;
            row_alive[i] = false;
            for &j in &col_rows[c] {
                let j = j as usize;
                if row_alive[j] {
                    row_cnt[j] -= 1;
                    match row_cnt[j] {
                        0 => row_alive[j] = false,
                        1 => row_queue.push(j as u32),
                        _ => {}
                    }
                }
            }
        } else {
            break;
        }
    }

    let mut renumber = vec![u32::MAX; ncols];
    let mut core_cols = 0u32;
    for c in 0..ncols {
        if col_alive[c] {
            renumber[c] = core_cols;
            core_cols += 1;
        }
    }
    let mut core = SparseEliminator::new(core_cols as usize);
    for (i, r) in rows.iter().enumerate() {
        if row_alive[i] {
            core.push(r.iter().filter(|&&c| col_alive[c as usize]).map(|&c| renumber[c as usize]).collect());
        }
    }
    log::debug!("rank filter peeled {rank}, core {} x {core_cols}", core.pushed());
    rank + core.finish().rank()
}

fn normalize(mut r: Vec<u32>) -> Vec<u32> {
    r.sort_unstable();
    let mut out: Vec<u32> = Vec::with_capacity(r.len());
    for c in r {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}
