use classinv::arith::PrimeField;
use classinv::modfunc::{func_series_fp, j_series_fp, FuncId, FpSeries};

fn nullity(f: PrimeField, a: &FpSeries, b: &FpSeries, da: u32, db: u32, rows_extra: i64) -> (usize, usize, Vec<((u32,u32), u64)>) {
    let mut monos = vec![];
    for i in 0..=da { for k in 0..=db { monos.push((i,k)); } }
    let lo = da as i64 * a.val() + db as i64 * b.val();
    let cap = lo + monos.len() as i64 + rows_extra;
    let mut apow = vec![FpSeries::zero_window(f, 0, cap)];
    apow[0].coeffs_mut()[0] = 1;
    for i in 1..=da as usize { let n = apow[i-1].mul_capped(a, Some(cap)); apow.push(n); }
    let mut bpow = vec![FpSeries::zero_window(f, 0, cap)];
    bpow[0].coeffs_mut()[0] = 1;
    for k in 1..=db as usize { let n = bpow[k-1].mul_capped(b, Some(cap)); bpow.push(n); }
    let mut row_top = cap;
    let series: Vec<FpSeries> = monos.iter().map(|&(i,k)| {
        let s = apow[i as usize].mul_capped(&bpow[k as usize], Some(cap));
        s
    }).collect();
    for s in &series { row_top = row_top.min(s.top()); }
    let nrows = (row_top - lo) as usize;
    let ncols = monos.len();
    let mut mat = vec![0u64; nrows * ncols];
    for (c, s) in series.iter().enumerate() {
        for r in 0..nrows {
            let e = lo + r as i64;
            mat[r*ncols+c] = if e >= s.val() && e < s.top() { s.coeff(e) } else { 0 };
        }
    }
    let mut pivot_cols = vec![];
    let mut pr = 0;
    for col in 0..ncols {
        let mut sel = None;
        for r in pr..nrows { if mat[r*ncols+col] != 0 { sel = Some(r); break; } }
        let Some(sel) = sel else { continue };
        for cc in 0..ncols { mat.swap(sel*ncols+cc, pr*ncols+cc); }
        let inv = f.inv(mat[pr*ncols+col]);
        for cc in 0..ncols { mat[pr*ncols+cc] = f.mul(mat[pr*ncols+cc], inv); }
        for r in 0..nrows { if r != pr && mat[r*ncols+col] != 0 {
            let fac = mat[r*ncols+col];
            for cc in 0..ncols { let s = f.mul(fac, mat[pr*ncols+cc]); mat[r*ncols+cc] = f.sub(mat[r*ncols+cc], s); }
        }}
        pivot_cols.push(col); pr += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut vecout = vec![];
    if let Some(&fc) = free.first() {
        let mut v = vec![0u64; ncols];
        v[fc] = 1;
        for (pi, &pc) in pivot_cols.iter().enumerate() { v[pc] = f.neg(mat[pi*ncols+fc]); }
        for (c, &(i,k)) in monos.iter().enumerate() { if v[c] != 0 { vecout.push(((i,k), v[c])); } }
    }
    (pr, ncols - pr, vecout)
}

fn main() {
    let p = (1u64 << 45) + 59;
    let f = PrimeField::new(p).unwrap();
    // sanity: gamma2^3 == j(w^3)
    let g = func_series_fp(FuncId::Gamma2, f, 40);
    let g3 = g.mul_capped(&g, None).mul_capped(&g, None);
    let j3 = j_series_fp(f, 16).scale_exponents(3);
    let diff = g3.sub(&j3);
    println!("gamma2^3 - j(w^3) zero: {}", diff.is_zero());

    for ell in [2i64, 5, 7] {
        let top = 2000;
        let a = func_series_fp(FuncId::Gamma2, f, top);
        let b = func_series_fp(FuncId::Gamma2, f, top / ell + 2).scale_exponents(ell);
        for d in [(ell+1) as u32, (ell+1) as u32 * 2, (ell+1) as u32 * 3] {
            let (rank, nullity, v) = nullity(f, &a, &b, d, d, 40);
            println!("ell={} deg=({},{}): rank {} nullity {} kernel-support {:?}", ell, d, d, rank, nullity, v.iter().map(|x| x.0).take(8).collect::<Vec<_>>());
            if nullity > 0 { break; }
        }
    }
}
