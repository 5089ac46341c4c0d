use mustrat::gb::Ideal;
use mustrat::matrix::{gradient_row, jacobian};
use mustrat::poly::MonomialOrder;
use mustrat::strat::examples;
use std::time::Instant;

fn main() {
    let s = examples::det2x3(MonomialOrder::GrevLex);
    let ring = &s.ring;
    // j = 2 slice of the (1,1) case: cut by f1 = x - v
    let f1 = ring.parse("x - v").unwrap();
    let sliced = {
        let t = Instant::now();
        let r = s.slice(&[f1.clone()]).unwrap();
        println!("slice: {:?}", t.elapsed());
        r
    };
    let v1 = sliced.stratum("V1").unwrap();
    println!("sliced V1 dim = {}", v1.dim);
    let f2 = ring.parse("w - y").unwrap();
    let l = ring.parse("3x - y + 2z + u - 4v + w").unwrap();
    let n = ring.nvars() as i64;
    let size = (n - v1.dim + 2) as usize;
    let t = Instant::now();
    let jac = jacobian(ring, v1.closure.gens());
    let stacked = jac.stack(&gradient_row(ring, &f2)).unwrap().stack(&gradient_row(ring, &l)).unwrap();
    let minors = stacked.minors(size).unwrap();
    println!("minors: {} of size {} in {:?}", minors.len(), size, t.elapsed());
    let raw = v1.closure.plus_polys(&minors.into_iter().filter(|m| !m.is_zero()).collect::<Vec<_>>());
    println!("raw gens: {}", raw.gens().len());
    let t = Instant::now();
    let gb = raw.groebner_basis().unwrap();
    println!("raw GB: {} elements in {:?}", gb.len(), t.elapsed());
    let t = Instant::now();
    let sing = sliced.singular_locus_ideal("V1").unwrap();
    println!("sing gens: {} ({:?})", sing.gens().len(), t.elapsed());
    let t = Instant::now();
    let sing_gb = sing.groebner_basis().unwrap();
    println!("sing GB: {} in {:?}", sing_gb.len(), t.elapsed());
    let t = Instant::now();
    let q = mustrat::gb::ideal_quotient(&Ideal::new(ring, gb.clone()), &Ideal::new(ring, vec![ring.var(0)])).unwrap();
    println!("single quotient by x: {} gens in {:?}", q.gens().len(), t.elapsed());
}
