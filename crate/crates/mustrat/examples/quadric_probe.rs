use mustrat::matrix::gradient_row;
use mustrat::nash::{nash_graph_charts, nash_pushforward_chi};
use mustrat::poly::{MonomialOrder, PolyRing};

fn main() {
    let base = PolyRing::named(&["x", "y", "z", "w"], MonomialOrder::GrevLex);
    let g = base.parse("x*y - z*w").unwrap();
    let t0 = std::time::Instant::now();
    let atlas = nash_graph_charts(&base, &g).unwrap();
    println!("atlas: {:?} ({:?})", atlas, t0.elapsed());
    let t1 = std::time::Instant::now();
    let res = atlas.resolution().unwrap();
    println!("resolution twists: {:?} ({:?})", res.twists, t1.elapsed());
    for k in [2u32, 3] {
        let f = base.parse(&format!("y - x^{}", k)).unwrap();
        let df = gradient_row(&base, &f);
        let t2 = std::time::Instant::now();
        match nash_pushforward_chi(&atlas, &[], &df, None) {
            Ok(out) => println!("k={}: chi(ENC(nu*df)) = {} lengths {:?} cert {:?} ({:?})", k, out.chi, out.lengths, out.certificate, t2.elapsed()),
            Err(e) => println!("k={}: ERROR {e}", k),
        }
    }
    // generic linear form: chi should be 0
    let l = base.parse("x + 2*y + 3*z + 5*w").unwrap();
    let dl = gradient_row(&base, &l);
    let t3 = std::time::Instant::now();
    match nash_pushforward_chi(&atlas, &[], &dl, None) {
        Ok(out) => println!("dl: chi = {} lengths {:?} ({:?})", out.chi, out.lengths, t3.elapsed()),
        Err(e) => println!("dl: ERROR {e}"),
    }
}
