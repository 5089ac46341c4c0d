use mustrat::matrix::{gradient_row, PolyMatrix};
use mustrat::nash::{nash_graph_charts, nash_pushforward_chi};
use mustrat::poly::MonomialOrder;

fn main() {
    let base = mustrat::poly::PolyRing::named(&["x", "y", "z", "w"], MonomialOrder::GrevLex);
    let g = base.parse("x*y - z*w").unwrap();
    let atlas = nash_graph_charts(&base, &g).unwrap();
    let k = 5u32;
    let f1 = base.parse("z - w").unwrap();
    let f2 = base.parse(&format!("y - x^{}", k)).unwrap();
    let l1 = base.parse("x + 2*y + 3*z + 5*w").unwrap();
    let l2 = base.parse("7*x - y + 2*z + w").unwrap();
    let row = |p: &mustrat::poly::Poly| gradient_row(&base, p).row(0);
    let cases: Vec<(&str, Vec<mustrat::poly::Poly>, Vec<Vec<mustrat::poly::Poly>>)> = vec![
        ("j1+ Kosz(l2) ENC(df1,dl2)", vec![l2.clone()], vec![row(&f1), row(&l2)]),
        ("j1- Kosz(l2) ENC(dl1,dl2)", vec![l2.clone()], vec![row(&l1), row(&l2)]),
        ("j2+ Kosz(f1) ENC(df1,df2)", vec![f1.clone()], vec![row(&f1), row(&f2)]),
        ("j2- Kosz(f1) ENC(df1,dl2)", vec![f1.clone()], vec![row(&f1), row(&l2)]),
    ];
    for (name, kosz, rows) in cases {
        let omega = PolyMatrix::from_rows(&base, rows).unwrap();
        let t0 = std::time::Instant::now();
        match nash_pushforward_chi(&atlas, &kosz, &omega, None) {
            Ok(out) => println!("{}: chi = {} lengths {:?} ({:?})", name, out.chi, out.lengths, t0.elapsed()),
            Err(e) => println!("{}: ERROR {e} ({:?})", name, t0.elapsed()),
        }
    }
}
