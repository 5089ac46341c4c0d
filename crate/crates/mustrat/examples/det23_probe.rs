use mustrat::polar::mu_polar;
use mustrat::poly::MonomialOrder;
use mustrat::strat::examples;

fn main() {
    let s = examples::det2x3(MonomialOrder::GrevLex);
    for (k, l) in [(1u32, 1u32), (2, 2), (2, 3)] {
        let f1 = s.ring.parse(&format!("x - v^{}", k)).unwrap();
        let f2 = s.ring.parse(&format!("w - y^{}", l)).unwrap();
        let t0 = std::time::Instant::now();
        match mu_polar(&s, "V1", &[f1, f2], 23) {
            Ok((mu, cert)) => println!(
                "(k,l)=({},{}): mu = {} (expect {}) draws={} ({:?})",
                k, l, mu, k + l - 2, cert.draws_used, t0.elapsed()
            ),
            Err(e) => println!("(k,l)=({},{}): ERROR {e} ({:?})", k, l, t0.elapsed()),
        }
    }
}
