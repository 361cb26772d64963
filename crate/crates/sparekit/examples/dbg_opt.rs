fn main() {
    use sparekit::*;
    let spec = from_mean_cv(MomentFitFamily::Gamma, 2.0, 0.4).unwrap();
    // reproduce the failing isolated solve: print V_i and weights per level
    for s in [20u32, 22, 23] {
        let cfg = SingleGoodConfig {
            stock: s,
            channels: 2,
            threshold: 0.5,
            repair_rate: 0.5,
            lifetime: spec,
        };
        match steady_state(&cfg) {
            Ok(st) => {
                let p: Vec<String> = st.probs().iter().map(|x| format!("{x:.2e}")).collect();
                println!("S={s}: P(0)={:.6} probs={:?}", st.p_down(), &p[..8.min(p.len())]);
            }
            Err(e) => println!("S={s}: ERR {e}"),
        }
        match remaining_service_transforms_capacitated(&cfg) {
            Ok(t) => {
                let v: Vec<String> = t.f_at_next.iter().map(|x| format!("{x:.3e}")).collect();
                println!("   V: {v:?}");
            }
            Err(e) => println!("   table ERR {e}"),
        }
    }
}
