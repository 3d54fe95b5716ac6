use lplab_core::*;
use lplab_core::matrix::PMatrix;

fn main() {
    let engine = NormEngine::default();
    let p = PExponent::new(4.0).unwrap();
    let e2 = gallery::make_en(2).unwrap();
    let inputs = vec![
        ("diag(5,0)", PMatrix::diag_real(&[5.0, 0.0])),
        ("e2", e2),
        ("half(1-e3)", (PMatrix::identity(3) - gallery::make_en(3).unwrap()).scale_re(0.5)),
    ];
    for (name, x) in inputs {
        let t0 = std::time::Instant::now();
        eprintln!("--- {name}");
        let rep = states::support_state_suite(&engine, &x, &p, 10, 10).unwrap();
        eprintln!(
            "{name}: fwd {:.2e} conv {:?} found {} in {:?}",
            rep.forward_max, rep.converse_max, rep.converse_states_found, t0.elapsed()
        );
    }
}
