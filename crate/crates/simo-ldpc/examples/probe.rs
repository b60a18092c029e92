use simo_ldpc::channel::Combiner;
use simo_ldpc::codes::{ar3a_base, lift, systematic_encoder};
use simo_ldpc::sim::{run_ber, SimConfig};

// Verify AR3A lift seed 11 on the acceptance grid (z=512, N_R=2).
fn main() {
    let base = ar3a_base(0);
    let h = lift(&base, 512, 11).unwrap();
    let enc = systematic_encoder(&h).unwrap();
    for db in [2.4f64, 2.55, 2.7] {
        let mut cfg = SimConfig::new(2, Combiner::Mrc, db, 42);
        cfg.target_bit_errors = 400;
        cfg.max_frames = 60_000;
        cfg.max_iterations = 100;
        let p = run_ber(&h, &enc, &cfg).unwrap();
        println!(
            "ar3a seed=11 {db:.2} dB: ber={:.3e} errs={} ferrs={} frames={} resolved={}",
            p.ber, p.bit_errors, p.frame_errors, p.frames, p.resolved
        );
    }
}
