use pathwise::coefficients::Profile;
use pathwise::fbm::sample_fbm_hilbert;
use pathwise::par;
use pathwise::solver::certify::instances::multimode;
use pathwise::solver::solve_mild;
use pathwise::{FbmConfig, TraceWeights};

#[test]
fn parallel_and_sequential_paths_agree_bitwise() {
    let cfg = FbmConfig::new(0.7, 1.0, 512, 9).unwrap();
    let q = TraceWeights::default_for(6);
    let p = multimode(6, Profile::Tanh, 1.0, 256, 2).unwrap();

    par::set_sequential(true);
    let a = sample_fbm_hilbert(&cfg, &q).unwrap();
    let (ua, da) = solve_mild(&p).unwrap();
    par::set_sequential(false);
    let b = sample_fbm_hilbert(&cfg, &q).unwrap();
    let (ub, db) = solve_mild(&p).unwrap();

    assert_eq!(a, b);
    assert_eq!(ua, ub);
    assert_eq!(da.distances, db.distances);
}
