mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

use fcfam::characterize::find_characteristic;
use fcfam::classify::{classify, verify, FcStatus};
use fcfam::io::{
    certificate_from_str, certificate_to_string, load_certificate, load_characterization, load_manifest,
    read_stats_csv, save_certificate, save_characterization, STATS_FILE,
};
use fcfam::Family;

use common::random_family;

const SEED: u64 = 0x5eed_f00d;

#[test]
fn thousand_random_certificates_survive_serialization() {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    for _ in 0..1000 {
        let f = random_family(&mut rng, 5);
        let st = classify(&f).unwrap();
        let back = certificate_from_str(&certificate_to_string(&st)).unwrap();
        if back != st || !verify(&back) || back.is_fc() != st.is_fc() {
            failures.push(f);
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn certificate_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    for i in 0..20 {
        let st = classify(&random_family(&mut rng, 4)).unwrap();
        let path = dir.path().join(format!("{i}.json"));
        save_certificate(&path, &st).unwrap();
        assert_eq!(load_certificate(&path).unwrap(), st);
    }
}

#[test]
fn tampered_weight_is_refuted() {
    let st = classify(&Family::of(3, &[&[0], &[1, 2]])).unwrap();
    let FcStatus::Fc(mut c) = st else { panic!("expected FC") };
    let mut w = c.weight.weights().to_vec();
    w.iter_mut().for_each(|x| *x = 0);
    c.weight = fcfam::WeightFn::new(w);
    assert!(!verify(&FcStatus::Fc(c)));
}

#[test]
fn characterization_directory_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let ch = find_characteristic(4).unwrap();
    let rows = fcfam::characterize::stats(&ch).unwrap();
    save_characterization(dir.path(), &ch, Some(&rows), 0.5).unwrap();
    let back = load_characterization(dir.path()).unwrap();
    assert_eq!(back.minimal_fc_families(), ch.minimal_fc_families());
    assert_eq!(back.maximal_nonfc_families(), ch.maximal_nonfc_families());
    assert_eq!(back.lf_lists, ch.lf_lists);
    assert_eq!(back.ln_lists, ch.ln_lists);
    assert_eq!(read_stats_csv(&dir.path().join(STATS_FILE)).unwrap(), rows);
    let m = load_manifest(dir.path()).unwrap();
    assert_eq!((m.n, m.minimal_fc, m.maximal_nonfc), (4, 3, 1));
    assert!(m.complete);
}
