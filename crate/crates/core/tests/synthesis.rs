use proptest::prelude::*;

use subthz_chan::angular::campaign_angular_summary;
use subthz_chan::pathloss::fspl;
use subthz_chan::synth::{render_campaign, sample_drop, Condition, LobeCountLaw, LogNormalLaw, SynthesisParams};
use subthz_chan::units::linear_to_db;
use subthz_chan::{ingest_campaign, Polarization};

fn single_lobe() -> SynthesisParams {
    SynthesisParams {
        lobe_count_law: LobeCountLaw {
            mean: 1.0,
            min: 1,
            max: 1,
        },
        rmsds_target_ns: LogNormalLaw {
            log_mean: 1e-6f64.ln(),
            log_std: 0.0,
        },
        nlos_fraction: 0.0,
        ..SynthesisParams::default()
    }
}

#[test]
fn one_location_single_lobe_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let r = render_campaign(&single_lobe(), 1, 5, dir.path()).unwrap();
    let c = ingest_campaign(&r.manifest_path).unwrap();
    assert_eq!(c.locations.len(), 2);
    let vv: Vec<_> = c
        .locations
        .iter()
        .filter(|l| l.polarization == Polarization::VV)
        .cloned()
        .collect();
    let a = campaign_angular_summary(&vv, 30.0).unwrap();
    assert_eq!((a.aoa_lobes.mean, a.aod_lobes.mean), (1.0, 1.0));
}

#[test]
fn thirteen_locations_honor_los_flags() {
    let dir = tempfile::tempdir().unwrap();
    let r = render_campaign(&SynthesisParams::default(), 13, 42, dir.path()).unwrap();
    let c = ingest_campaign(&r.manifest_path).unwrap();
    assert_eq!(c.locations.len(), 26);
    let vv: Vec<_> = c
        .locations
        .iter()
        .filter(|l| l.polarization == Polarization::VV)
        .collect();
    assert_eq!(vv.iter().filter(|l| l.los).count(), 11);
    assert_eq!(vv.iter().filter(|l| !l.los).count(), 2);
    let d0 = vv.iter().map(|l| l.distance_m()).fold(f64::INFINITY, f64::min);
    assert!((d0 - 6.3).abs() < 1e-9);
    assert!(dir.path().join("drops.json").exists());
}

#[test]
fn mean_path_loss_matches_ci_line() {
    let p = SynthesisParams::default();
    let n = 10_000;
    let mean = (0..n)
        .map(|s| sample_drop(&p, 20.0, Condition::Los, s).unwrap().pl_db)
        .sum::<f64>()
        / n as f64;
    let want = fspl(142e9, 1.0) + 18.6 * 20f64.log10();
    assert!((mean - want).abs() < 0.1, "{mean} vs {want}");
}

#[test]
fn drop_seeds_are_independent_of_order() {
    let p = SynthesisParams::default();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let a = render_campaign(&p, 6, 9, dir_a.path()).unwrap();
    let b = render_campaign(&p, 6, 9, dir_b.path()).unwrap();
    assert_eq!(a.drops, b.drops);
    for (i, d) in a.drops.iter().enumerate() {
        let again = sample_drop(&p, d.distance_m, d.condition, d.seed).unwrap();
        assert_eq!(&again, d, "drop {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rendered_campaigns_always_ingest(seed in any::<u64>(), n in 1usize..6) {
        let dir = tempfile::tempdir().unwrap();
        let r = render_campaign(&SynthesisParams::default(), n, seed, dir.path()).unwrap();
        let c = ingest_campaign(&r.manifest_path).unwrap();
        prop_assert_eq!(c.locations.len(), 2 * n);
        for d in &r.drops {
            prop_assert!((linear_to_db(d.total_power_mw()) + d.pl_db).abs() < 0.1);
            prop_assert!(d.taps().all(|t| t.power_mw > 0.0));
        }
    }
}
