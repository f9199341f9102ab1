use proptest::prelude::*;

use spinent::scaling::{fit_central_charge, EntropyProfile, ProfilePoint};
use spinent::spectra::{
    binary_entropy, majorization_compare, reduced_spectrum_full, reduced_spectrum_topk,
    shannon_entropy, ProbabilitySpectrum,
};
use spinent::xy_exact::{block_entropy, ModeOccupations};

fn occupations(max_len: usize) -> impl Strategy<Value = ModeOccupations> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_len).prop_map(|v| ModeOccupations::new(v).unwrap())
}

fn distribution(max_len: usize) -> impl Strategy<Value = ProbabilitySpectrum> {
    prop::collection::vec(0.0f64..1.0, 1..=max_len).prop_map(|w| {
        let total: f64 = w.iter().sum::<f64>() + 1e-3;
        let mut p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let rest = 1.0 - p.iter().sum::<f64>();
        p.push(rest);
        ProbabilitySpectrum::complete(p).unwrap()
    })
}

fn padded(spec: &ProbabilitySpectrum, extra: usize) -> ProbabilitySpectrum {
    let mut p = spec.probabilities().to_vec();
    p.extend(std::iter::repeat_n(0.0, extra));
    ProbabilitySpectrum::complete(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn topk_is_prefix_of_full(nu in occupations(12), k in 1usize..5000) {
        let full = reduced_spectrum_full(&nu).unwrap();
        let top = reduced_spectrum_topk(&nu, k).unwrap();
        let n = k.min(full.len());
        prop_assert_eq!(top.probabilities(), &full.probabilities()[..n]);
    }

    #[test]
    fn mode_entropy_equals_spectrum_entropy(nu in occupations(14)) {
        let via_spectrum = shannon_entropy(&reduced_spectrum_full(&nu).unwrap()).unwrap();
        let via_modes: f64 = nu.values().iter().map(|&v| binary_entropy((1.0 + v) / 2.0).unwrap()).sum();
        prop_assert!((via_spectrum - via_modes).abs() < 1e-10);
        prop_assert_eq!(via_modes, block_entropy(&nu));
    }

    #[test]
    fn majorization_is_reflexive(p in distribution(20)) {
        prop_assert!(majorization_compare(&p, &p, 1e-12).unwrap().holds);
    }

    #[test]
    fn majorization_is_transitive(a in distribution(8), b in distribution(8), c in distribution(8)) {
        let ab = majorization_compare(&a, &b, 1e-12).unwrap().holds;
        let bc = majorization_compare(&b, &c, 1e-12).unwrap().holds;
        if ab && bc {
            prop_assert!(majorization_compare(&a, &c, 2e-12).unwrap().holds);
        }
    }

    #[test]
    fn zero_padding_keeps_verdicts(p in distribution(10), q in distribution(10), pad in 1usize..20) {
        let plain = majorization_compare(&p, &q, 1e-12).unwrap();
        let with_pads = majorization_compare(&padded(&p, pad), &padded(&q, 2 * pad), 1e-12).unwrap();
        prop_assert_eq!(plain.holds, with_pads.holds);
        prop_assert!((plain.max_violation - with_pads.max_violation).abs() < 1e-15);
    }

    #[test]
    fn central_charge_ignores_constant_offsets(
        slope in -1.0f64..1.0,
        intercept in 0.0f64..3.0,
        offset in 0.0f64..5.0,
        noise in prop::collection::vec(0.0f64..0.01, 40),
    ) {
        let points: Vec<ProfilePoint> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let l = i + 1;
                ProfilePoint { l, s: (slope * (l as f64).log2() + intercept + e).max(0.0) }
            })
            .collect();
        let prof = EntropyProfile::new("p", points).unwrap();
        let a = fit_central_charge(&prof, (1, 40)).unwrap();
        let b = fit_central_charge(&prof.shifted(offset).unwrap(), (1, 40)).unwrap();
        prop_assert!((a.central_charge_sum - b.central_charge_sum).abs() < 1e-11);
        prop_assert_eq!(a.central_charge_sum, 6.0 * a.slope);
    }
}
