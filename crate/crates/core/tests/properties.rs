mod support {
    pub mod oracles;
    pub mod scenes;
}

use amplipix_core::amplify::{self, solve_j, solve_max_t, solve_min_t};
use amplipix_core::filters::{box_filter, guided_filter, max_filter, min_filter, morphological_laplace};
use amplipix_core::sharpen::{self, sharpen_complex, sharpen_simple};
use amplipix_core::{
    center_crop_fundus, clip01, invert, resize_bilinear, AmplifyParams, Atmosphere, CropOutcome,
    GuidedFilterParams, ImageBuf, Letter, MethodExpr, SharpenParams, StructuringElement, TransmissionMap,
};
use proptest::prelude::*;
use support::oracles;

fn image(max_side: usize, channels: usize) -> impl Strategy<Value = ImageBuf> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(h, w)| {
        proptest::collection::vec(0.0f64..=1.0, h * w * channels)
            .prop_map(move |data| ImageBuf::new(h, w, channels, data).unwrap())
    })
}

fn rgb(max_side: usize) -> impl Strategy<Value = ImageBuf> {
    image(max_side, 3)
}

fn atmosphere_for(h: usize, w: usize) -> impl Strategy<Value = Atmosphere> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(Atmosphere::Scalar),
        (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(r, g, b)| Atmosphere::Rgb([r, g, b])),
        proptest::collection::vec(0.0f64..=1.0, h * w * 3)
            .prop_map(move |d| Atmosphere::Map(ImageBuf::new(h, w, 3, d).unwrap())),
    ]
}

fn se() -> impl Strategy<Value = StructuringElement> {
    (1usize..=5, 1usize..=5, 1usize..=3).prop_map(|(r, c, k)| StructuringElement::new(r, c, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invert_is_involution(img in image(8, 3), levels in proptest::collection::vec(0u32..=65535, 12)) {
        // arbitrary doubles come back within an ulp of 1.0
        let twice = invert(&invert(&img));
        for (a, b) in twice.data().iter().zip(img.data()) {
            prop_assert!((a - b).abs() <= f64::EPSILON / 2.0);
        }
        // samples on a 16-bit grid come back bit-exact
        let quantized = ImageBuf::new(2, 2, 3, levels.iter().map(|&k| k as f64 / 65536.0).collect()).unwrap();
        prop_assert_eq!(invert(&invert(&quantized)), quantized);
    }

    #[test]
    fn clip_is_idempotent(data in proptest::collection::vec(-2.0f64..3.0, 12)) {
        let img = ImageBuf::new(2, 2, 3, data).unwrap();
        let once = clip01(&img);
        prop_assert!(once.data().iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(clip01(&once), once);
    }

    #[test]
    fn resize_stays_within_input_range(img in image(6, 3), oh in 1usize..20, ow in 1usize..20) {
        let out = resize_bilinear(&img, oh, ow).unwrap();
        prop_assert_eq!(out.shape(), (oh, ow, 3));
        prop_assert!(out.min() >= img.min() && out.max() <= img.max());
    }

    #[test]
    fn crop_is_a_subrectangle(img in rgb(12), threshold in 0.0f64..0.9) {
        match center_crop_fundus(&img, threshold).unwrap() {
            CropOutcome::Cropped { image, top, left } => {
                prop_assert!(top + image.height() <= img.height());
                prop_assert!(left + image.width() <= img.width());
                prop_assert_eq!(&image, &img.crop(top, left, image.height(), image.width()).unwrap());
            }
            CropOutcome::NoForeground(image) => prop_assert_eq!(image, img),
        }
    }

    #[test]
    fn erosion_below_dilation_above(img in image(7, 3), se in se()) {
        let lo = min_filter(&img, se).unwrap();
        let hi = max_filter(&img, se).unwrap();
        for ((l, v), h) in lo.data().iter().zip(img.data()).zip(hi.data()) {
            prop_assert!(l <= v && v <= h);
        }
        prop_assert_eq!(&lo, &oracles::brute_extremum(&img, se, true));
        prop_assert_eq!(&hi, &oracles::brute_extremum(&img, se, false));
    }

    #[test]
    fn constants_are_fixed_points(h in 1usize..10, w in 1usize..10, v in 0.0f64..=1.0, r in 1usize..4, se in se()) {
        let img = ImageBuf::filled(h, w, 3, v).unwrap();
        let params = GuidedFilterParams::new(r, 1e-6).unwrap();
        for out in [
            box_filter(&img, r).unwrap(),
            guided_filter(&img, &img, params).unwrap(),
            min_filter(&img, se).unwrap(),
            max_filter(&img, se).unwrap(),
        ] {
            prop_assert!(out.data().iter().all(|s| (s - v).abs() < 1e-6));
        }
        prop_assert!(morphological_laplace(&img, se).unwrap().data().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn guided_filter_matches_oracle(
        guide in image(12, 3),
        seed in any::<u64>(),
        r in 1usize..=3,
        eps in prop_oneof![Just(1e-4), Just(1e-2), Just(0.1)],
    ) {
        let src = oracles::random_image(guide.height(), guide.width(), 3, seed);
        let fast = guided_filter(&guide, &src, GuidedFilterParams::new(r, eps).unwrap()).unwrap();
        let slow = oracles::brute_guided(&guide, &src, r, eps);
        for (a, b) in fast.data().iter().zip(slow.data()) {
            prop_assert!((a - b).abs() < 1e-5, "{} vs {}", a, b);
        }
    }

    #[test]
    fn min_max_identities(img in rgb(10), omega in 1usize..6) {
        let one = Atmosphere::Scalar(1.0);
        let inv = invert(&img);
        // 1 − solveMin_t(I) = solveMax_t(1 − I)
        prop_assert_eq!(
            solve_min_t(&img, &one, omega).unwrap().complement(),
            solve_max_t(&inv, &one, omega).unwrap()
        );
        // 1 − solveMax_t(I) = solveMin_t(1 − I)
        prop_assert_eq!(
            solve_max_t(&img, &one, omega).unwrap().complement(),
            solve_min_t(&inv, &one, omega).unwrap()
        );
    }

    #[test]
    fn solve_min_t_matches_oracle(img in rgb(8), omega in 1usize..6, a in (0.1f64..=1.0, 0.1f64..=1.0, 0.1f64..=1.0)) {
        let atm = [a.0, a.1, a.2];
        let t = solve_min_t(&img, &Atmosphere::Rgb(atm), omega).unwrap();
        prop_assert_eq!(t.image(), &oracles::brute_solve_min_t(&img, atm, omega));
    }

    #[test]
    fn solve_j_inversion_identity((img, atm) in rgb(8).prop_flat_map(|i| {
        let (h, w) = (i.height(), i.width());
        (Just(i), atmosphere_for(h, w))
    }), t_seed in any::<u64>()) {
        let t = t_map(img.height(), img.width(), t_seed, 0.1);
        let direct = solve_j(&img, &t, &atm, 1e-8).unwrap();
        let mirrored = invert(&solve_j(&invert(&img), &t, &atm.complement(), 1e-8).unwrap());
        for (a, b) in direct.data().iter().zip(mirrored.data()) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn recovery_orders_samples((img, atm) in rgb(8).prop_flat_map(|i| {
        let (h, w) = (i.height(), i.width());
        (Just(i), atmosphere_for(h, w))
    }), t_seed in any::<u64>()) {
        let t = t_map(img.height(), img.width(), t_seed, 0.05);
        let j = solve_j(&img, &t, &atm, 1e-8).unwrap();
        let a = atmosphere_image(&atm, &img);
        for ((&jv, &iv), &av) in j.data().iter().zip(img.data()).zip(a.data()) {
            if av >= iv {
                prop_assert!(jv <= iv + 1e-9 && iv <= av + 1e-9);
            }
            if av <= iv {
                prop_assert!(jv >= iv - 1e-9 && iv >= av - 1e-9);
            }
        }
    }

    #[test]
    fn color_illumination_is_direct_attenuation(img in rgb(8), t_seed in any::<u64>()) {
        let t = t_map(img.height(), img.width(), t_seed, 0.0);
        let floor = t.recovery_floor(1e-8);
        let lhs = invert(&solve_j(&invert(&img), &t, &1.0.into(), 1e-8).unwrap());
        let mid = solve_j(&img, &t, &0.0.into(), 1e-8).unwrap();
        for (i, (&l, &m)) in lhs.data().iter().zip(mid.data()).enumerate() {
            let expect = img.data()[i] / t.image().data()[i / 3].max(floor);
            prop_assert!((l - expect).abs() < 1e-6 && (m - expect).abs() < 1e-6);
        }
    }

    #[test]
    fn smaller_t_amplifies_more(i in 0.0f64..=1.0, a in 0.0f64..=1.0, t1 in 0.05f64..=1.0, t2 in 0.05f64..=1.0) {
        prop_assume!((i - a).abs() > 1e-6 && (t1 - t2).abs() > 1e-9);
        let img = ImageBuf::filled(1, 1, 1, i).unwrap();
        let gap = |t: f64| {
            let tm = TransmissionMap::uniform(1, 1, t).unwrap();
            (solve_j(&img, &tm, &a.into(), 1e-8).unwrap().data()[0] - i).abs()
        };
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(gap(lo) > gap(hi));
    }

    #[test]
    fn unit_t_sharpening_is_identity(img in rgb(10)) {
        let params = SharpenParams { scalar_t: 1.0, ..SharpenParams::default() };
        let j = sharpen_simple(&img, &params, None).unwrap();
        for (a, b) in j.data().iter().zip(img.data()) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn unsharp_equivalence(img in rgb(12), t in 0.05f64..=1.0) {
        let params = SharpenParams { scalar_t: t, ..SharpenParams::default() };
        let j = sharpen_simple(&img, &params, None).unwrap();
        let reference = sharpen::unsharp_mask(&img, &sharpen::blur(&img, &params).unwrap(), t).unwrap();
        for (a, b) in j.data().iter().zip(reference.data()) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn laplace_map_bounds(img in rgb(12)) {
        let params = SharpenParams { blur: GuidedFilterParams::new(2, 1e-4).unwrap(), ..SharpenParams::default() };
        if let Some(t) = sharpen::laplace_transmission(&img, &params).unwrap() {
            prop_assert_eq!(t.image().channels(), 3);
            prop_assert!(t.image().data().iter().all(|&v| (1e-8..=1.0).contains(&v)));
        }
        let out = sharpen_complex(&img, &params).unwrap();
        prop_assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn render_parse_round_trip(letters in proptest::collection::vec(0usize..8, 1..6), pre in any::<bool>()) {
        let letters: Vec<Letter> = letters.into_iter().map(|i| Letter::ALL[i]).collect();
        let expr = if pre {
            MethodExpr::average_of_sharpened(&letters).unwrap()
        } else {
            MethodExpr::sharpened_average(&letters).unwrap()
        };
        prop_assert_eq!(MethodExpr::parse(&expr.to_string()).unwrap(), expr);
    }
}

fn t_map(h: usize, w: usize, seed: u64, lo: f64) -> TransmissionMap {
    let raw = oracles::random_image(h, w, 1, seed);
    TransmissionMap::new(raw.map(|v| lo + (1.0 - lo) * v))
}

fn atmosphere_image(atm: &Atmosphere, like: &ImageBuf) -> ImageBuf {
    match atm {
        Atmosphere::Scalar(v) => ImageBuf::filled(like.height(), like.width(), 3, *v).unwrap(),
        Atmosphere::Rgb(rgb) => ImageBuf::from_fn(like.height(), like.width(), 3, |_, _, c| rgb[c]).unwrap(),
        Atmosphere::Map(m) => m.clone(),
    }
}

fn small_params() -> (AmplifyParams, SharpenParams) {
    (
        AmplifyParams { t_refine: GuidedFilterParams::new(4, 1e-4).unwrap(), ..AmplifyParams::default() },
        SharpenParams { blur: GuidedFilterParams::new(3, 1e-4).unwrap(), ..SharpenParams::default() },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composition_output_in_unit_range(img in rgb(14), letters in proptest::collection::vec(0usize..8, 1..4), pre in any::<bool>()) {
        let (ap, sp) = small_params();
        let letters: Vec<Letter> = letters.into_iter().map(|i| Letter::ALL[i]).collect();
        let expr = if pre {
            MethodExpr::average_of_sharpened(&letters).unwrap()
        } else {
            MethodExpr::sharpened_average(&letters).unwrap()
        };
        let out = expr.evaluate(&img, &ap, &sp).unwrap();
        prop_assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn letter_methods_respect_direction(img in rgb(14)) {
        let (ap, _) = small_params();
        for letter in Letter::ALL {
            let j = amplify::letter_method_unclipped(&img, letter, &ap).unwrap();
            for (o, i) in j.data().iter().zip(img.data()) {
                let ok = if letter.brightens() { o >= i } else { o <= i };
                prop_assert!(ok, "letter {} moved the wrong way", letter);
            }
        }
    }
}

#[test]
fn averaging_is_order_invariant() {
    let img = support::scenes::fundus(40, 48, 3);
    let (ap, sp) = small_params();
    let a = MethodExpr::parse("sA+sC+sX+sZ").unwrap().evaluate(&img, &ap, &sp).unwrap();
    let b = MethodExpr::parse("sZ+sX+sA+sC").unwrap().evaluate(&img, &ap, &sp).unwrap();
    assert_eq!(a, b);
    let c = MethodExpr::parse("A+X").unwrap().evaluate(&img, &ap, &sp).unwrap();
    let d = MethodExpr::parse("X+A").unwrap().evaluate(&img, &ap, &sp).unwrap();
    assert_eq!(c, d);
}

#[test]
fn composition_matches_manual_assembly() {
    let img = support::scenes::fundus(36, 36, 9);
    let (ap, sp) = small_params();
    let a = amplify::letter_method(&img, Letter::A, &ap).unwrap();
    let x = amplify::letter_method(&img, Letter::X, &ap).unwrap();

    let mean = a.zip_map(&x, |p, q| 0.5 * (p + q)).unwrap();
    let manual = sharpen_complex(&mean, &sp).unwrap();
    let composed = MethodExpr::parse("A+X").unwrap().evaluate(&img, &ap, &sp).unwrap();
    for (p, q) in composed.data().iter().zip(manual.data()) {
        assert!((p - q).abs() < 1e-6);
    }

    let single = MethodExpr::parse("sA").unwrap().evaluate(&img, &ap, &sp).unwrap();
    assert_eq!(single, sharpen_complex(&a, &sp).unwrap());

    // convexity: a plain average sits between its terms
    let avg = MethodExpr::parse("sA+sX").unwrap().evaluate(&img, &ap, &sp).unwrap();
    let sa = sharpen_complex(&a, &sp).unwrap();
    let sx = sharpen_complex(&x, &sp).unwrap();
    for ((m, p), q) in avg.data().iter().zip(sa.data()).zip(sx.data()) {
        assert!(*m >= p.min(*q) - 1e-15 && *m <= p.max(*q) + 1e-15);
    }
}
