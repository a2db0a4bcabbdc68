use polarsc::codec::*;
use polarsc::construct::{PolarCode, ShortcutTree};
use polarsc::fixedpoint::{quantize, AqProfile, QWidth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

#[test]
fn transform_is_an_involution() {
    for n in 0..=4 {
        let big = 1usize << n;
        for w in 0..1u32 << big {
            let u: Vec<u8> = (0..big).map(|i| (w >> i & 1) as u8).collect();
            assert_eq!(polar_transform(&polar_transform(&u).unwrap()).unwrap(), u);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let u = random_bits(&mut rng, 1024);
        assert_eq!(polar_transform(&polar_transform(&u).unwrap()).unwrap(), u);
    }
}

#[test]
fn systematic_codewords_carry_the_payload() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (n, k) in [(1, 1), (3, 4), (6, 40), (10, 854)] {
        let code = PolarCode::construct(n, k, 4.0).unwrap();
        let info = code.info_positions();
        for _ in 0..20 {
            let d = random_bits(&mut rng, k);
            let x = systematic_encode(&d, &code).unwrap();
            let got: Vec<u8> = info.iter().map(|&i| x[i]).collect();
            assert_eq!(got, d);
            // x is a codeword: its preimage is zero on the frozen set
            let u = polar_transform(&x).unwrap();
            assert!((0..code.block_len()).all(|i| !code.is_frozen(i) || u[i] == 0));
            assert_eq!(extract_payload(&u, &code, Mode::Systematic).unwrap(), d);
        }
    }
}

#[test]
fn noiseless_decoding_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = QWidth::new(5).unwrap();
    for (n, k) in [(2, 2), (5, 16), (8, 180), (10, 854)] {
        let code = PolarCode::construct(n, k, 5.0).unwrap();
        let tree = ShortcutTree::build(&code, 32.min(1 << n)).unwrap();
        let aq = AqProfile::uniform(&tree, w);
        for mode in [Mode::Systematic, Mode::NonSystematic] {
            let mut fdec = ShortcutDecoder::<f64>::new(&code, &tree, None, mode).unwrap();
            let mut qdec = ShortcutDecoder::new(&code, &tree, Some(&aq), mode).unwrap();
            for _ in 0..10 {
                let d = random_bits(&mut rng, k);
                let x = match mode {
                    Mode::Systematic => systematic_encode(&d, &code).unwrap(),
                    Mode::NonSystematic => encode(&d, &code).unwrap(),
                };
                let l: Vec<f64> = x.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
                let q: Vec<_> = l.iter().map(|&v| quantize(v, w, 0.75)).collect();
                let rf = fdec.decode(&l).unwrap();
                let rq = qdec.decode(&q).unwrap();
                assert_eq!(rf.d_hat, d);
                assert_eq!(rq.d_hat, d);
                assert_eq!(extract_payload(&rf.u_hat, &code, mode).unwrap(), d);
                assert_eq!(sc_decode_reference(&l, &code, mode).unwrap().d_hat, d);
            }
        }
    }
}

#[test]
fn aq_profile_at_base_width_is_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = QWidth::new(5).unwrap();
    let code = PolarCode::construct(8, 160, 3.0).unwrap();
    let tree = ShortcutTree::build(&code, 32).unwrap();
    let aq = AqProfile::uniform(&tree, w);
    for _ in 0..200 {
        let q: Vec<_> = (0..256)
            .map(|_| quantize(rng.random_range(-8.0..8.0), w, 0.5))
            .collect();
        let a = sc_decode_shortcut(&q, &tree, Some(&aq), &code, Mode::Systematic).unwrap();
        let b = sc_decode_shortcut(&q, &tree, None, &code, Mode::Systematic).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn decoders_share_plans_across_threads() {
    let code = PolarCode::construct(7, 64, 3.0).unwrap();
    let tree = ShortcutTree::build(&code, 32).unwrap();
    let dec = ShortcutDecoder::<f64>::new(&code, &tree, None, Mode::Systematic).unwrap();
    let frames: Vec<Vec<f64>> = {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        (0..64)
            .map(|_| (0..128).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect()
    };
    let serial: Vec<_> = frames.iter().map(|f| dec.clone().decode(f).unwrap()).collect();
    let parallel: Vec<_> = std::thread::scope(|s| {
        let hs: Vec<_> = frames
            .chunks(16)
            .map(|c| {
                let mut d = dec.clone();
                s.spawn(move || c.iter().map(|f| d.decode(f).unwrap()).collect::<Vec<_>>())
            })
            .collect();
        hs.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(serial, parallel);
}
