use cipherbench::bitops::{self, BitVector};
use cipherbench::des::{tables, Des, DesKey};
use cipherbench::kat::{self, Direction, KatCase, KatFile};
use cipherbench::modes::{self, CipherSuite, Mode, ModeSpec};
use cipherbench::tdes::{Tdes, TdesKey};
use cipherbench::Algorithm;
use proptest::prelude::*;

fn algorithm() -> impl Strategy<Value = (Algorithm, usize)> {
    prop_oneof![
        Just((Algorithm::Des, 8)),
        Just((Algorithm::Tdes, 8)),
        Just((Algorithm::Tdes, 16)),
        Just((Algorithm::Tdes, 24)),
        Just((Algorithm::Aes128, 16)),
        Just((Algorithm::Aes192, 24)),
        Just((Algorithm::Aes256, 32)),
    ]
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Ecb), Just(Mode::Cbc), Just(Mode::Ctr)]
}

fn suite_and_spec() -> impl Strategy<Value = (CipherSuite, ModeSpec)> {
    (algorithm(), mode(), any::<[u8; 32]>(), any::<[u8; 16]>()).prop_map(|((algo, len), mode, key, iv)| {
        let suite = CipherSuite::new(algo, &key[..len]).unwrap();
        let iv = iv[..algo.block_octets()].to_vec();
        (suite, ModeSpec::new(mode, mode.needs_iv().then_some(iv)))
    })
}

proptest! {
    #[test]
    fn mode_round_trip((suite, spec) in suite_and_spec(), msg in prop::collection::vec(any::<u8>(), 0..300)) {
        let ct = modes::mode_encrypt(&suite, &spec, &msg).unwrap();
        prop_assert_eq!(modes::mode_decrypt(&suite, &spec, &ct).unwrap(), msg);
    }

    #[test]
    fn padded_length((suite, spec) in suite_and_spec(), msg in prop::collection::vec(any::<u8>(), 0..300)) {
        let ct = modes::mode_encrypt(&suite, &spec, &msg).unwrap();
        let bs = suite.block_bits() / 8;
        match spec.mode {
            Mode::Ctr => prop_assert_eq!(ct.len(), msg.len()),
            _ => prop_assert_eq!(ct.len(), (msg.len() / bs + 1) * bs),
        }
    }

    #[test]
    fn ctr_is_an_involution((suite, _) in suite_and_spec(), msg in prop::collection::vec(any::<u8>(), 0..300)) {
        let spec = ModeSpec::new(Mode::Ctr, Some(vec![7; suite.block_bits() / 8]));
        let once = modes::encrypt_raw(&suite, &spec, &msg).unwrap();
        prop_assert_eq!(modes::encrypt_raw(&suite, &spec, &once).unwrap(), msg);
    }

    #[test]
    fn pkcs7_inverse(msg in prop::collection::vec(any::<u8>(), 0..100), bs in 1usize..=32) {
        let padded = modes::pad_pkcs7(&msg, bs);
        prop_assert_eq!(padded.len() % bs, 0);
        prop_assert_eq!(modes::unpad_pkcs7(&padded, bs).unwrap(), msg);
    }

    #[test]
    fn hex_round_trip(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let text = bitops::hex_encode(&bytes);
        prop_assert_eq!(bitops::hex_decode(&text.to_uppercase()).unwrap(), bytes);
    }

    #[test]
    fn initial_permutation_inverts(x in any::<u64>()) {
        let v = BitVector::new(64, x as u128).unwrap();
        let there = bitops::permute(v, &tables::IP).unwrap();
        prop_assert_eq!(bitops::permute(there, &tables::IP_INV).unwrap(), v);
    }

    #[test]
    fn rotation_composes(x in 0u32..1 << 28, a in 0u32..28, b in 0u32..28) {
        let two = bitops::rotl(bitops::rotl(x, 28, a).unwrap(), 28, b).unwrap();
        prop_assert_eq!(two, bitops::rotl(x, 28, (a + b) % 28).unwrap());
    }

    #[test]
    fn des_complementation(key in any::<[u8; 8]>(), x in any::<u64>()) {
        let k = DesKey::new(key);
        let c = Des::new(&k).unwrap().encrypt_u64(x);
        prop_assert_eq!(Des::new(&k.complement()).unwrap().encrypt_u64(!x), !c);
    }

    #[test]
    fn effective_key_round_trip(e in 0u64..1 << 56) {
        prop_assert_eq!(DesKey::from_effective(e).effective(), e);
    }

    #[test]
    fn two_key_equals_three_key_with_k3_k1(k1 in any::<[u8; 8]>(), k2 in any::<[u8; 8]>(), x in any::<u64>()) {
        let (a, b) = (DesKey::new(k1), DesKey::new(k2));
        let two = Tdes::new(&TdesKey::two_key(a, b)).unwrap();
        let three = Tdes::new(&TdesKey::three_key(a, b, a)).unwrap();
        prop_assert_eq!(two.encrypt_u64(x), three.encrypt_u64(x));
        prop_assert_eq!(two.decrypt_u64(two.encrypt_u64(x)), x);
    }

    #[test]
    fn kat_serialization_round_trip(
        cases in prop::collection::vec((algorithm(), mode(), any::<[u8; 32]>(), any::<[u8; 16]>(), 1usize..4, 0u8..3), 1..6)
    ) {
        let cases: Vec<KatCase> = cases
            .into_iter()
            .enumerate()
            .map(|(id, ((algo, len), mode, key, iv, blocks, dir))| {
                let bs = algo.block_octets();
                let suite = CipherSuite::new(algo, &key[..len]).unwrap();
                let iv = mode.needs_iv().then(|| iv[..bs].to_vec());
                let plaintext: Vec<u8> = (0..blocks * bs).map(|i| i as u8).collect();
                let ciphertext = modes::encrypt_raw(&suite, &ModeSpec::new(mode, iv.clone()), &plaintext).unwrap();
                KatCase {
                    id,
                    count: Some(id as u64),
                    algorithm: algo,
                    mode,
                    key: key[..len].to_vec(),
                    iv,
                    plaintext,
                    ciphertext,
                    direction: [Direction::Encrypt, Direction::Decrypt, Direction::Both][dir as usize],
                }
            })
            .collect();
        let file = KatFile { source: "generated".into(), cases };
        let parsed = kat::parse_kat("generated", &file.serialize()).unwrap();
        prop_assert_eq!(&parsed, &file);
        prop_assert!(kat::run_kats(&parsed).all_passed());
    }
}
