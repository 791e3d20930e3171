//! The qubit encoders and the commitment blobs built from them.

use qbc::bits::BitString;
use qbc::boolfn::{make_ci_function, CiKind};
use qbc::encode::{
    blob2_encode, blob4_encode, encode_basis_committed, encode_keyed_random, encode_simple,
};
use qbc::quantum::StatePair;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qbc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pair = StatePair::with_cos(0.8)?;
    let a = BitString::from_bits([1, 0, 1, 1]);

    let simple = encode_simple(&a, &pair)?;
    println!("simple: {} slots for a = {a}", simple.len());

    let (blob, payloads) = encode_basis_committed(&a, 3, &mut rng)?;
    println!(
        "basis-committed: {} slots, payloads {:?}",
        blob.len(),
        payloads.iter().map(ToString::to_string).collect::<Vec<_>>()
    );

    let (blob, keys) = encode_keyed_random(&a, 5, &mut rng)?;
    println!("keyed: {} slots, {} basis keys", blob.len(), keys.len());

    let f = make_ci_function(6, 4, CiKind::LinearMask)?;
    let (blob, key) = blob2_encode(1, &f, 3, &pair, &mut rng)?;
    println!(
        "two-state blob: m={} n={} meta {:?}",
        blob.m(),
        blob.n(),
        blob.meta().public()
    );
    for (i, s) in key.a_strings.iter().enumerate() {
        println!("  a({i}) = {s}, F = {}", f.eval(s)?);
    }
    let (blob, key) = blob4_encode(0, &f, 3, &mut rng)?;
    println!(
        "four-state blob: {} slots, key digest {}",
        blob.len(),
        &key.digest()[..16]
    );
    Ok(())
}
