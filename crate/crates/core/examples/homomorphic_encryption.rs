//! Encrypt two messages over S_3, multiply the ciphertexts, decrypt the product.

use matgroup_crypto::homcrypt::{hc_decrypt, hc_encrypt, hc_keygen, Presentation};
use matgroup_crypto::words::FreeWord;

fn main() -> matgroup_crypto::Result<()> {
    let p = Presentation::symmetric3();
    let (pk, sk) = hc_keygen(&p, 3)?;
    println!("public key words:");
    for w in &pk.x_words {
        println!("  {}", w.to_json());
    }

    let m1 = FreeWord::new(2, &[1, 2])?;
    let m2 = FreeWord::new(2, &[2, 2, -1])?;
    let c1 = hc_encrypt(&pk, &m1, 1)?;
    let c2 = hc_encrypt(&pk, &m2, 2)?;
    println!("|c1| = {}, |c2| = {}", c1.len(), c2.len());

    let d = hc_decrypt(&sk, &c1.mul(&c2)?)?;
    let want = m1.mul(&m2)?;
    println!("D(c1 c2) = {} (length {})", d.to_json(), d.len());
    println!("equals m1 m2 = {} in S_3: {:?}", want.to_json(), p.model_equal(&d, &want)?);
    Ok(())
}
