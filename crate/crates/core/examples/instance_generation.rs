//! Generate a random trapdoored instance and look at what is public.

use matgroup_crypto::instance::{subgroup_sample, tree_eval, tree_random};

fn main() -> matgroup_crypto::Result<()> {
    let tree = tree_random(40, 3)?;
    let inst = tree_eval(&tree)?;

    println!("secret tree ({} bytes of JSON):", tree.canonical_json().len());
    println!("{}", tree.canonical_json());
    println!();
    println!("public: degree {} over {}, {} generators", inst.n, inst.ring, inst.gens.len());
    println!("public JSON is {} bytes", inst.public_json().len());
    println!("fingerprint {}", inst.fingerprint());

    let sample = subgroup_sample(&tree, 1)?;
    println!("subgroup sample: {} + {} generators", sample.gens_a.len(), sample.gens_b.len());
    for w in &sample.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
