use matgroup_crypto::instance::{tree_eval, tree_random};
use matgroup_crypto::protocol::{aag_run, key_fingerprint, random_parties, AagConfig};

fn main() -> matgroup_crypto::Result<()> {
    let inst = tree_eval(&tree_random(40, 5)?)?;
    let parties = random_parties(&inst, 2, 3, 8, 11)?;
    let cfg = AagConfig {
        instance: inst,
        gens_a: parties[0].gens.clone(),
        gens_b: parties[1].gens.clone(),
        secret_a: parties[0].secret.clone(),
        secret_b: parties[1].secret.clone(),
    };
    let out = aag_run(&cfg)?;

    for rec in &out.transcript.records {
        println!("round {} {} -> {}: {} ({} bytes)", rec.round, rec.sender, rec.receiver, rec.kind, rec.payload.len());
    }
    println!("Alice: {}", key_fingerprint(&out.key_a));
    println!("Bob:   {}", key_fingerprint(&out.key_b));
    for w in &out.warnings {
        println!("warning: {w}");
    }
    assert_eq!(out.key_a, out.key_b);
    Ok(())
}
