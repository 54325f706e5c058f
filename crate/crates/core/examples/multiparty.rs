//! Commutator key agreement among several parties, with per-party costs.

use matgroup_crypto::instance::{tree_eval, tree_random};
use matgroup_crypto::protocol::{key_fingerprint, multiparty_run, random_parties};

fn main() -> matgroup_crypto::Result<()> {
    let inst = tree_eval(&tree_random(40, 9)?)?;
    for s in [2, 3, 5, 8] {
        let parties = random_parties(&inst, s, 2, 6, s as u64)?;
        let out = multiparty_run(s, &parties)?;
        let agree = out.keys.iter().all(|k| *k == out.keys[0]);
        println!(
            "s = {s}: agree {agree}, {} messages, ops {:?}, key {}",
            out.transcript.len(),
            out.op_counts,
            &key_fingerprint(&out.keys[0])[..16]
        );
        for w in &out.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
