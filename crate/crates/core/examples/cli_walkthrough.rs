//! Drives the command line in-process, the same way the `matgroup` binary does.

use matgroup_crypto::cli::execute;

fn main() {
    let dir = std::env::temp_dir().join("matgroup-walkthrough");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let f = |name: &str| dir.join(name).display().to_string();
    let steps = [
        vec!["gen".to_string(), "--seed".into(), "7".into(), "--pub".into(), f("pub.json"), "--sec".into(), f("sec.json")],
        vec!["sample".into(), "--pub".into(), f("pub.json"), "--out".into(), f("elem.json")],
        vec!["member".into(), "--sec".into(), f("sec.json"), "--elem".into(), f("elem.json")],
        vec!["aag".into(), "--pub".into(), f("pub.json"), "--seed".into(), "1".into()],
        vec!["oracle".into(), "enum".into(), "--pub".into(), f("pub.json")],
    ];
    for args in steps {
        println!("$ matgroup {}", args.join(" "));
        let (code, out) = execute(args);
        print!("{out}");
        println!("(exit {code})");
    }
}
