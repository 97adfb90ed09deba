//! Parse an INI configuration and run it the same way the command-line tool
//! does.

use hsmor::cli::execute;
use hsmor::parse_config;

const CONFIG: &str = "\
[objects]
A = 1,1,0
B = 0,0,1
Dr = 0,0,0

[metric]
kind = xr
b = 1.5

[task]
kind = aura
directions = fibonacci:200
";

fn main() -> hsmor::Result<()> {
    let mut cfg = parse_config(CONFIG)?;
    cfg.out_dir = Some(std::env::temp_dir().join("hsmor-run-config"));
    cfg.workers = Some(hsmor::parallel::default_workers());
    for path in execute(&cfg, CONFIG)? {
        println!("== {}", path.display());
        let text = std::fs::read_to_string(&path)?;
        for line in text.lines().filter(|l| !l.starts_with("radius.")).take(14) {
            println!("{line}");
        }
    }

    let broken = CONFIG.replace("b = 1.5", "b = 1.0");
    match parse_config(&broken) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("\nrejected as expected: {e} (exit code {})", e.exit_code()),
    }
    Ok(())
}
