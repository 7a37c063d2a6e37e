//! Runs every reproduction target and prints one line per check.

use mechbench::reproduce::{reproduce, Target};

fn main() -> mechbench::Result<()> {
    let mut failed = 0;
    for target in Target::ALL {
        let run = reproduce(target)?;
        for line in run.lines() {
            println!("{line}");
        }
        failed += run.checks.iter().filter(|c| !c.passed).count();
        println!("{target}: {:.2?}", run.elapsed);
    }
    println!("{failed} failing checks");
    Ok(())
}
