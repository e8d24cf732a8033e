use crate::output::Report;
use anyhow::{bail, Result};
use clap::Args;
use stein_bounds::selfcheck::{find, suites, Suite};

const COLUMNS: &[&str] = &["suite", "cases", "pass", "detail"];

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Print the suites without running them.
    #[arg(long)]
    list: bool,
    /// Run only these suites.
    names: Vec<String>,
}

/// `None` when only listing.
pub fn run(args: SelfcheckArgs) -> Result<Option<Report>> {
    if args.list {
        for s in suites() {
            println!("{:<28} {}", s.name, s.description);
        }
        return Ok(None);
    }
    let chosen: Vec<&Suite> = if args.names.is_empty() {
        suites().iter().collect()
    } else {
        args.names
            .iter()
            .map(|n| match find(n) {
                Some(s) => Ok(s),
                None => bail!("unknown suite '{n}'; see `selfcheck --list`"),
            })
            .collect::<Result<_>>()?
    };
    let mut report = Report::new("selfcheck", COLUMNS);
    for s in chosen {
        let out = s.run();
        report.pass &= out.pass;
        report.say(format!("{:<28} {}  {}", out.name, if out.pass { "PASS" } else { "FAIL" }, out.detail));
        report.push(vec![out.name.into(), (out.cases as u64).into(), out.pass.into(), out.detail.into()]);
    }
    Ok(Some(report))
}
