//! The `report` subcommand: both truncation ladders, their checks, and the
//! CSV/SVG artifacts.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::Args;
use lattice_gap::cheeger::{approx, expander_verdict, gap_certificate, Verdict, VerdictRecord};
use lattice_gap::generators::{nagao_cusp, CuspFamily, RayBlocksFamily};
use lattice_gap::report::{emit_report, format_exact, format_significant, rows_from_verdict};
use lattice_gap::{int, Rational};

use crate::{check_ladder, invalid, positive_rational, Failure, Outcome, SolverArgs};

#[derive(Args)]
pub(crate) struct ReportArgs {
    /// Directory for `ladder.csv` and `ladder.svg`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long = "N", value_delimiter = ',', default_value = "5,10,20")]
    ladder: Vec<u32>,
    /// Threshold for the ray-blocks verdict.
    #[arg(long, value_parser = positive_rational, default_value = "1/10")]
    eps: Rational,
    #[command(flatten)]
    solver: SolverArgs,
}

struct Checks {
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, name: &str, ok: bool) {
        println!("check {name}: {}", if ok { "ok" } else { "FAIL" });
        if !ok {
            self.failed.push(name.to_string());
        }
    }
}

fn print_table(rec: &VerdictRecord) {
    println!("{}", rec.summary());
    println!("N,dim,h_upper,h_exact,certified_lower,lambda");
    let opt = |r: &Option<Rational>| r.as_ref().map(format_exact).unwrap_or_else(|| "-".into());
    for e in &rec.entries {
        println!(
            "{},{},{},{},{},{}",
            e.n,
            e.dimension,
            format_exact(&e.h_upper),
            opt(&e.h_exact),
            opt(&e.certified_lower),
            format_significant(e.lambda, 12)
        );
    }
    for w in &rec.warnings {
        println!("warning: {w}");
    }
}

pub(crate) fn report(args: &ReportArgs) -> Outcome {
    check_ladder(&args.ladder)?;
    if args.ladder.first() == Some(&0) {
        return Err(invalid(anyhow!("truncation sizes start at 1")));
    }
    if args.q < 2 {
        return Err(invalid(anyhow!("q must be at least 2, got {}", args.q)));
    }
    let q = args.q;
    let opts = args.solver.options();
    let mut checks = Checks { failed: Vec::new() };

    println!("== ray-blocks (non-expansion evidence)");
    let rays = expander_verdict(&RayBlocksFamily { q }, &args.ladder, &args.eps, &opts).context("ray-blocks ladder")?;
    print_table(&rays);
    let witness_ok = rays
        .entries
        .iter()
        .all(|e| e.h_upper == Rational::new((q as i64 + 1).into(), (2 * e.n as i64 + 1).into()));
    checks.check("h_upper(N) = (q+1)/(2N+1)", witness_ok);
    checks.check("lambda(N) strictly decreasing", rays.entries.windows(2).all(|w| w[1].lambda < w[0].lambda));
    checks.check("ray-blocks verdict is no-expansion-witness", rays.verdict == Verdict::NoExpansionWitness);

    println!();
    println!("== cusp (expansion evidence)");
    let mut certified = Vec::new();
    for &n in &args.ladder {
        let cusp = nagao_cusp(q, n).map_err(invalid)?;
        let cert = gap_certificate(&cusp.diagram, &cusp.core, &cusp.c, &cusp.d).context("cusp certificate")?;
        certified.push(cert.certified);
    }
    let eps = certified.iter().min().cloned().expect("nonempty ladder");
    let cusps = expander_verdict(&CuspFamily { q }, &args.ladder, &eps, &opts).context("cusp ladder")?;
    print_table(&cusps);
    checks.check("certified lower bound > 0", eps > int(0));
    let exact_ok = cusps.entries.iter().all(|e| match (&e.h_exact, &e.certified_lower) {
        (Some(h), Some(c)) => h >= c,
        _ => true,
    });
    checks.check("exact h >= certified bound", exact_ok);
    // conductance is at least h / max indeg, so λ ≥ (h / max indeg)² / 2 on every rung
    let floor_ok = cusps.entries.iter().all(|e| {
        let phi = approx(&e.certified_lower.clone().unwrap_or_else(|| eps.clone())) / approx(&e.max_indeg);
        println!("N={}: lambda {} >= {}", e.n, format_significant(e.lambda, 6), format_significant(phi * phi / 2.0, 6));
        e.lambda >= phi * phi / 2.0
    });
    checks.check("lambda(N) >= (certified / max indeg)^2 / 2", floor_ok);
    checks.check("cusp verdict is expansion-consistent", cusps.verdict == Verdict::ExpansionConsistent);

    let mut rows = rows_from_verdict(&rays);
    rows.extend(rows_from_verdict(&cusps));
    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let csv = args.out_dir.join("ladder.csv");
    let svg = args.out_dir.join("ladder.svg");
    emit_report(&rows, &csv, &svg).context("writing report")?;
    println!();
    println!("wrote {} and {}", csv.display(), svg.display());

    if checks.failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(checks.failed.join("; ")))
    }
}
