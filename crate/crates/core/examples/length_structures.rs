//! Finite Lorentzian length structures: derived relations and time
//! separation of a curve catalog, including a timelike loop.

use lorcone::llstructure::{check_bare_llspace, CurveCatalog};

const CATALOG: &str = "\
point a
point b
point c
point d
ab a b 1.0 timelike
bc b c 0.5 timelike
ac a c 1.2 timelike
cd c d 0 causal
";

fn show(cat: &CurveCatalog) {
    let tau = cat.derived_tau();
    for (i, row) in tau.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|t| format!("{:>11}", t.to_string())).collect();
        println!("  {} {}", cat.points()[i], cells.join(" "));
    }
    let v = check_bare_llspace(cat);
    println!("  {} triples checked, {} failures", v.triples_checked, v.failures.len());
}

fn main() -> lorcone::Result<()> {
    let mut cat = CurveCatalog::parse(CATALOG)?;
    println!("acyclic catalog:");
    show(&cat);
    cat.add_curve("db", "d", "b", 0.1, lorcone::llstructure::CurveClass::Timelike)?;
    println!("with a timelike loop b -> c -> d -> b:");
    show(&cat);
    Ok(())
}
