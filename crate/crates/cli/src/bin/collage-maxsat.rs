//! A small exact MAX-SAT solver for weighted CNF files with unit soft
//! weights: linear search from above over a totalizer on the relaxation
//! literals, with varisat answering each SAT query.
//!
//! Prints `o <cost>` per improvement, then `s OPTIMUM FOUND` (or
//! `s UNSATISFIABLE`) and a `v` line with every variable.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use collage::encode::read_wcnf;
use varisat::{ExtendFormula, Lit, Solver};

#[derive(Parser, Debug)]
#[command(version, about = "Exact MAX-SAT by linear search over a totalizer")]
struct Cli {
    /// Weighted CNF file, legacy or `h`-prefixed dialect.
    #[arg(value_name = "WCNF")]
    path: PathBuf,
}

struct Totalizer {
    /// `outputs[k]` is true whenever more than `k` inputs are true.
    outputs: Vec<Lit>,
}

impl Totalizer {
    fn build(solver: &mut Solver, inputs: &[Lit]) -> Totalizer {
        if inputs.len() <= 1 {
            return Totalizer { outputs: inputs.to_vec() };
        }
        let (l, r) = inputs.split_at(inputs.len() / 2);
        let a = Totalizer::build(solver, l).outputs;
        let b = Totalizer::build(solver, r).outputs;
        let outputs: Vec<Lit> = (0..inputs.len()).map(|_| solver.new_lit()).collect();
        // a_i ∧ b_j ⇒ o_{i+j+1}, with a_{-1}, b_{-1} read as true.
        for i in 0..=a.len() {
            for j in 0..=b.len() {
                if i + j == 0 {
                    continue;
                }
                let mut clause = vec![outputs[i + j - 1]];
                if i > 0 {
                    clause.push(!a[i - 1]);
                }
                if j > 0 {
                    clause.push(!b[j - 1]);
                }
                solver.add_clause(&clause);
            }
        }
        Totalizer { outputs }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let src = std::fs::read_to_string(&cli.path).with_context(|| format!("reading {}", cli.path.display()))?;
    let wf = read_wcnf(&src)?;
    let mut solver = Solver::new();
    let lit = |d: i32| Lit::from_dimacs(d as isize);
    let mut top = wf.num_vars as usize;
    for c in &wf.hard {
        solver.add_clause(&c.iter().map(|l| lit(l.dimacs())).collect::<Vec<_>>());
    }
    let mut relax = Vec::with_capacity(wf.soft.len());
    for (w, c) in &wf.soft {
        if *w != 1 {
            bail!("only unit soft weights are supported (found {w})");
        }
        if let [l] = c[..] {
            relax.push(!lit(l.dimacs()));
        } else {
            top += 1;
            let r = Lit::from_dimacs(top as isize);
            let mut clause: Vec<Lit> = c.iter().map(|l| lit(l.dimacs())).collect();
            clause.push(r);
            solver.add_clause(&clause);
            relax.push(r);
        }
    }
    // Allocate every numbered variable so totalizer literals come after them.
    while solver.new_var().index() + 1 < top {}
    let tot = Totalizer::build(&mut solver, &relax);

    let mut best: Option<Vec<bool>> = None;
    let mut assumptions = Vec::new();
    loop {
        solver.assume(&assumptions);
        if !solver.solve()? {
            break;
        }
        let model = solver.model().expect("satisfiable");
        let mut values = vec![false; model.len() + 1];
        for l in &model {
            values[l.index() + 1] = l.is_positive();
        }
        let cost = wf.soft.iter().filter(|(_, c)| !c.iter().any(|l| l.eval(&values))).count();
        println!("o {cost}");
        best = Some(values);
        if cost == 0 {
            break;
        }
        assumptions = vec![!tot.outputs[cost - 1]];
    }
    let Some(values) = best else {
        println!("s UNSATISFIABLE");
        return Ok(());
    };
    println!("s OPTIMUM FOUND");
    let mut line = String::from("v");
    for (v, &value) in values.iter().enumerate().take(wf.num_vars as usize + 1).skip(1) {
        line.push_str(&format!(" {}{v}", if value { "" } else { "-" }));
    }
    println!("{line} 0");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
