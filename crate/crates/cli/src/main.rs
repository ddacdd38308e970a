use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use distq_core::bench::{
    self, compile, load_circuit, load_hardware, verify, BenchReport, CompileOptions, Fault,
    PipelineError, CSV_COLUMNS, SCHEMA_VERSION,
};
use distq_core::emit_qasm;

const EXIT_ERROR: u8 = 1;
const EXIT_CAPACITY: u8 = 2;
const EXIT_NOT_EQUIVALENT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "distq",
    version,
    about = "Distribute quantum circuits over several QPUs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Hardware spec (TOML). Defaults to two auto-sized QPUs with one link.
    #[arg(long, value_name = "PATH")]
    hardware: Option<PathBuf>,
    /// Window width in time units; defaults to the EPR generation period.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn options(&self) -> CompileOptions {
        CompileOptions {
            dt: self.dt,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile one circuit and report inter-QPU statistics.
    Compile {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Lower teleports and remote gates to EPR circuits with corrections.
        #[arg(long)]
        expand_gadgets: bool,
        /// Write the expanded circuit as OpenQASM.
        #[arg(long, value_name = "PATH", requires = "expand_gadgets")]
        emit: Option<PathBuf>,
        /// Write the JSON report here instead of standard output.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Compile every `.qasm` file in a directory over several seeds.
    Bench {
        corpus: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Report path; `.csv` selects CSV, anything else JSON.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Compile with gadget expansion and check equivalence by simulation.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, hide = true)]
        fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    DropCorrection,
}

enum Failure {
    Pipeline(PipelineError),
    Other(String),
    NotEquivalent,
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display())))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn name_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn cmd_compile(
    input: &Path,
    common: &Common,
    expand: bool,
    emit: Option<&Path>,
    report: Option<&Path>,
) -> Result<(), Failure> {
    let spec = load_hardware(common.hardware.as_deref())?;
    let circuit = load_circuit(input)?;
    let c = compile(&name_of(input), &circuit, &spec, &common.options())?;
    if let Some(path) = emit {
        let text = emit_qasm(&c.expanded.circuit).map_err(PipelineError::from)?;
        write_out(Some(path), &text)?;
    }
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "record": c.record,
        "initial_layout": c.expanded.initial_layout,
        "final_layout": c.expanded.final_layout,
    });
    if expand {
        doc["expanded"] = json!({
            "num_slots": c.expanded.circuit.num_qubits,
            "num_gates": c.expanded.circuit.len(),
            "epr_pairs": c.expanded.epr_pairs(),
        });
    }
    write_out(
        report,
        &serde_json::to_string_pretty(&doc).expect("serialisable"),
    )
}

fn write_csv(report: &BenchReport, out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for c in &report.circuits {
        w.write_record(c.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_bench(
    dir: &Path,
    common: &Common,
    repeats: usize,
    report: Option<&Path>,
) -> Result<(), Failure> {
    if repeats == 0 {
        return Err(Failure::Other("--repeats must be at least 1".into()));
    }
    let spec = load_hardware(common.hardware.as_deref())?;
    let r = bench::bench(dir, &spec, repeats, common.seed, common.dt)?;
    for c in &r.circuits {
        if let Some(e) = &c.error {
            eprintln!("{}: {e}", c.name);
        }
    }
    let is_csv = report.is_some_and(|p| p.extension().is_some_and(|x| x == "csv"));
    if is_csv {
        let path = report.expect("checked");
        let file = std::fs::File::create(path)
            .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
        write_csv(&r, file).map_err(|e| Failure::Other(e.to_string()))?;
    } else {
        write_out(
            report,
            &serde_json::to_string_pretty(&r).expect("serialisable"),
        )?;
    }
    if r.succeeded() == 0 {
        return Err(Failure::Other("no circuit compiled".into()));
    }
    Ok(())
}

fn cmd_verify(
    input: &Path,
    common: &Common,
    tol: f64,
    fault: Option<FaultArg>,
) -> Result<(), Failure> {
    let spec = load_hardware(common.hardware.as_deref())?;
    let circuit = load_circuit(input)?;
    let fault = fault.map(|FaultArg::DropCorrection| Fault::DropCorrection);
    let v = verify(
        &name_of(input),
        &circuit,
        &spec,
        &common.options(),
        tol,
        fault,
    )?;
    let r = &v.report;
    println!(
        "{}: {} inputs, {} branches, min fidelity {:.12}",
        name_of(input),
        r.inputs_checked,
        r.branches_checked,
        r.min_fidelity
    );
    if r.equivalent {
        println!("equivalent");
        return Ok(());
    }
    if let Some(f) = &r.failure {
        let bits: String = f.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        eprintln!(
            "not equivalent: input {}, branch bits {bits}, fidelity {:.12}: {}",
            f.input, f.fidelity, f.reason
        );
    }
    Err(Failure::NotEquivalent)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile {
            input,
            common,
            expand_gadgets,
            emit,
            report,
        } => cmd_compile(
            input,
            common,
            *expand_gadgets,
            emit.as_deref(),
            report.as_deref(),
        ),
        Command::Bench {
            corpus,
            common,
            repeats,
            report,
        } => cmd_bench(corpus, common, *repeats, report.as_deref()),
        Command::Verify {
            input,
            common,
            tol,
            fault,
        } => cmd_verify(input, common, *tol, *fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotEquivalent) => ExitCode::from(EXIT_NOT_EQUIVALENT),
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_capacity() {
                EXIT_CAPACITY
            } else {
                EXIT_ERROR
            })
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
