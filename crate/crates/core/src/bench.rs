//! End-to-end pipeline, report records and the corpus benchmark runner.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{
    count_inter_qpu, count_two_qubit, decompose_to_basis, schedule_asap, Circuit, CircuitError,
    Gate,
};
use crate::gadgets::{expand_program, ExpandedProgram, GadgetError};
use crate::mapper::{
    global_assign, local_optimize, trivial_partition, Assignment, Hardware, HardwareSpec, MapError,
    MappedProgram,
};
use crate::qasm::{parse_qasm, QasmError};
use crate::sim::{equivalent_mapped, EquivalenceReport, QubitMap, SimError};

pub const SCHEMA_VERSION: u32 = 1;

/// Widest circuit `verify` accepts; its expansion on the bundled hardware fits
/// the simulator.
pub const VERIFY_MAX_QUBITS: usize = 10;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] QasmError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("verify supports at most {max} data qubits, circuit has {n}")]
    TooWideToVerify { n: usize, max: usize },
    #[error("no .qasm files in {0}")]
    EmptyCorpus(PathBuf),
}

impl PipelineError {
    /// True when the hardware cannot hold the circuit at all.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            PipelineError::Map(MapError::TooWide { .. } | MapError::EprSlotExhaustion { .. })
                | PipelineError::Gadget(GadgetError::EprSlotExhaustion { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompileOptions {
    /// Window width; `None` uses the hardware's EPR generation period.
    pub dt: Option<f64>,
    pub seed: u64,
}

/// One compilation of one circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub num_qubits: usize,
    pub base_total_2q: usize,
    pub base_interqpu_trivial: usize,
    pub global_interqpu: usize,
    /// Remote cx and teleports counted as one two-qubit operation each.
    pub local_total_2q_logical: usize,
    /// Physical cx after gadget expansion, EPR generation included.
    pub local_total_2q_expanded: usize,
    pub local_interqpu: usize,
    pub remote_gates: usize,
    pub teleports: usize,
    pub epr_consumed: usize,
    pub windows: usize,
    pub windows_over_epr_limit: usize,
    pub compile_runtime_seconds: f64,
    pub seed: u64,
    pub dt: f64,
    pub hardware_fingerprint: String,
}

#[derive(Debug, Clone)]
pub struct Compiled {
    /// Input lowered to {rx, rz, h, cx} plus measurement and corrections.
    pub lowered: Circuit,
    pub hardware: Hardware,
    pub global: Assignment,
    pub mapped: MappedProgram,
    pub expanded: ExpandedProgram,
    pub record: Record,
}

/// decompose, schedule, global pass, local pass, gadget expansion.
pub fn compile(
    name: &str,
    circuit: &Circuit,
    spec: &HardwareSpec,
    opts: &CompileOptions,
) -> Result<Compiled, PipelineError> {
    let hardware = spec.resolve(circuit.num_qubits)?;
    let dt = opts.dt.unwrap_or(hardware.durations.epr_period);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(MapError::BadWindow(dt).into());
    }
    let started = Instant::now();
    let lowered = decompose_to_basis(circuit)?;
    let global = global_assign(&lowered, &hardware, opts.seed)?;
    let sched = schedule_asap(&lowered, &hardware.durations);
    let mapped = local_optimize(&sched, &hardware, &global, dt, opts.seed)?;
    let expanded = expand_program(&mapped)?;
    let runtime = started.elapsed().as_secs_f64();

    let trivial = trivial_partition(lowered.num_qubits, &hardware)?;
    let record = Record {
        name: name.to_string(),
        num_qubits: circuit.num_qubits,
        base_total_2q: count_two_qubit(&lowered),
        base_interqpu_trivial: count_inter_qpu(&lowered, trivial.assignment())
            .expect("trivial map covers every qubit"),
        global_interqpu: count_inter_qpu(&lowered, &global).expect("global map covers every qubit"),
        local_total_2q_logical: count_two_qubit(&mapped.physical_circuit()),
        local_total_2q_expanded: count_two_qubit(&expanded.circuit),
        local_interqpu: mapped.epr_consumed(),
        remote_gates: mapped.remote_gates(),
        teleports: mapped.teleports(),
        epr_consumed: expanded.epr_pairs(),
        windows: mapped.windows.len(),
        windows_over_epr_limit: mapped.windows_over_limit(),
        compile_runtime_seconds: runtime,
        seed: opts.seed,
        dt,
        hardware_fingerprint: spec.fingerprint(),
    };
    Ok(Compiled {
        lowered,
        hardware,
        global,
        mapped,
        expanded,
        record,
    })
}

/// Deliberate corruption of an expanded program, for exercising `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Remove the first classically controlled Z.
    DropCorrection,
}

pub fn inject_fault(expanded: &mut ExpandedProgram, fault: Fault) {
    match fault {
        Fault::DropCorrection => {
            let c = &expanded.circuit;
            let Some(at) = c.gates().iter().position(|g| matches!(g, Gate::CcZ { .. })) else {
                return;
            };
            let mut out = c.empty_like();
            out.extend(
                c.gates()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != at)
                    .map(|(_, g)| g.clone()),
            )
            .expect("subset of a valid circuit");
            // EPR link indices after the removed gate shift down by one.
            for i in &mut expanded.epr_links {
                if *i > at {
                    *i -= 1;
                }
            }
            expanded.circuit = out;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub compiled: Compiled,
    pub report: EquivalenceReport<f64>,
}

/// Compiles with gadget expansion and checks the result against `circuit` on
/// every basis state and the six axis product states.
pub fn verify(
    name: &str,
    circuit: &Circuit,
    spec: &HardwareSpec,
    opts: &CompileOptions,
    tol: f64,
    fault: Option<Fault>,
) -> Result<Verification, PipelineError> {
    if circuit.num_qubits > VERIFY_MAX_QUBITS {
        return Err(PipelineError::TooWideToVerify {
            n: circuit.num_qubits,
            max: VERIFY_MAX_QUBITS,
        });
    }
    let mut compiled = compile(name, circuit, spec, opts)?;
    if let Some(f) = fault {
        inject_fault(&mut compiled.expanded, f);
    }
    let map = QubitMap {
        input: compiled.expanded.initial_layout.clone(),
        output: compiled.expanded.final_layout.clone(),
    };
    let report = equivalent_mapped(circuit, &compiled.expanded.circuit, &map, tol)?;
    Ok(Verification { compiled, report })
}

pub fn load_circuit(path: &Path) -> Result<Circuit, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_qasm(&text)?)
}

pub fn load_hardware(path: Option<&Path>) -> Result<HardwareSpec, PipelineError> {
    match path {
        None => Ok(HardwareSpec::bundled()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| PipelineError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Ok(HardwareSpec::from_toml(&text)?)
        }
    }
}

/// `.qasm` files in `dir`, sorted by file name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let io = |source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(PipelineError::EmptyCorpus(dir.to_path_buf()));
    }
    Ok(files)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub mean: f64,
    /// Sample standard deviation; absent for a single run.
    pub std: Option<f64>,
}

impl Spread {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = (xs.len() > 1)
            .then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitSummary {
    pub name: String,
    /// Set when the circuit failed to load or compile; `runs` is then empty.
    pub error: Option<String>,
    pub runs: Vec<Record>,
    pub global_interqpu: Option<Spread>,
    pub local_interqpu: Option<Spread>,
    pub local_total_2q_logical: Option<Spread>,
    pub local_total_2q_expanded: Option<Spread>,
    pub teleports: Option<Spread>,
    pub compile_runtime_seconds: Option<Spread>,
}

impl CircuitSummary {
    fn new(name: String, result: Result<Vec<Record>, PipelineError>) -> Self {
        let (runs, error) = match result {
            Ok(r) => (r, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let spread = |f: fn(&Record) -> f64| {
            (!runs.is_empty()).then(|| Spread::of(&runs.iter().map(f).collect::<Vec<_>>()))
        };
        Self {
            global_interqpu: spread(|r| r.global_interqpu as f64),
            local_interqpu: spread(|r| r.local_interqpu as f64),
            local_total_2q_logical: spread(|r| r.local_total_2q_logical as f64),
            local_total_2q_expanded: spread(|r| r.local_total_2q_expanded as f64),
            teleports: spread(|r| r.teleports as f64),
            compile_runtime_seconds: spread(|r| r.compile_runtime_seconds),
            name,
            error,
            runs,
        }
    }

    pub fn first(&self) -> Option<&Record> {
        self.runs.first()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub hardware_fingerprint: String,
    pub repeats: usize,
    pub circuits: Vec<CircuitSummary>,
}

impl BenchReport {
    pub fn succeeded(&self) -> usize {
        self.circuits.iter().filter(|c| c.error.is_none()).count()
    }
}

/// Compiles every corpus file with seeds `base_seed .. base_seed + repeats`.
pub fn bench(
    dir: &Path,
    spec: &HardwareSpec,
    repeats: usize,
    base_seed: u64,
    dt: Option<f64>,
) -> Result<BenchReport, PipelineError> {
    let files = corpus_files(dir)?;
    let circuits = files
        .par_iter()
        .map(|path| {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let result = load_circuit(path).and_then(|c| {
                (0..repeats as u64)
                    .map(|r| {
                        let opts = CompileOptions {
                            dt,
                            seed: base_seed + r,
                        };
                        compile(&name, &c, spec, &opts).map(|c| c.record)
                    })
                    .collect()
            });
            CircuitSummary::new(name, result)
        })
        .collect();
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        hardware_fingerprint: spec.fingerprint(),
        repeats,
        circuits,
    })
}

/// Column order of the bench CSV.
pub const CSV_COLUMNS: [&str; 17] = [
    "name",
    "num_qubits",
    "base_total_2q",
    "base_interqpu_trivial",
    "global_interqpu_mean",
    "global_interqpu_std",
    "local_interqpu_mean",
    "local_interqpu_std",
    "local_total_2q_logical_mean",
    "local_total_2q_expanded_mean",
    "teleports_mean",
    "compile_runtime_seconds_mean",
    "repeats",
    "seed",
    "dt",
    "hardware_fingerprint",
    "error",
];

impl CircuitSummary {
    /// One CSV row in [`CSV_COLUMNS`] order.
    pub fn csv_row(&self) -> Vec<String> {
        let opt = |s: Option<Spread>, std: bool| match s {
            Some(s) if std => s.std.map(|x| x.to_string()).unwrap_or_default(),
            Some(s) => s.mean.to_string(),
            None => String::new(),
        };
        let first = self.first();
        let field = |f: fn(&Record) -> String| first.map(f).unwrap_or_default();
        vec![
            self.name.clone(),
            field(|r| r.num_qubits.to_string()),
            field(|r| r.base_total_2q.to_string()),
            field(|r| r.base_interqpu_trivial.to_string()),
            opt(self.global_interqpu, false),
            opt(self.global_interqpu, true),
            opt(self.local_interqpu, false),
            opt(self.local_interqpu, true),
            opt(self.local_total_2q_logical, false),
            opt(self.local_total_2q_expanded, false),
            opt(self.teleports, false),
            opt(self.compile_runtime_seconds, false),
            self.runs.len().to_string(),
            field(|r| r.seed.to_string()),
            field(|r| r.dt.to_string()),
            field(|r| r.hardware_fingerprint.clone()),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toffoli3() -> Circuit {
        parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\nccx q[0],q[1],q[2];\n")
            .unwrap()
    }

    #[test]
    fn spread() {
        let s = Spread::of(&[1.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std.unwrap() - 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(Spread::of(&[4.0]).std, None);
    }

    #[test]
    fn compile_toffoli() {
        let c = compile(
            "tof",
            &toffoli3(),
            &HardwareSpec::bundled(),
            &CompileOptions::default(),
        )
        .unwrap();
        let r = &c.record;
        assert_eq!(r.base_total_2q, 6);
        assert!(r.global_interqpu <= r.base_interqpu_trivial);
        assert!(r.local_interqpu <= r.global_interqpu);
        assert_eq!(r.epr_consumed, r.local_interqpu);
        assert!(c.expanded.cross_qpu_gates().is_empty());
        assert_eq!(r.dt, 200.0);
        assert_eq!(
            CSV_COLUMNS.len(),
            CircuitSummary::new("x".into(), Ok(vec![r.clone()]))
                .csv_row()
                .len()
        );
    }

    #[test]
    fn verify_toffoli_and_fault() {
        let spec = HardwareSpec::bundled();
        let opts = CompileOptions::default();
        let v = verify("tof", &toffoli3(), &spec, &opts, 1e-9, None).unwrap();
        assert!(v.report.equivalent, "{:?}", v.report.failure);
        if v.compiled.record.local_interqpu > 0 {
            let bad = verify(
                "tof",
                &toffoli3(),
                &spec,
                &opts,
                1e-9,
                Some(Fault::DropCorrection),
            )
            .unwrap();
            assert!(!bad.report.equivalent);
        }
    }

    #[test]
    fn capacity_error_is_flagged() {
        let spec = HardwareSpec::from_toml(
            "[[qpus]]\nid = 0\ndata_capacity = 2\nepr_slots = 1\n\
             [[qpus]]\nid = 1\ndata_capacity = 2\nepr_slots = 1\n\
             [[links]]\nqpu_a = 0\nqpu_b = 1\nchannels = 1\n",
        )
        .unwrap();
        let err = compile(
            "wide",
            &Circuit::new(30, 0),
            &spec,
            &CompileOptions::default(),
        )
        .unwrap_err();
        assert!(err.is_capacity());
    }
}
