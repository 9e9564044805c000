use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use adapt_qsci::adapt::{
    build_pool, run_adapt_qsci, AdaptConfig, AdaptIterationRecord, AdaptOutcome, NoiselessSource, OperatorPool,
};
use adapt_qsci::chem::{load_system, serialize_qubit_hamiltonian, HamiltonianFormat, MolecularSystem};
use adapt_qsci::mitigation::{MitigationDiagnostics, NoiseModel, NoisySampler};
use adapt_qsci::pauli::SparseStateVec;
use adapt_qsci::qsci::{amplitude_spectrum, exact_ground_state, r_delta, SelectionPolicy};
use adapt_qsci::resources::{sorted_insertion, vqe_shot_estimate, vqe_total_estimate};
use adapt_qsci::sim::StateVector;

use crate::config::RunConfig;

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Algorithm(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Algorithm(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Algorithm(e) => e,
        }
    }
}

pub type CmdResult<T = ()> = std::result::Result<T, Failure>;

pub trait Classify<T> {
    fn input(self, ctx: impl FnOnce() -> String) -> CmdResult<T>;
    fn algo(self, ctx: impl FnOnce() -> String) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for std::result::Result<T, E> {
    fn input(self, ctx: impl FnOnce() -> String) -> CmdResult<T> {
        self.map_err(|e| Failure::Input(e.into().context(ctx())))
    }

    fn algo(self, ctx: impl FnOnce() -> String) -> CmdResult<T> {
        self.map_err(|e| Failure::Algorithm(e.into().context(ctx())))
    }
}

fn load(cfg: &RunConfig) -> CmdResult<MolecularSystem> {
    let path = &cfg.hamiltonian.path;
    let format = cfg.format().map_err(Failure::Input)?;
    load_system(path, format).input(|| format!("cannot load Hamiltonian {}", path.display()))
}

fn exact(system: &MolecularSystem) -> CmdResult<(f64, SparseStateVec)> {
    exact_ground_state(system).algo(|| "exact sector diagonalization failed".into())
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> CmdResult {
    fs::write(path, contents).input(|| format!("cannot write {}", path.display()))
}

fn out_dir(cfg: &RunConfig) -> CmdResult<&Path> {
    let dir = cfg.output.dir.as_path();
    fs::create_dir_all(dir).input(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn effective_r(cfg: &RunConfig, gs: &SparseStateVec) -> CmdResult<usize> {
    match (cfg.qsci.r_max, cfg.qsci.delta) {
        (Some(r), None) => Ok(r),
        (None, Some(d)) => r_delta(gs, d).algo(|| format!("R_delta({d}) failed")),
        _ => Err(Failure::Input(anyhow!("set exactly one of qsci.r_max and qsci.delta"))),
    }
}

struct SeedRun {
    seed: u64,
    outcome: AdaptOutcome,
    diagnostics: Vec<MitigationDiagnostics>,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    seed: u64,
    config_hash: &'a str,
    #[serde(flatten)]
    record: &'a AdaptIterationRecord,
}

fn run_seed(
    system: &MolecularSystem,
    pool: &OperatorPool,
    adapt: &AdaptConfig,
    cfg: &RunConfig,
    seed: u64,
    verbose: bool,
) -> adapt_qsci::Result<SeedRun> {
    let shots = cfg.run.shots;
    let (n, ne, sz) = (system.n_qubits(), system.n_electrons(), system.sz_doubled());
    let (outcome, diagnostics) = match &cfg.noise {
        None => {
            let mut src = NoiselessSource { shots, seed };
            (run_adapt_qsci(system, pool, adapt, &mut src)?, Vec::new())
        }
        Some(noise) => {
            let model = NoiseModel::new(noise.p_2q, noise.p_m)?;
            let mut s = if noise.mitigate {
                NoisySampler::mitigated(model, n, shots, seed, ne, sz)?
            } else {
                NoisySampler::raw(model, noise.fold, shots, seed, ne, sz)
            };
            s.record_diagnostics = verbose;
            let out = run_adapt_qsci(system, pool, adapt, &mut s)?;
            (out, s.diagnostics)
        }
    };
    if verbose {
        for w in outcome.records.windows(2) {
            if w[1].energy > w[0].energy + adapt.conv_tol {
                eprintln!("seed {seed}: energy rose from {} to {} at k = {}", w[0].energy, w[1].energy, w[1].k);
            }
        }
        for r in &outcome.records {
            eprintln!(
                "seed {seed} k {} E {:.10} R {} op {} theta {}",
                r.k,
                r.energy,
                r.subspace_dim,
                r.operator.as_deref().unwrap_or("-"),
                r.theta.map_or("-".to_string(), |t| t.to_string())
            );
        }
    }
    Ok(SeedRun { seed, outcome, diagnostics })
}

fn run_all(
    system: &MolecularSystem,
    cfg: &RunConfig,
    r: usize,
    verbose: bool,
) -> CmdResult<(OperatorPool, Vec<SeedRun>)> {
    let pool = build_pool(system.n_qubits()).input(|| "cannot build operator pool".into())?;
    let policy = SelectionPolicy::with_floor(r, cfg.qsci.freq_floor, system.n_electrons(), system.sz_doubled())
        .input(|| "invalid selection policy".into())?;
    let adapt = AdaptConfig {
        policy,
        max_iters: cfg.run.max_iters,
        conv_tol: cfg.run.conv_tol,
        stagnation_tol: cfg.run.stagnation_tol,
        window: cfg.run.window,
        track_state_energy: true,
    };
    let runs: Vec<_> = cfg
        .run
        .seeds
        .par_iter()
        .map(|&seed| run_seed(system, &pool, &adapt, cfg, seed, verbose).map_err(|e| (seed, e)))
        .collect();
    let runs = runs
        .into_iter()
        .map(|r| r.map_err(|(seed, e)| Failure::Algorithm(anyhow!(e).context(format!("seed {seed} failed")))))
        .collect::<CmdResult<Vec<_>>>()?;
    Ok((pool, runs))
}

pub fn cmd_run(cfg: &RunConfig, verbose: bool) -> CmdResult {
    let system = load(cfg)?;
    let (e_exact, gs) = exact(&system)?;
    let r = effective_r(cfg, &gs)?;
    let hash = cfg.hash();
    let (pool, runs) = run_all(&system, cfg, r, verbose)?;
    let dir = out_dir(cfg)?;

    let mut summary = String::from("seed,final_energy,exact_energy,error,iterations,cnots,shots,stop_reason,config_hash\n");
    let mut files = vec!["summary.csv".to_string(), "manifest.json".to_string()];
    for run in &runs {
        let seed = run.seed;
        let out = &run.outcome;
        let mut trace = String::new();
        for record in &out.records {
            let line = TraceLine { seed, config_hash: &hash, record };
            trace.push_str(&serde_json::to_string(&line).expect("trace serializes"));
            trace.push('\n');
        }
        let name = format!("trace_seed{seed}.jsonl");
        write(&dir.join(&name), trace)?;
        files.push(name);

        let sol = &out.solution;
        let n = system.n_qubits();
        let subspace = json!({
            "seed": seed,
            "config_hash": hash,
            "energy": sol.energy,
            "configs": sol.configs,
            "bitstrings": sol.configs.iter().map(|c| format!("{c:0n$b}")).collect::<Vec<_>>(),
            "amplitudes": sol.eigvec.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "gates": out.program.gates(),
        });
        let name = format!("subspace_seed{seed}.json");
        write(&dir.join(&name), serde_json::to_string_pretty(&subspace).expect("subspace serializes") + "\n")?;
        files.push(name);

        if !run.diagnostics.is_empty() {
            let mut diag = String::new();
            for d in &run.diagnostics {
                let line = json!({ "seed": seed, "config_hash": hash, "diagnostics": d });
                diag.push_str(&line.to_string());
                diag.push('\n');
            }
            let name = format!("mitigation_seed{seed}.jsonl");
            write(&dir.join(&name), diag)?;
            files.push(name);
        }

        let cnots = out.records.last().map_or(0, |r| r.cnots);
        writeln!(
            summary,
            "{seed},{},{e_exact},{},{},{cnots},{},{},{hash}",
            out.energy(),
            out.energy() - e_exact,
            out.iterations(),
            out.total_shots,
            out.stop_reason.as_str()
        )
        .expect("write to string");
    }
    write(&dir.join("summary.csv"), &summary)?;

    let manifest = json!({
        "tool": "adapt-qsci",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "run",
        "config_hash": hash,
        "config": cfg,
        "n_qubits": system.n_qubits(),
        "n_electrons": system.n_electrons(),
        "sz_doubled": system.sz_doubled(),
        "exact_energy": e_exact,
        "r_max": r,
        "pool_size": pool.len(),
        "files": files,
    });
    write(&dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;

    print!("{summary}");
    Ok(())
}

pub fn cmd_exact(cfg: &RunConfig, deltas: &[f64]) -> CmdResult {
    let system = load(cfg)?;
    let (e0, gs) = exact(&system)?;
    let dir = out_dir(cfg)?;
    let hash = cfg.hash();

    let mut weights: Vec<(u64, f64)> = gs.iter().map(|(c, a)| (c, a.norm_sqr())).collect();
    weights.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    debug_assert_eq!(weights.len(), amplitude_spectrum(&gs).len());
    let mut spectrum = String::from("rank,config,weight\n");
    for (rank, (c, w)) in weights.iter().enumerate() {
        writeln!(spectrum, "{},{c},{w}", rank + 1).expect("write to string");
    }
    write(&dir.join("spectrum.csv"), spectrum)?;

    let mut table = String::from("delta,r\n");
    for &d in deltas {
        let r = r_delta(&gs, d).input(|| format!("invalid delta {d}"))?;
        writeln!(table, "{d},{r}").expect("write to string");
    }
    write(&dir.join("r_delta.csv"), &table)?;

    println!("sector ground energy {e0}");
    println!("config_hash {hash}");
    print!("{table}");
    Ok(())
}

pub fn cmd_pool(n_qubits: usize, list: bool) -> CmdResult {
    let pool = build_pool(n_qubits).input(|| format!("no pool for {n_qubits} qubits"))?;
    println!("pool size {}", pool.len());
    if list {
        for (i, label) in pool.labels().iter().enumerate() {
            println!("{i} {label}");
        }
    }
    Ok(())
}

pub fn cmd_estimate_shots(cfg: &RunConfig, verbose: bool) -> CmdResult {
    let system = load(cfg)?;
    let (_, gs) = exact(&system)?;
    let sv = StateVector::from_sparse(&gs).algo(|| "ground state too large for a statevector".into())?;
    let eps = cfg.estimate.epsilon;
    let groups = sorted_insertion(system.hamiltonian()).algo(|| "grouping failed".into())?;
    let vqe_once = vqe_shot_estimate(system.hamiltonian(), &sv, eps).algo(|| "shot estimate failed".into())?;
    let vqe_lower_bound =
        vqe_total_estimate(vqe_once, cfg.estimate.vqe_iterations).input(|| "invalid VQE iteration count".into())?;

    let r = effective_r(cfg, &gs)?;
    let mut noiseless = cfg.clone();
    noiseless.noise = None;
    let (_, runs) = run_all(&system, &noiseless, r, verbose)?;
    let k = runs.len() as f64;
    let adapt_qsci_shots = runs.iter().map(|r| r.outcome.total_shots as f64).sum::<f64>() / k;
    let adapt_qsci_cnots =
        runs.iter().map(|r| r.outcome.records.last().map_or(0, |x| x.cnots) as f64).sum::<f64>() / k;

    let report = json!({
        "adapt_qsci_shots": adapt_qsci_shots,
        "adapt_qsci_cnots": adapt_qsci_cnots,
        "vqe_once": vqe_once,
        "vqe_lower_bound": vqe_lower_bound,
        "epsilon": eps,
        "vqe_iterations": cfg.estimate.vqe_iterations,
        "measurement_groups": groups.len(),
        "seeds": cfg.run.seeds,
        "config_hash": cfg.hash(),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let dir = out_dir(cfg)?;
    write(&dir.join("comparison.json"), &text)?;
    print!("{text}");
    Ok(())
}

pub fn cmd_convert(input: &Path, output: &Path) -> CmdResult {
    let system = load_system(input, HamiltonianFormat::Fcidump)
        .input(|| format!("cannot load Hamiltonian {}", input.display()))?;
    let text = serialize_qubit_hamiltonian(&system).algo(|| "serialization failed".into())?;
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| parent.display().to_string()).input(|| "cannot create directory".into())?;
    }
    write(output, text + "\n")?;
    println!("wrote {} terms to {}", system.hamiltonian().len(), output.display());
    Ok(())
}
