//! Acceptance criteria. Runs each criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.
//!
//! Expected values come from closed forms or from the small independent
//! checkers below, never from the code under test.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmap::arch::{Architecture, Topology};
use qmap::circuit::{gen_qft, gen_random, Circuit, Gate, GateKind};
use qmap::mapper::{
    map_circuit, oracle_min_route, verify_mapped, MappedCircuit, MapperConfig, OpKind,
    PlacementStrategy,
};
use qmap::traffic::{
    activity_raster, core_traffic_matrix, per_qubit_counts, summarize, vertical_projection,
    Activity,
};
use qmap::CostModel;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn qmap(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qmap"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn qmap: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "qmap {args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn csv_rows(path: &Path) -> Result<Vec<Vec<String>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

/// Coupling of two slots of one core, straight from the topology definitions.
fn coupled(topology: Topology, size: usize, a: usize, b: usize) -> bool {
    if a == b {
        return false;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    match topology {
        Topology::AllToAll => true,
        Topology::Line => hi - lo == 1,
        Topology::Ring => hi - lo == 1 || (size > 2 && lo == 0 && hi == size - 1),
        Topology::Grid => {
            let mut rows = 1;
            for r in 1..=size {
                if r * r > size {
                    break;
                }
                if size.is_multiple_of(r) {
                    rows = r;
                }
            }
            let cols = size / rows;
            let (ra, ca) = (a / cols, a % cols);
            let (rb, cb) = (b / cols, b % cols);
            (ra == rb && ca.abs_diff(cb) == 1) || (ca == cb && ra.abs_diff(rb) == 1)
        }
    }
}

/// Replays a mapping from its initial placement and checks that every
/// two-qubit gate acts on coupled slots of one core holding its operands.
fn independent_adjacency_check(m: &MappedCircuit, intra: Topology) -> Result<usize, String> {
    let qpc = m.arch.qubits_per_core();
    let total = m.arch.total_qubits();
    let mut slot: Vec<Option<usize>> = vec![None; total];
    for (v, &p) in m.initial.as_slice().iter().enumerate() {
        slot[p] = Some(v);
    }
    let mut ops: Vec<_> = m.ops.iter().collect();
    ops.sort_by_key(|op| op.timestep);
    let mut checked = 0;
    for op in ops {
        match &op.kind {
            OpKind::Gate { gate, physical } => {
                let g = &m.circuit.gates()[*gate];
                for (&v, &p) in g.qubits().iter().zip(physical) {
                    ensure!(
                        slot[p] == Some(v),
                        "gate {gate}: slot {p} does not hold q{v}"
                    );
                }
                if let [p, q] = physical[..] {
                    ensure!(p / qpc == q / qpc, "gate {gate} spans cores ({p}, {q})");
                    ensure!(
                        coupled(intra, qpc, p % qpc, q % qpc),
                        "gate {gate} on uncoupled slots ({p}, {q})"
                    );
                    checked += 1;
                }
            }
            OpKind::Swap { a, b } => {
                ensure!(
                    a / qpc == b / qpc && coupled(intra, qpc, a % qpc, b % qpc),
                    "bad swap"
                );
                slot.swap(*a, *b);
            }
            OpKind::Teleport { src, dst, .. } => {
                ensure!(slot[*src].is_some() && slot[*dst].is_none(), "bad teleport");
                ensure!(src / qpc != dst / qpc, "teleport within a core");
                slot.swap(*src, *dst);
            }
            OpKind::Exchange { a, b, .. } => {
                ensure!(slot[*a].is_some() && slot[*b].is_some(), "bad exchange");
                ensure!(a / qpc != b / qpc, "exchange within a core");
                slot.swap(*a, *b);
            }
        }
    }
    for (v, &p) in m.final_placement.as_slice().iter().enumerate() {
        ensure!(slot[p] == Some(v), "final placement disagrees for q{v}");
    }
    Ok(checked)
}

/// Teleports counted straight from the op list; an exchange moves two states.
fn teleports_in(m: &MappedCircuit) -> u64 {
    m.ops
        .iter()
        .map(|op| match op.kind {
            OpKind::Teleport { .. } => 1,
            OpKind::Exchange { .. } => 2,
            _ => 0,
        })
        .sum()
}

fn full_machine() -> MapperConfig {
    MapperConfig {
        allow_full: true,
        ..MapperConfig::default()
    }
}

const TOPOLOGIES: [Topology; 4] = [
    Topology::AllToAll,
    Topology::Line,
    Topology::Ring,
    Topology::Grid,
];

/// A random machine plus a circuit that fits it.
fn random_instance(
    rng: &mut ChaCha8Rng,
    max_cores: usize,
    max_qpc: usize,
) -> (Architecture, Circuit, MapperConfig) {
    loop {
        let n_cores = rng.gen_range(1..=max_cores);
        let qpc = rng.gen_range(2..=max_qpc);
        let intra = TOPOLOGIES[rng.gen_range(0..4)];
        let inter = TOPOLOGIES[rng.gen_range(0..4)];
        let Ok(arch) = Architecture::build(n_cores, qpc, intra, inter) else {
            continue;
        };
        let allow_full = rng.gen_bool(0.5);
        let cap = if allow_full || n_cores == 1 {
            n_cores * qpc
        } else {
            n_cores * (qpc - 1)
        };
        if cap < 2 {
            continue;
        }
        let n = rng.gen_range(2..=cap);
        let gates = rng.gen_range(1..=40);
        let p2 = rng.gen_range(0.0..=1.0);
        let circuit = gen_random(n, gates, p2, rng.gen()).expect("valid parameters");
        let cfg = MapperConfig {
            placement: if rng.gen_bool(0.5) {
                PlacementStrategy::Block
            } else {
                PlacementStrategy::Random
            },
            seed: rng.gen(),
            allow_full,
            lookahead: rng.gen_range(0..4),
            cost: CostModel {
                dur_teleport: rng.gen_range(1..=3),
                ..CostModel::default()
            },
        };
        return (arch, circuit, cfg);
    }
}

fn qft64_on_eight_cores() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let qasm = d.join("qft64.qasm");
    let started = Instant::now();
    qmap(&["gen", "qft", "--n", "64", "--out", qasm.to_str().unwrap()])?;
    qmap(&[
        "map",
        qasm.to_str().unwrap(),
        "--arch",
        "8x8:alltoall/alltoall",
        "--allow-full",
        "--out",
        d.join("map").to_str().unwrap(),
    ])?;
    qmap(&[
        "analyze",
        d.join("map/mapped.qmap").to_str().unwrap(),
        "--out",
        d.join("traffic").to_str().unwrap(),
    ])?;
    let elapsed = started.elapsed();
    ensure!(
        elapsed < Duration::from_secs(10),
        "pipeline took {elapsed:?}"
    );

    let mapped =
        qmap::pipeline::load_mapped(&d.join("map/mapped.qmap")).map_err(|e| e.to_string())?;
    verify_mapped(&mapped).map_err(|e| e.to_string())?;
    independent_adjacency_check(&mapped, Topology::AllToAll)?;

    let raster = csv_rows(&d.join("traffic/raster.csv"))?;
    let mut pqubits: Vec<usize> = raster.iter().map(|r| r[1].parse().unwrap()).collect();
    pqubits.sort_unstable();
    pqubits.dedup();
    ensure!(
        pqubits == (0..64).collect::<Vec<_>>(),
        "raster does not cover 64 qubits"
    );
    ensure!(
        raster.len() as u64 == 64 * mapped.depth,
        "raster has {} cells",
        raster.len()
    );

    let matrix = csv_rows(&d.join("traffic/core_matrix.csv"))?;
    ensure!(
        matrix.len() == 64,
        "core matrix has {} entries",
        matrix.len()
    );
    for row in &matrix {
        if row[0] == row[1] {
            ensure!(row[2] == "0", "non-zero diagonal {row:?}");
        }
    }
    let per_qubit = csv_rows(&d.join("traffic/per_qubit.csv"))?;
    ensure!(
        per_qubit.len() == 64,
        "per-qubit table has {} rows",
        per_qubit.len()
    );
    Ok(format!(
        "{:.2?}, depth {}, {} teleports, 64-qubit raster, 8x8 matrix, 64 load rows",
        elapsed,
        mapped.depth,
        teleports_in(&mapped)
    ))
}

fn adjacency_constraint() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAD7A);
    let instances = 600;
    let mut two_qubit_ops = 0;
    for i in 0..instances {
        let (arch, circuit, cfg) = random_instance(&mut rng, 5, 9);
        let m = map_circuit(&circuit, &arch, &cfg)
            .map_err(|e| format!("instance {i} ({}): {e}", arch.name()))?;
        verify_mapped(&m).map_err(|e| format!("instance {i} ({}): {e}", arch.name()))?;
        two_qubit_ops += independent_adjacency_check(&m, arch.intra_topology())
            .map_err(|e| format!("instance {i} ({}): {e}", arch.name()))?;
    }
    Ok(format!(
        "{instances} instances, {two_qubit_ops} two-qubit ops all adjacent"
    ))
}

fn oracle_dominance() -> Outcome {
    let fixture = |spec: &str, n: usize, gates: Vec<Gate>, expected: u64| -> Result<(), String> {
        let arch: Architecture = spec.parse().unwrap();
        let c = Circuit::new("", n, gates).unwrap();
        let m = map_circuit(&c, &arch, &full_machine()).map_err(|e| e.to_string())?;
        verify_mapped(&m).map_err(|e| e.to_string())?;
        let opt = oracle_min_route(&c, &arch, &m.initial).map_err(|e| e.to_string())?;
        ensure!(
            (m.routing_op_count(), opt) == (expected, expected),
            "{spec}: heuristic {} optimal {opt}, expected {expected}",
            m.routing_op_count()
        );
        Ok(())
    };
    fixture("2x2:alltoall/alltoall", 3, vec![Gate::cx(0, 2)], 1)?;
    fixture("1x4:line/alltoall", 4, vec![Gate::cx(0, 3)], 2)?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let mut instances = 0;
    let (mut equal, mut gap) = (0, 0);
    while instances < 80 {
        let n_cores = rng.gen_range(1..=4);
        let qpc = rng.gen_range(2..=4);
        if n_cores * qpc > 8 {
            continue;
        }
        let intra = TOPOLOGIES[rng.gen_range(0..3)];
        let inter = TOPOLOGIES[rng.gen_range(0..3)];
        let arch = Architecture::build(n_cores, qpc, intra, inter).unwrap();
        let n = rng.gen_range(2..=arch.total_qubits());
        let c = gen_random(n, rng.gen_range(1..=6), rng.gen_range(0.3..=1.0), rng.gen()).unwrap();
        let m = map_circuit(&c, &arch, &full_machine()).map_err(|e| e.to_string())?;
        verify_mapped(&m).map_err(|e| format!("{}: {e}", arch.name()))?;
        let opt = oracle_min_route(&c, &arch, &m.initial).map_err(|e| e.to_string())?;
        let h = m.routing_op_count();
        ensure!(
            h >= opt,
            "{}: heuristic {h} below optimum {opt}",
            arch.name()
        );
        if h == opt {
            equal += 1;
        } else {
            gap += 1;
        }
        instances += 1;
    }
    Ok(format!(
        "fixtures 1 vs 1 and 2 vs 2; {instances} instances, {equal} optimal, {gap} above optimum"
    ))
}

fn qft_structure() -> Outcome {
    for n in 1..=128usize {
        let c = gen_qft(n).map_err(|e| e.to_string())?;
        ensure!(
            c.len() == n + n * (n - 1) / 2,
            "qft({n}) has {} gates",
            c.len()
        );
        ensure!(
            c.two_qubit_count() == n * (n - 1) / 2,
            "qft({n}) two-qubit count"
        );
    }
    let c = gen_qft(64).unwrap();
    ensure!(
        c.len() == 2080 && c.two_qubit_count() == 2016,
        "qft(64) counts"
    );
    ensure!(
        c.stats().count(GateKind::Hadamard) == 64,
        "qft(64) hadamards"
    );

    let text = qmap(&["gen", "qft", "--n", "64"])?;
    let gate_lines = text
        .lines()
        .filter(|l| l.ends_with(';') && !l.starts_with("OPENQASM") && !l.starts_with("qreg"))
        .count();
    ensure!(gate_lines == 2080, "CLI wrote {gate_lines} gate lines");
    Ok("n + n(n-1)/2 for n in 1..=128; n=64: 2080 gates, 2016 two-qubit".into())
}

fn vertical_projection_exact() -> Outcome {
    let rate = CostModel::default().readout_rate;
    let bps = vertical_projection(1_000_000, rate);
    ensure!(bps == 1_000_000_000_000u128, "projection gave {bps}");
    ensure!(bps > 1_000_000_000_000u128 - 1, "below 1 Tb/s");
    Ok(format!("10^6 qubits at {rate} b/s = {bps} b/s"))
}

fn conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    let mut cases = 0;
    let mut single_core = 0;
    for i in 0..300 {
        let (arch, circuit, mut cfg) = random_instance(&mut rng, 4, 8);
        cfg.cost.dur_teleport = 1;
        let m = map_circuit(&circuit, &arch, &cfg)
            .map_err(|e| format!("instance {i}: {e}"))?
            .into_verified()
            .map_err(|e| format!("instance {i}: {e}"))?;
        let expected_teleports = teleports_in(&m);

        ensure!(
            core_traffic_matrix(&m).total() == expected_teleports,
            "instance {i}: matrix total"
        );
        let sym = core_traffic_matrix(&m).symmetrized();
        for a in 0..arch.n_cores() {
            ensure!(sym.get(a, a) == 0, "instance {i}: diagonal");
            for b in 0..arch.n_cores() {
                ensure!(sym.get(a, b) == sym.get(b, a), "instance {i}: asymmetric");
            }
        }
        let per_qubit: u64 = per_qubit_counts(&m).iter().map(|l| l.teleports).sum();
        ensure!(
            per_qubit == expected_teleports,
            "instance {i}: per-qubit teleports {per_qubit}"
        );

        let raster = activity_raster(&m);
        for t in 0..m.depth {
            let active = m
                .ops
                .iter()
                .filter(|op| op.timestep <= t && t < op.timestep + op.duration);
            let (mut compute, mut communicate) = (0, 0);
            for op in active {
                match &op.kind {
                    OpKind::Gate { physical, .. } => compute += physical.len(),
                    _ => communicate += 2,
                }
            }
            ensure!(
                raster.count(t as usize, Activity::Compute) == compute,
                "instance {i}: compute cells at t={t}"
            );
            ensure!(
                raster.count(t as usize, Activity::Communicate) == communicate,
                "instance {i}: communicate cells at t={t}"
            );
        }

        if arch.n_cores() == 1 && arch.intra_topology() == Topology::AllToAll {
            ensure!(
                summarize(&m).comm_ratio == 0.0,
                "instance {i}: single-core comm_ratio"
            );
            single_core += 1;
        }
        cases += 1;
    }
    for n in [2, 5, 16, 40] {
        let arch = Architecture::build(1, n, Topology::AllToAll, Topology::AllToAll).unwrap();
        let m = map_circuit(
            &gen_random(n, 200, 0.7, n as u64).unwrap(),
            &arch,
            &MapperConfig::default(),
        )
        .unwrap()
        .into_verified()
        .map_err(|e| e.to_string())?;
        ensure!(summarize(&m).comm_ratio == 0.0, "1x{n} comm_ratio");
        single_core += 1;
    }
    Ok(format!(
        "{cases} mappings; {single_core} single-core all-to-all with comm_ratio 0"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |tag: &str| -> Result<(), String> {
        let d = dir.path().join(tag);
        fs::create_dir_all(&d).unwrap();
        let qasm = d.join("rand.qasm");
        qmap(&[
            "gen",
            "random",
            "--n",
            "12",
            "--gates",
            "150",
            "--p2",
            "0.6",
            "--seed",
            "42",
            "--out",
            qasm.to_str().unwrap(),
        ])?;
        qmap(&[
            "map",
            qasm.to_str().unwrap(),
            "--arch",
            "3x6:grid/ring",
            "--placement",
            "random",
            "--seed",
            "9",
            "--dur-teleport",
            "2",
            "--out",
            d.join("map").to_str().unwrap(),
        ])?;
        qmap(&[
            "analyze",
            d.join("map/mapped.qmap").to_str().unwrap(),
            "--out",
            d.join("traffic").to_str().unwrap(),
        ])?;
        Ok(())
    };
    run("a")?;
    run("b")?;
    let mut files = vec![
        "rand.qasm".to_string(),
        "map/mapped.qmap".to_string(),
        "traffic/report.json".to_string(),
    ];
    files.extend(
        qmap::traffic::CSV_FILES
            .iter()
            .map(|f| format!("traffic/{f}")),
    );
    for f in &files {
        let a = fs::read(dir.path().join("a").join(f)).map_err(|e| format!("{f}: {e}"))?;
        let b = fs::read(dir.path().join("b").join(f)).map_err(|e| format!("{f}: {e}"))?;
        ensure!(a == b, "{f} differs between runs");
    }
    Ok(format!(
        "{} files byte-identical across two runs",
        files.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        (
            "64-qubit QFT on 8x8 all-to-all: gen -> map -> analyze",
            qft64_on_eight_cores,
        ),
        (
            "two-qubit ops act on coupled same-core qubits",
            adjacency_constraint,
        ),
        (
            "heuristic routing cost never below the exact optimum",
            oracle_dominance,
        ),
        ("QFT gate counts", qft_structure),
        ("vertical readout projection", vertical_projection_exact),
        ("traffic conservation identities", conservation),
        ("pipeline determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", 7 - failed, 7);
    if failed > 0 {
        std::process::exit(1);
    }
}
