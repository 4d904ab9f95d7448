//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use rand::Rng as _;
use tvn::random::{self, gaussian_tensor};
use tvn::{
    construct_equality_pair, core_orthogonality_defect, extract_equality_structure, hosvd, io,
    kron_chain, mode_spectrum, reconstruct, sigma_map, vn_check, DenseTensor, Matrix,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if let false = $cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn inequality_sweep() -> Outcome {
    let shapes: [&[usize]; 4] = [&[3, 4], &[2, 3, 4], &[3, 3, 3], &[2, 2, 2, 2]];
    let mut rng = random::seeded(0xacc1);
    let mut worst = f64::INFINITY;
    for i in 0..500 {
        let shape = shapes[i % shapes.len()];
        let x = gaussian_tensor(&mut rng, shape);
        let y = gaussian_tensor(&mut rng, shape);
        let r = vn_check(&x, &y, 1e-9).map_err(|e| e.to_string())?;
        let scale = x.frobenius_norm() * y.frobenius_norm();
        let lhs = x.inner_product(&y).map_err(|e| e.to_string())?;
        for d in 1..=shape.len() {
            let sx = mode_spectrum(&x, d).map_err(|e| e.to_string())?;
            let sy = mode_spectrum(&y, d).map_err(|e| e.to_string())?;
            let rhs: f64 = sx.iter().zip(&sy).map(|(a, b)| a * b).sum();
            ensure!(
                lhs <= rhs + 1e-9 * scale,
                "pair {i} mode {d}: {lhs} > {rhs}"
            );
            ensure!(r.inequality_holds(), "pair {i}: report says violated");
            worst = worst.min((rhs - lhs) / scale);
        }
    }
    Ok(format!("500 pairs, min relative gap {worst:.3e}"))
}

fn random_tensors(seed: u64, count: usize) -> Vec<DenseTensor> {
    let mut rng = random::seeded(seed);
    (0..count)
        .map(|_| {
            let shape = common::random_shape(&mut rng, 4, 5);
            gaussian_tensor(&mut rng, &shape)
        })
        .collect()
}

fn hosvd_validity() -> Outcome {
    let (mut rec, mut orth, mut core, mut slices) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, x) in random_tensors(0xacc2, 100).iter().enumerate() {
        let f = hosvd(x);
        let norm = x.frobenius_norm();
        rec = rec.max(common::tensor_rel_err(
            &reconstruct(&f).map_err(|e| e.to_string())?,
            x,
        ));
        for u in &f.factors {
            orth = orth.max(u.orthogonality_defect());
        }
        core = core.max(core_orthogonality_defect(&f.core));
        for d in 0..x.ndim() {
            for k in 1..=x.shape()[d] {
                let s = f
                    .core
                    .subtensor_fix(d + 1, k)
                    .map_err(|e| e.to_string())?
                    .frobenius_norm();
                slices = slices.max(common::rel_diff(s, f.spectra[d][k - 1], norm));
            }
        }
        ensure!(rec <= 1e-10, "tensor {i}: reconstruction {rec:.3e}");
        ensure!(orth <= 1e-10, "tensor {i}: factor defect {orth:.3e}");
        ensure!(core <= 1e-9, "tensor {i}: core defect {core:.3e}");
        ensure!(
            slices <= 1e-9,
            "tensor {i}: slice norm mismatch {slices:.3e}"
        );
    }
    Ok(format!(
        "100 tensors, reconstruction {rec:.1e}, factor defect {orth:.1e}, core defect {core:.1e}, slice norms {slices:.1e}"
    ))
}

fn norm_identities() -> Outcome {
    let mut worst = 0.0f64;
    for (i, x) in random_tensors(0xacc3, 100).iter().enumerate() {
        let norm = x.frobenius_norm();
        for d in 1..=x.ndim() {
            let s = mode_spectrum(x, d).map_err(|e| e.to_string())?;
            let n = s.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max(common::rel_diff(n, norm, norm));
        }
        let m = sigma_map(x).iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(common::rel_diff(m, norm, norm));
        ensure!(worst <= 1e-10, "tensor {i}: {worst:.3e}");
    }
    Ok(format!("100 tensors, worst relative error {worst:.1e}"))
}

/// Every shape with D <= 4, dims >= 1 and at most `max_len` elements.
fn all_shapes(max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..4 {
        let mut next = vec![];
        for prefix in &frontier {
            let len: usize = prefix.iter().product();
            for n in 1..=max_len / len {
                let mut s = prefix.clone();
                s.push(n);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn matricization_oracle() -> Outcome {
    let shapes = all_shapes(200);
    let mut rng = random::seeded(0xacc4);
    let mut checked = 0;
    for (i, shape) in shapes.iter().enumerate() {
        // all shapes with at most 24 elements, a sample of the rest
        let len: usize = shape.iter().product();
        if len > 24 && i % 7 != 0 {
            continue;
        }
        let x = gaussian_tensor(&mut rng, shape);
        for d in 1..=shape.len() {
            let m = x.matricize(d).map_err(|e| e.to_string())?;
            ensure!(
                m == common::matricize_oracle(&x, d),
                "shape {shape:?} mode {d}"
            );
            checked += 1;
        }
    }

    let mut worst = 0.0f64;
    for ndim in 2..=4 {
        for _ in 0..10 {
            let shape: Vec<usize> = (0..ndim).map(|_| rng.random_range(1..=4)).collect();
            let core = gaussian_tensor(&mut rng, &shape);
            let us: Vec<Matrix> = shape
                .iter()
                .map(|&n| common::householder_orthogonal(&mut rng, n))
                .collect();
            let x = core.multiply_all_modes(&us).map_err(|e| e.to_string())?;
            for d in 1..=ndim {
                let k = kron_chain((d..ndim).chain(0..d - 1).map(|e| &us[e]))
                    .ok_or("empty Kronecker chain")?;
                let rhs = us[d - 1]
                    .matmul(&core.matricize(d).map_err(|e| e.to_string())?)
                    .and_then(|m| m.matmul(&k.transpose()))
                    .map_err(|e| e.to_string())?;
                let lhs = x.matricize(d).map_err(|e| e.to_string())?;
                let err = lhs.max_abs_diff(&rhs) / lhs.frobenius_norm();
                worst = worst.max(err);
                ensure!(
                    err <= 1e-10,
                    "shape {shape:?} mode {d}: Tucker identity {err:.3e}"
                );
            }
        }
    }
    Ok(format!(
        "{checked} shape/mode pairs match the index map, Tucker identity {worst:.1e}"
    ))
}

const SPECS: u64 = 50;

fn equality_witnesses() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..SPECS {
        let spec = common::acceptance_spec(i);
        let (x, y, w) = construct_equality_pair(&spec).map_err(|e| e.to_string())?;
        let r = vn_check(&x, &y, 1e-8).map_err(|e| e.to_string())?;
        ensure!(r.equality_all_modes, "spec {i}: gaps {:?}", r.gap_per_mode);
        let ex = common::tensor_rel_err(&w.reconstruct_x().map_err(|e| e.to_string())?, &x);
        let ey = common::tensor_rel_err(&w.reconstruct_y().map_err(|e| e.to_string())?, &y);
        worst = worst.max(ex).max(ey);
        for u in &w.factors_w {
            ensure!(
                u.orthogonality_defect() <= 1e-10,
                "spec {i}: W not orthogonal"
            );
        }
        // X_(1) = W_1 · DX_(1) · (W_2 ⊗ … ⊗ W_D)ᵀ, by explicit Kronecker products
        for (diag, t) in [(&w.dx, &x), (&w.dy, &y)] {
            let k = kron_chain(w.factors_w[1..].iter()).ok_or("empty Kronecker chain")?;
            let rotated = w.factors_w[0]
                .matmul(&common::matricize_oracle(diag, 1))
                .and_then(|m| m.matmul(&k.transpose()))
                .map_err(|e| e.to_string())?;
            let target = common::matricize_oracle(t, 1);
            worst = worst.max(rotated.max_abs_diff(&target) / target.frobenius_norm());
        }
        ensure!(
            worst <= 1e-9,
            "spec {i}: witness rotation error {worst:.3e}"
        );
    }
    Ok(format!("{SPECS} specs, witness rotation error {worst:.1e}"))
}

fn extraction_round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..SPECS {
        let spec = common::acceptance_spec(i);
        let (x, y, _) = construct_equality_pair(&spec).map_err(|e| e.to_string())?;
        let w = extract_equality_structure(&x, &y, 1e-8).map_err(|e| format!("spec {i}: {e}"))?;
        ensure!(
            w.ratios.len() == spec.ratios.len(),
            "spec {i}: found {} classes, expected {}",
            w.ratios.len(),
            spec.ratios.len()
        );
        for (got, want) in w.ratios.iter().zip(&spec.ratios) {
            let err = (got - want).abs() / want;
            worst = worst.max(err);
            ensure!(err <= 1e-6, "spec {i}: ratio {got} vs {want}");
        }
    }
    Ok(format!("{SPECS} specs, worst ratio error {worst:.1e}"))
}

/// ⟨X,Y⟩ and Σ σ_i(X)σ_i(Y) for matrices, from Gram eigenvalues.
fn classical(x: &Matrix, y: &Matrix) -> (f64, f64) {
    let lhs = x.frobenius_dot(y);
    let sx = common::singular_values_oracle(x);
    let sy = common::singular_values_oracle(y);
    (lhs, sx.iter().zip(&sy).map(|(a, b)| a * b).sum())
}

fn matrix_specialization() -> Outcome {
    let mut rng = random::seeded(0xacc7);
    let mut cases: Vec<(Matrix, Matrix)> = vec![];
    for _ in 0..50 {
        let (m, n) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let x = random::gaussian_matrix(&mut rng, m, n);
        let y = random::gaussian_matrix(&mut rng, m, n);
        cases.push((x.clone(), y));
        cases.push((x.clone(), x));
    }
    let e1 = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]);
    let e2 = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]);
    cases.push((e1.clone(), e2));

    let mut worst = 0.0f64;
    for (i, (x, y)) in cases.iter().enumerate() {
        let r = vn_check(&x.to_tensor(), &y.to_tensor(), 1e-9).map_err(|e| e.to_string())?;
        let (lhs, rhs) = classical(x, y);
        let scale = x.frobenius_norm() * y.frobenius_norm();
        worst = worst.max(common::rel_diff(r.lhs, lhs, scale));
        for d in 0..2 {
            worst = worst.max(common::rel_diff(r.rhs_per_mode[d], rhs, scale));
        }
        ensure!(worst <= 1e-10, "case {i}: {worst:.3e}");
        let same = x == y;
        let strict = (rhs - lhs) > 1e-9 * scale;
        ensure!(
            r.equality_all_modes == !strict,
            "case {i}: equality flag {} but classical gap {}",
            r.equality_all_modes,
            rhs - lhs
        );
        if same {
            ensure!(r.equality_all_modes, "case {i}: X = Y must attain equality");
        }
    }
    let last = vn_check(&e1.to_tensor(), &cases.last().unwrap().1.to_tensor(), 1e-9)
        .map_err(|e| e.to_string())?;
    ensure!(last.lhs == 0.0, "e1e1 vs e2e2: lhs {}", last.lhs);
    ensure!(
        last.gap_per_mode == vec![1.0, 1.0],
        "e1e1 vs e2e2: gaps {:?}",
        last.gap_per_mode
    );
    ensure!(!last.equality_all_modes, "e1e1 vs e2e2 must be strict");
    Ok(format!(
        "{} matrix pairs, worst relative error {worst:.1e}",
        cases.len()
    ))
}

fn tvn(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_tvn"))
        .args(args)
        .env_remove("TVN_SEED")
        .output()
        .map_err(|e| e.to_string())
}

fn expect_code(o: &Output, want: i32, what: &str) -> Result<(), String> {
    let got = o.status.code();
    ensure!(
        got == Some(want),
        "{what}: exit {got:?}, expected {want}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    Ok(())
}

fn rewrite_is_identical(
    path: &Path,
    rewrite: impl Fn(&Path) -> tvn::Result<()>,
) -> Result<(), String> {
    let before = fs::read(path).map_err(|e| e.to_string())?;
    let copy = path.with_extension("rewrite");
    rewrite(&copy).map_err(|e| e.to_string())?;
    let after = fs::read(&copy).map_err(|e| e.to_string())?;
    ensure!(before == after, "{} does not round-trip", path.display());
    Ok(())
}

fn cli_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let spec = common::acceptance_spec(13);
    let spec_path = root.join("spec.json");
    io::write_spec(&spec, &spec_path).map_err(|e| e.to_string())?;
    rewrite_is_identical(&spec_path, |p| {
        io::write_spec(&io::read_spec(&spec_path)?, p)
    })?;

    let wdir = root.join("witness");
    let o = tvn(&[
        "witness",
        "--spec",
        &s(&spec_path),
        "--output-dir",
        &s(&wdir),
    ])?;
    expect_code(&o, 0, "witness")?;
    let (x, y) = (wdir.join("x.json"), wdir.join("y.json"));

    let report = root.join("report.json");
    let o = tvn(&[
        "check",
        "--x",
        &s(&x),
        "--y",
        &s(&y),
        "--tol",
        "1e-8",
        "--report",
        &s(&report),
    ])?;
    expect_code(&o, 0, "check")?;
    ensure!(
        String::from_utf8_lossy(&o.stdout).contains("equality_all_modes true"),
        "check did not report equality"
    );

    let edir = root.join("extracted");
    let o = tvn(&[
        "extract",
        "--x",
        &s(&x),
        "--y",
        &s(&y),
        "--output-dir",
        &s(&edir),
    ])?;
    expect_code(&o, 0, "extract")?;
    let w = io::read_witness(&edir).map_err(|e| e.to_string())?;
    ensure!(
        w.ratios.len() == spec.ratios.len(),
        "extracted {} classes",
        w.ratios.len()
    );
    for (got, want) in w.ratios.iter().zip(&spec.ratios) {
        ensure!((got - want).abs() <= 1e-6 * want, "ratio {got} vs {want}");
    }

    for t in [&x, &y, &wdir.join("dx.json"), &edir.join("w_1.json")] {
        rewrite_is_identical(t, |p| io::write_tensor(&io::read_tensor(t)?, p))?;
    }
    rewrite_is_identical(&report, |p| io::write_report(&io::read_report(&report)?, p))?;
    let wcopy = root.join("witness_copy");
    io::write_witness(&io::read_witness(&wdir).map_err(|e| e.to_string())?, &wcopy)
        .map_err(|e| e.to_string())?;
    for entry in fs::read_dir(&wcopy).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let a = fs::read(wdir.join(&name)).map_err(|e| e.to_string())?;
        let b = fs::read(wcopy.join(&name)).map_err(|e| e.to_string())?;
        ensure!(a == b, "witness file {name:?} does not round-trip");
    }

    // documented failure codes
    let mut rng = random::seeded(0xacc8);
    let gx = root.join("gx.json");
    let gy = root.join("gy.json");
    io::write_tensor(&gaussian_tensor(&mut rng, &[3, 3, 3]), &gx).map_err(|e| e.to_string())?;
    io::write_tensor(&gaussian_tensor(&mut rng, &[3, 3, 3]), &gy).map_err(|e| e.to_string())?;
    let out = s(&root.join("o"));
    expect_code(
        &tvn(&[
            "extract",
            "--x",
            &s(&gx),
            "--y",
            &s(&gy),
            "--output-dir",
            &out,
        ])?,
        4,
        "extract on a generic pair",
    )?;
    let a = root.join("a.json");
    let b = root.join("b.json");
    io::write_tensor(
        &Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).to_tensor(),
        &a,
    )
    .map_err(|e| e.to_string())?;
    io::write_tensor(
        &Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.5]]).to_tensor(),
        &b,
    )
    .map_err(|e| e.to_string())?;
    expect_code(
        &tvn(&[
            "extract",
            "--x",
            &s(&a),
            "--y",
            &s(&b),
            "--output-dir",
            &out,
        ])?,
        5,
        "extract on a degenerate pair",
    )?;
    expect_code(
        &tvn(&["check", "--x", &s(&gx), "--y", &s(&a)])?,
        1,
        "check with mismatched shapes",
    )?;
    expect_code(&tvn(&["check", "--x", &s(&gx)])?, 2, "check without --y")?;
    Ok("witness, check, extract and exit codes 0/1/2/4/5; tensors, spec, report and witness rewrite byte for byte".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("inequality sweep", inequality_sweep),
        ("HOSVD validity", hosvd_validity),
        ("norm identities", norm_identities),
        ("matricization oracle", matricization_oracle),
        ("equality witnesses", equality_witnesses),
        ("extraction round trip", extraction_round_trip),
        ("matrix specialization", matrix_specialization),
        ("CLI end to end", cli_end_to_end),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(format!(
                "panicked: {:?}",
                p.downcast_ref::<String>()
                    .map(String::as_str)
                    .or(p.downcast_ref::<&str>().copied())
            ))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail}; {secs:.2}s)", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({detail})", n + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
