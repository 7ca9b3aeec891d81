//! Command implementations: each builds per-trial check rows and an
//! aggregated report; the binary maps `pass` onto the exit code.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qmetric_core::{
    adjoint, basis_b, certify_non_isometry, check_kernel, check_quasi_leibniz,
    check_unitary_invariance, cond_expectation, cond_expectation_basis, cond_expectation_blockmean,
    eigh, embed, hs_inner, io, lip_eval, mk_distance, normalized_trace, operator_norm,
    operator_norm_hermitian, pairing, random_ginibre, random_hermitian, random_unitary,
    DivisorPair, HermitianMatrix, LipSpec, Matrix, MkOptions, MkResult,
};

use crate::report::{aggregate, CommandOutput, MkSummary, Report, TrialRow};

/// Validation or environment failure; the binary exits with code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

type CmdResult = Result<CommandOutput, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn from_core(e: qmetric_core::Error) -> UsageError {
    UsageError(e.to_string())
}

/// Distinct draw streams inside one trial; the trial stream itself is
/// `seed ^ trial`, so serial and parallel runs agree.
const DRAW_A: u64 = 0x9E37_79B9_7F4A_7C15;
const DRAW_B: u64 = 0x6A09_E667_F3BC_C909;
const DRAW_C: u64 = 0xBB67_AE85_84CA_A73B;

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ trial as u64
}

#[allow(clippy::too_many_arguments)]
fn finish(
    command: &str,
    seed: u64,
    n: usize,
    k: usize,
    trials: usize,
    tol: f64,
    rows: Vec<TrialRow>,
    started: Instant,
    decorate: impl FnOnce(&mut Report),
) -> CommandOutput {
    let checks = aggregate(&rows);
    let pass = checks.iter().all(|c| c.pass);
    let mut report = Report {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        n,
        k,
        trials,
        tol,
        lip1: None,
        lipk: None,
        gap: None,
        certificates: None,
        mk: None,
        value: None,
        checks,
        pass,
        wall_time_ms: started.elapsed().as_millis(),
    };
    decorate(&mut report);
    CommandOutput { report, rows }
}

fn proper_divisors(n: usize) -> Vec<usize> {
    (2..n).filter(|k| n.is_multiple_of(*k)).collect()
}

pub fn cmd_certify(n: usize, k: Option<usize>, all_k: bool, seed: u64) -> CmdResult {
    let started = Instant::now();
    let ks = if all_k {
        let ks = proper_divisors(n);
        if ks.is_empty() {
            return Err(usage(format!(
                "n = {n} has no proper nontrivial divisor; nothing to certify"
            )));
        }
        ks
    } else {
        let k = k.ok_or_else(|| usage("certify requires --k or --all-k"))?;
        if k <= 1 || k >= n || !n.is_multiple_of(k) {
            return Err(usage(format!(
                "k must divide n with 1 < k < n; got k = {k}, n = {n}"
            )));
        }
        vec![k]
    };

    let mut rows = Vec::new();
    let mut certificates = Vec::new();
    for &kk in &ks {
        let report = certify_non_isometry(n, kk).map_err(from_core)?;
        rows.push(TrialRow::new(
            "certify.lip1_closed_form",
            n,
            kk,
            0,
            (report.lip1_value - report.closed_form_lip1).abs(),
            1e-12,
        ));
        rows.push(TrialRow::new(
            "certify.lipk_closed_form",
            n,
            kk,
            0,
            (report.lipk_value - report.closed_form_lipk).abs(),
            1e-12,
        ));
        rows.push(TrialRow::new(
            "certify.gap_positive_exact",
            n,
            kk,
            0,
            if qmetric_core::gap_positive_exact(n, kk) {
                0.0
            } else {
                1.0
            },
            0.5,
        ));
        certificates.push(report);
    }

    let single = (certificates.len() == 1).then(|| certificates[0].clone());
    let k_echo = if ks.len() == 1 { ks[0] } else { 0 };
    Ok(finish(
        "certify",
        seed,
        n,
        k_echo,
        1,
        1e-9,
        rows,
        started,
        |r| {
            if let Some(c) = single {
                r.lip1 = Some(c.lip1_value);
                r.lipk = Some(c.lipk_value);
                r.gap = Some(c.gap);
            }
            r.certificates = Some(certificates);
        },
    ))
}

const SUITES: [&str; 7] = [
    "cstar",
    "embed",
    "trace",
    "projection",
    "leibniz",
    "unitary",
    "kernel",
];

pub fn cmd_verify(suite: &str, n: usize, k: Option<usize>, trials: usize, seed: u64) -> CmdResult {
    let started = Instant::now();
    if !SUITES.contains(&suite) {
        return Err(usage(format!(
            "unknown suite '{suite}'; expected one of {}",
            SUITES.join(", ")
        )));
    }
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    if trials == 0 {
        return Err(usage("trials must be at least 1"));
    }
    if let Some(kk) = k {
        if kk == 0 || kk > n || !n.is_multiple_of(kk) {
            return Err(usage(format!("k must divide n; got k = {kk}, n = {n}")));
        }
    }
    let need_k = matches!(suite, "embed" | "trace" | "projection");
    if need_k && k.is_none() {
        return Err(usage(format!("suite '{suite}' requires --k")));
    }

    let mut rows = Vec::new();
    for trial in 0..trials {
        let s = trial_seed(seed, trial);
        match suite {
            "cstar" => suite_cstar(n, s, trial, &mut rows).map_err(from_core)?,
            "embed" => suite_embed(k.unwrap(), n, s, trial, &mut rows).map_err(from_core)?,
            "trace" => suite_trace(k.unwrap(), n, s, trial, &mut rows).map_err(from_core)?,
            "projection" => {
                suite_projection(k.unwrap(), n, s, trial, &mut rows).map_err(from_core)?
            }
            "leibniz" => suite_leibniz(n, k, s, trial, &mut rows).map_err(from_core)?,
            "unitary" => suite_unitary(n, s, trial, &mut rows).map_err(from_core)?,
            "kernel" => suite_kernel(n, s, trial, &mut rows).map_err(from_core)?,
            _ => unreachable!(),
        }
    }

    Ok(finish(
        "verify",
        seed,
        n,
        k.unwrap_or(0),
        trials,
        1e-9,
        rows,
        started,
        |_| {},
    ))
}

fn suite_cstar(
    n: usize,
    s: u64,
    trial: usize,
    rows: &mut Vec<TrialRow>,
) -> qmetric_core::Result<()> {
    let a = random_ginibre(n, s ^ DRAW_A);
    let b = random_ginibre(n, s ^ DRAW_B);
    let na = operator_norm(&a)?;
    let naa = operator_norm(&adjoint(&a).mul(&a)?)?;
    rows.push(TrialRow::new(
        "cstar.identity",
        n,
        0,
        trial,
        (naa - na * na).abs() / (1.0 + na * na),
        1e-8,
    ));
    let nb = operator_norm(&b)?;
    let nab = operator_norm(&a.mul(&b)?)?;
    rows.push(TrialRow::new(
        "cstar.submultiplicative",
        n,
        0,
        trial,
        (nab - na * nb).max(0.0),
        1e-9,
    ));
    Ok(())
}

fn suite_embed(
    k: usize,
    n: usize,
    s: u64,
    trial: usize,
    rows: &mut Vec<TrialRow>,
) -> qmetric_core::Result<()> {
    let pair = DivisorPair::new(k, n)?;
    let a = random_ginibre(k, s ^ DRAW_A);
    let b = random_ginibre(k, s ^ DRAW_B);
    let ea = embed(pair, &a)?;
    let eb = embed(pair, &b)?;
    rows.push(TrialRow::new(
        "embed.isometry",
        n,
        k,
        trial,
        (operator_norm(&ea)? - operator_norm(&a)?).abs(),
        1e-10,
    ));
    rows.push(TrialRow::new(
        "embed.multiplicative",
        n,
        k,
        trial,
        embed(pair, &a.mul(&b)?)?
            .sub(&ea.mul(&eb)?)?
            .max_abs_entry(),
        1e-12,
    ));
    rows.push(TrialRow::new(
        "embed.star_preserving",
        n,
        k,
        trial,
        embed(pair, &adjoint(&a))?
            .sub(&adjoint(&ea))?
            .max_abs_entry(),
        1e-12,
    ));
    Ok(())
}

fn suite_trace(
    k: usize,
    n: usize,
    s: u64,
    trial: usize,
    rows: &mut Vec<TrialRow>,
) -> qmetric_core::Result<()> {
    let pair = DivisorPair::new(k, n)?;
    let a = random_ginibre(k, s ^ DRAW_A);
    let resid = (normalized_trace(&embed(pair, &a)?)? - normalized_trace(&a)?).norm();
    rows.push(TrialRow::new(
        "trace.compatibility",
        n,
        k,
        trial,
        resid,
        1e-12,
    ));
    Ok(())
}

fn suite_projection(
    k: usize,
    n: usize,
    s: u64,
    trial: usize,
    rows: &mut Vec<TrialRow>,
) -> qmetric_core::Result<()> {
    let pair = DivisorPair::new(k, n)?;
    let a = random_ginibre(n, s ^ DRAW_A);
    let p = cond_expectation(pair, &a)?;

    rows.push(TrialRow::new(
        "projection.cross_blockmean",
        n,
        k,
        trial,
        cond_expectation_blockmean(pair, &a)?
            .sub(&p)?
            .max_abs_entry(),
        1e-13,
    ));
    rows.push(TrialRow::new(
        "projection.cross_basis",
        n,
        k,
        trial,
        cond_expectation_basis(pair, &a)?.sub(&p)?.max_abs_entry(),
        1e-13,
    ));
    rows.push(TrialRow::new(
        "projection.idempotent",
        n,
        k,
        trial,
        cond_expectation(pair, &p)?.sub(&p)?.max_abs_entry(),
        1e-12,
    ));
    rows.push(TrialRow::new(
        "projection.trace_preserving",
        n,
        k,
        trial,
        (normalized_trace(&p)? - normalized_trace(&a)?).norm(),
        1e-12,
    ));
    rows.push(TrialRow::new(
        "projection.contractive",
        n,
        k,
        trial,
        (operator_norm(&p)? - operator_norm(&a)?).max(0.0),
        1e-9,
    ));

    let aa = a.mul(&adjoint(&a))?;
    let paa = cond_expectation(pair, &aa)?;
    let min_eig = eigh(&HermitianMatrix::new(paa)?)?.min_eigenvalue();
    rows.push(TrialRow::new(
        "projection.positivity_transfer",
        n,
        k,
        trial,
        (-min_eig).max(0.0),
        1e-9,
    ));

    let b = embed(pair, &random_ginibre(k, s ^ DRAW_B))?;
    let c = embed(pair, &random_ginibre(k, s ^ DRAW_C))?;
    let lhs = cond_expectation(pair, &b.mul(&a)?.mul(&c)?)?;
    let rhs = b.mul(&p)?.mul(&c)?;
    let scale = 1.0 + lhs.max_abs_entry().max(rhs.max_abs_entry());
    rows.push(TrialRow::new(
        "projection.module_property",
        n,
        k,
        trial,
        lhs.sub(&rhs)?.max_abs_entry() / scale,
        1e-12,
    ));
    rows.push(TrialRow::new(
        "projection.fixed_point",
        n,
        k,
        trial,
        cond_expectation(pair, &b)?.sub(&b)?.max_abs_entry(),
        1e-12,
    ));

    let resid = a.sub(&p)?;
    let mut ortho: f64 = 0.0;
    for basis_elem in basis_b(pair) {
        ortho = ortho.max(hs_inner(&resid, &basis_elem)?.norm());
    }
    rows.push(TrialRow::new(
        "projection.residual_orthogonal",
        n,
        k,
        trial,
        ortho,
        1e-12,
    ));

    let p1 = DivisorPair::new(1, n)?;
    rows.push(TrialRow::new(
        "projection.tower",
        n,
        k,
        trial,
        cond_expectation(p1, &p)?
            .sub(&cond_expectation(p1, &a)?)?
            .max_abs_entry(),
        1e-12,
    ));
    Ok(())
}

fn suite_leibniz(
    n: usize,
    k: Option<usize>,
    s: u64,
    trial: usize,
    rows: &mut Vec<TrialRow>,
) -> qmetric_core::Result<()> {
    let a = random_hermitian(n, s ^ DRAW_A);
    let b = random_hermitian(n, s ^ DRAW_B);
    let scale = (1.0 + operator_norm_hermitian(&a)?) * (1.0 + operator_norm_hermitian(&b)?);

    let tspec = LipSpec::trace(n)?;
    let margin = check_quasi_leibniz(&tspec, &a, &b)?;
    rows.push(TrialRow::new(
        "leibniz.trace_variant",
        n,
        0,
        trial,
        (-margin).max(0.0) / scale,
        1e-9,
    ));

    if let Some(kk) = k {
        if kk > 1 && kk < n {
            let dspec = LipSpec::divisor(kk, n)?;
            let margin = check_quasi_leibniz(&dspec, &a, &b)?;
            rows.push(TrialRow::new(
                "leibniz.divisor_variant",
                n,
                kk,
                trial,
                (-margin).max(0.0) / scale,
                1e-9,
            ));
        }
    }
    Ok(())
}

fn suite_unitary(
    n: usize,
    s: u64,
    trial: usize,
    rows: &mut Vec<TrialRow>,
) -> qmetric_core::Result<()> {
    let u = random_unitary(n, s ^ DRAW_A);
    let a = random_hermitian(n, s ^ DRAW_B);
    let resid = check_unitary_invariance(n, &u, &a)?;
    let scale = 1.0 + operator_norm_hermitian(&a)?;
    rows.push(TrialRow::new(
        "unitary.invariance",
        n,
        0,
        trial,
        resid / scale,
        1e-9,
    ));
    Ok(())
}

fn suite_kernel(
    n: usize,
    s: u64,
    trial: usize,
    rows: &mut Vec<TrialRow>,
) -> qmetric_core::Result<()> {
    let spec = LipSpec::trace(n)?;
    let r = 3.0 * ((s % 1000) as f64 / 500.0 - 1.0);
    let scalar = HermitianMatrix::from_diag_re(&vec![r; n]);
    rows.push(TrialRow::new(
        "kernel.scalar_in_kernel",
        n,
        0,
        trial,
        if check_kernel(&spec, &scalar)? && lip_eval(&spec, &scalar)? <= 1e-10 {
            0.0
        } else {
            1.0
        },
        0.5,
    ));

    let a = random_hermitian(n, s ^ DRAW_A);
    let tr = normalized_trace(a.matrix())?.re;
    let centered =
        HermitianMatrix::with_tolerance(a.matrix().sub(&Matrix::identity(n).scale_re(tr))?, 1e-9)?;
    let norm = operator_norm_hermitian(&centered)?;
    if norm > 1e-6 {
        let unit = centered.scale_re(1.0 / norm);
        let consistent = check_kernel(&spec, &unit)? && lip_eval(&spec, &unit)? > 1e-10;
        rows.push(TrialRow::new(
            "kernel.nonscalar_separated",
            n,
            0,
            trial,
            if consistent { 0.0 } else { 1.0 },
            0.5,
        ));
    }
    Ok(())
}

fn parse_spec(variant: &str, n: usize, k: Option<usize>) -> Result<LipSpec, UsageError> {
    match variant {
        "trace" => LipSpec::trace(n).map_err(from_core),
        "k" => {
            let k = k.ok_or_else(|| usage("--variant k requires --k"))?;
            LipSpec::divisor(k, n).map_err(from_core)
        }
        other => Err(usage(format!(
            "unknown variant '{other}'; expected 'trace' or 'k'"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_mk(
    variant: &str,
    n: usize,
    k: Option<usize>,
    rho_path: &Path,
    sigma_path: &Path,
    max_iters: usize,
    tol: f64,
    out: Option<&PathBuf>,
    seed: u64,
) -> CmdResult {
    let started = Instant::now();
    let spec = parse_spec(variant, n, k)?;
    let rho =
        io::read_density(rho_path).map_err(|e| usage(format!("{}: {e}", rho_path.display())))?;
    let sigma = io::read_density(sigma_path)
        .map_err(|e| usage(format!("{}: {e}", sigma_path.display())))?;
    if rho.dim() != n || sigma.dim() != n {
        return Err(usage(format!(
            "state dimension mismatch: expected {n}, got {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }

    let opts = MkOptions {
        max_iters,
        tol,
        ..MkOptions::default()
    };
    let result: MkResult = mk_distance(&spec, &rho, &sigma, &opts).map_err(from_core)?;

    let mut rows = Vec::new();
    rows.push(TrialRow::new(
        "mk.certificate_feasible",
        n,
        k.unwrap_or(0),
        0,
        (lip_eval(&spec, &result.certificate).map_err(from_core)? - 1.0).max(0.0),
        1e-9,
    ));
    let diff = pairing(&rho, &result.certificate).map_err(from_core)?
        - pairing(&sigma, &result.certificate).map_err(from_core)?;
    rows.push(TrialRow::new(
        "mk.value_matches_certificate",
        n,
        k.unwrap_or(0),
        0,
        (diff.abs() - result.value.abs()).abs(),
        1e-9,
    ));
    if let Some(ov) = result.oracle_value {
        rows.push(TrialRow::new(
            "mk.oracle_agreement",
            n,
            k.unwrap_or(0),
            0,
            (result.value - ov).abs(),
            tol,
        ));
    }
    rows.push(TrialRow::new(
        "mk.converged",
        n,
        k.unwrap_or(0),
        0,
        if result.converged { 0.0 } else { 1.0 },
        0.5,
    ));

    if let Some(path) = out {
        io::write_matrix(path, result.certificate.matrix())
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }

    let summary = MkSummary {
        value: result.value,
        iterations: result.iterations,
        converged: result.converged,
        oracle_value: result.oracle_value,
    };
    Ok(finish(
        "mk",
        seed,
        n,
        k.unwrap_or(0),
        1,
        tol,
        rows,
        started,
        |r| r.mk = Some(summary),
    ))
}

pub fn cmd_embed(k: usize, n: usize, input: &Path, output: &Path, seed: u64) -> CmdResult {
    let started = Instant::now();
    let pair = DivisorPair::new(k, n).map_err(from_core)?;
    let a = io::read_matrix(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let embedded = embed(pair, &a).map_err(from_core)?;
    io::write_matrix(output, &embedded).map_err(|e| usage(format!("{}: {e}", output.display())))?;

    let mut rows = Vec::new();
    rows.push(TrialRow::new(
        "embed.isometry",
        n,
        k,
        0,
        (operator_norm(&embedded).map_err(from_core)? - operator_norm(&a).map_err(from_core)?)
            .abs(),
        1e-10,
    ));
    rows.push(TrialRow::new(
        "embed.trace_compatibility",
        n,
        k,
        0,
        (normalized_trace(&embedded).map_err(from_core)?
            - normalized_trace(&a).map_err(from_core)?)
        .norm(),
        1e-12,
    ));
    Ok(finish("embed", seed, n, k, 1, 1e-9, rows, started, |_| {}))
}

pub fn cmd_project(n: usize, k: usize, input: &Path, output: &Path, seed: u64) -> CmdResult {
    let started = Instant::now();
    let pair = DivisorPair::new(k, n).map_err(from_core)?;
    let a = io::read_matrix(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let projected = cond_expectation(pair, &a).map_err(from_core)?;
    io::write_matrix(output, &projected)
        .map_err(|e| usage(format!("{}: {e}", output.display())))?;

    let mut rows = Vec::new();
    rows.push(TrialRow::new(
        "project.idempotent",
        n,
        k,
        0,
        cond_expectation(pair, &projected)
            .map_err(from_core)?
            .sub(&projected)
            .map_err(from_core)?
            .max_abs_entry(),
        1e-12,
    ));
    rows.push(TrialRow::new(
        "project.trace_preserving",
        n,
        k,
        0,
        (normalized_trace(&projected).map_err(from_core)?
            - normalized_trace(&a).map_err(from_core)?)
        .norm(),
        1e-12,
    ));
    Ok(finish(
        "project",
        seed,
        n,
        k,
        1,
        1e-9,
        rows,
        started,
        |_| {},
    ))
}

pub fn cmd_lipnorm(
    variant: &str,
    n: usize,
    k: Option<usize>,
    input: &Path,
    seed: u64,
) -> CmdResult {
    let started = Instant::now();
    let spec = parse_spec(variant, n, k)?;
    let a = io::read_matrix(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    if a.n_rows() != n || a.n_cols() != n {
        return Err(usage(format!(
            "input must be {n}x{n}, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let h = HermitianMatrix::new(a).map_err(from_core)?;
    let value = lip_eval(&spec, &h).map_err(from_core)?;

    let rows = vec![TrialRow::new(
        "lipnorm.nonnegative",
        n,
        k.unwrap_or(0),
        0,
        (-value).max(0.0),
        0.0,
    )];
    Ok(finish(
        "lipnorm",
        seed,
        n,
        k.unwrap_or(0),
        1,
        1e-9,
        rows,
        started,
        |r| r.value = Some(value),
    ))
}
