//! Command-line surface for the chain and dynamical-model engine.
//!
//! One job per invocation; each subcommand parses its configuration,
//! drives the core library, and emits a machine-readable document of the
//! form `{"config", "result", "checks"}` (or CSV for tabular outputs).
//! Exit status composes with CI: 0 when every check passes, 1 on domain
//! or usage errors (one-line diagnostic on stderr), 2 when a verification
//! check fails beyond its pinned tolerance.
//!
//! The coupling parameter `beta` is parsed exactly — `P/Q`, integer, or
//! decimal literals all become big rationals, so spectra and degeneracies
//! are computed without rounding.  `--irrational-approx DIGITS` covers the
//! complementary regime: the given decimal is rounded to `DIGITS` places
//! and the level table keeps its lattice keys unmerged, since for a
//! non-rational coupling distinct keys never share an energy.

mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fichain::dunkl::triangularity_report;
use fichain::dynamical::freezing_ratio_check;
use fichain::ed::{
    build_hamiltonian, build_hamiltonian_capped, chain_eigenvalues, ed_tolerance,
    verify_against_motifs,
};
use fichain::geometry::{
    build_geometry, coupling_identities, gradient_residual, LatticeSpec,
};
use fichain::motif::{
    extremes, partition_eval, spectrum, spectrum_with, Epsilon, SpectrumOptions,
    SpectrumTable,
};
use fichain::rational::round_to_decimal_digits;
use fichain::stats::{
    closed_form_moments, empirical_moments, fd_histogram, gaussian_comparison,
    regime_diagnostics, spacings_cdf_rms, spacings_law, spacings_law_params,
    unfold_and_spacings,
};
use fichain::{
    parse_rational, rational_to_f64, rational_to_string, BigInt, BigUint, FiError, Rational,
    Result,
};

use output::{csv_table, document, float_repr, Check, Json};

/// Stationarity residual bound for the site solver.
const RESIDUAL_TOL: f64 = 1e-9;
/// Relative bound for the seven coupling sum rules.
const IDENTITY_RTOL: f64 = 1e-9;
/// Relative agreement required between the two partition-function routes.
const PARTITION_ROUTE_RTOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "fichain",
    version,
    about = "Exact spectra, partition functions, and spectral statistics \
             of the Frahm-Inozemtsev chain and its dynamical model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Output format: json, or csv for tabular commands (sites, spectrum,
    /// spacings).
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the document to PATH instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    /// Number of sites N.
    #[arg(long)]
    n: usize,
    /// Spin values per site m.
    #[arg(long)]
    m: usize,
    /// Coupling sign: +1 (ferro) or -1 (antiferro).
    #[arg(long, allow_hyphen_values = true)]
    epsilon: String,
    /// Coupling parameter: "P/Q", integer, or decimal (parsed exactly).
    #[arg(long)]
    beta: String,
}

#[derive(Subcommand)]
enum Command {
    /// Chain sites (Laguerre zeros), couplings, and the sum-rule report.
    Sites {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Exact level table with lattice keys and degeneracies.
    Spectrum {
        #[command(flatten)]
        chain: ChainArgs,
        /// Round beta to this many decimal places and keep lattice keys
        /// unmerged (irrational-coupling mode).
        #[arg(long)]
        irrational_approx: Option<u32>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Partition function by both routes (table sum vs composition sum).
    Partition {
        #[command(flatten)]
        chain: ChainArgs,
        /// Temperature T > 0; evaluates at q = exp(-1/T).
        #[arg(long)]
        temperature: Option<f64>,
        /// Direct Boltzmann variable q in (0, 1); alternative to
        /// --temperature.
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Extremal levels, the minimizing motif, and the mode-sum range.
    Extremes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Dense diagonalization cross-check against the motif table.
    EdVerify {
        #[command(flatten)]
        chain: ChainArgs,
        /// Maximum dense dimension m^N to accept.
        #[arg(long)]
        cap: Option<usize>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Large-coupling freezing check of the dynamical partition ratio.
    FreezeVerify {
        #[command(flatten)]
        chain: ChainArgs,
        /// Temperature T > 0.
        #[arg(long)]
        temperature: f64,
        /// Comma-separated increasing coupling probes.
        #[arg(long, default_value = "50,100,200")]
        a_list: String,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Exact triangularity report for the differential-difference
    /// operators.
    DunklVerify {
        /// Number of variables N.
        #[arg(long)]
        n: usize,
        /// Per-variable degree cap of the monomial module.
        #[arg(long)]
        cap: u32,
        /// Coupling a (rational, > 1/2).
        #[arg(long)]
        a: String,
        /// Coupling b (rational, > 0).
        #[arg(long)]
        b: String,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Spectral moments, Gaussian comparison, and the level-density
    /// histogram.
    Stats {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Unfolded levels, spacings, empirical CDF, the analytic law, and
    /// regime diagnostics.
    Spacings {
        #[command(flatten)]
        chain: ChainArgs,
        /// Sample count for the analytic curve over [s0, s_max].
        #[arg(long, default_value_t = 101)]
        curve_samples: usize,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn parse_format(io: &IoArgs) -> Result<Format> {
    match io.format.as_str() {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(FiError::domain(format!(
            "unknown format {other:?}; expected json or csv"
        ))),
    }
}

fn parse_epsilon(text: &str) -> Result<Epsilon> {
    let v: i64 = text.trim().parse().map_err(|_| {
        FiError::domain(format!("epsilon must be +1 or -1, got {text:?}"))
    })?;
    Epsilon::from_sign(v)
}

struct ChainConfig {
    n: usize,
    m: usize,
    epsilon: Epsilon,
    beta: Rational,
}

impl ChainArgs {
    fn parse(&self) -> Result<ChainConfig> {
        Ok(ChainConfig {
            n: self.n,
            m: self.m,
            epsilon: parse_epsilon(&self.epsilon)?,
            beta: parse_rational(&self.beta)?,
        })
    }
}

fn chain_config_json(command: &str, cfg: &ChainConfig) -> Json {
    Json::Object(vec![
        ("command", Json::Str(command.to_string())),
        ("n", Json::size(cfg.n)),
        ("m", Json::size(cfg.m)),
        ("epsilon", Json::Int(cfg.epsilon.sign())),
        ("beta", Json::rational(&cfg.beta)),
    ])
}

fn key_json(key: &fichain::motif::EnergyKey, beta: &Rational) -> Json {
    let value = key.value(beta);
    Json::Object(vec![
        ("a", Json::Int(key.a as i64)),
        ("b", Json::Int(key.b)),
        ("energy", Json::Float(rational_to_f64(&value))),
        ("energy_exact", Json::rational(&value)),
    ])
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                FiError::Verification(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: Command) -> Result<bool> {
    let (io, text, all_passed) = match command {
        Command::Sites { n, beta, io } => {
            let (text, ok) = cmd_sites(n, &beta, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::Spectrum { chain, irrational_approx, io } => {
            let (text, ok) =
                cmd_spectrum(&chain.parse()?, irrational_approx, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::Partition { chain, temperature, q, io } => {
            let (text, ok) =
                cmd_partition(&chain.parse()?, temperature, q, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::Extremes { n, m, beta, io } => {
            let (text, ok) =
                cmd_extremes(n, m, &parse_rational(&beta)?, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::EdVerify { chain, cap, io } => {
            let (text, ok) = cmd_ed_verify(&chain.parse()?, cap, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::FreezeVerify { chain, temperature, a_list, io } => {
            let (text, ok) =
                cmd_freeze_verify(&chain.parse()?, temperature, &a_list, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::DunklVerify { n, cap, a, b, io } => {
            let (text, ok) = cmd_dunkl_verify(n, cap, &a, &b, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::Stats { chain, io } => {
            let (text, ok) = cmd_stats(&chain.parse()?, parse_format(&io)?)?;
            (io, text, ok)
        }
        Command::Spacings { chain, curve_samples, io } => {
            let (text, ok) =
                cmd_spacings(&chain.parse()?, curve_samples, parse_format(&io)?)?;
            (io, text, ok)
        }
    };
    match &io.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| {
            FiError::resource(format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{text}"),
    }
    Ok(all_passed)
}

fn require_json(format: Format) -> Result<()> {
    if format == Format::Csv {
        return Err(FiError::domain(
            "CSV is available for the tabular commands (sites, spectrum, spacings)",
        ));
    }
    Ok(())
}

fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn cmd_sites(n: usize, beta_text: &str, format: Format) -> Result<(String, bool)> {
    let beta = parse_rational(beta_text)?;
    let spec = LatticeSpec::new(n, beta.clone())?;
    let geom = build_geometry(&spec)?;
    let residuals = gradient_residual(geom.zeta(), spec.beta_f64());
    let max_residual = residuals.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let report = coupling_identities(&geom);
    let checks = vec![
        Check::new(
            "site stationarity residual within tolerance",
            max_residual <= RESIDUAL_TOL,
            format!("max |r_i| = {} (tol {RESIDUAL_TOL:e})", float_repr(max_residual)),
        ),
        Check::new(
            "coupling sum rules hold",
            report.max_rel_err <= IDENTITY_RTOL,
            format!(
                "max relative error = {} (tol {IDENTITY_RTOL:e})",
                float_repr(report.max_rel_err)
            ),
        ),
    ];
    if format == Format::Csv {
        let rows: Vec<Vec<String>> = (0..geom.n())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    float_repr(geom.zeta()[i]),
                    float_repr(geom.xi()[i]),
                ]
            })
            .collect();
        return Ok((csv_table(&["index", "zeta", "xi"], &rows), all_passed(&checks)));
    }
    let sites: Vec<Json> = (0..geom.n())
        .map(|i| {
            Json::Object(vec![
                ("index", Json::size(i + 1)),
                ("zeta", Json::Float(geom.zeta()[i])),
                ("xi", Json::Float(geom.xi()[i])),
            ])
        })
        .collect();
    let mut couplings = Vec::new();
    for i in 0..geom.n() {
        for j in (i + 1)..geom.n() {
            couplings.push(Json::Object(vec![
                ("i", Json::size(i + 1)),
                ("j", Json::size(j + 1)),
                ("h", Json::Float(geom.coupling(i, j))),
            ]));
        }
    }
    let identities: Vec<Json> = report
        .checks
        .iter()
        .map(|c| {
            Json::Object(vec![
                ("name", Json::Str(c.name.to_string())),
                ("lhs", Json::Float(c.lhs)),
                ("rhs", Json::Float(c.rhs)),
                ("rel_err", Json::Float(c.rel_err)),
            ])
        })
        .collect();
    let config = Json::Object(vec![
        ("command", Json::Str("sites".to_string())),
        ("n", Json::size(n)),
        ("beta", Json::rational(&beta)),
    ]);
    let result = Json::Object(vec![
        ("alpha", Json::rational(&spec.alpha())),
        ("sites", Json::Array(sites)),
        ("couplings", Json::Array(couplings)),
        ("coupling_sum", Json::Float(geom.coupling_sum())),
        ("max_residual", Json::Float(max_residual)),
        ("identities", Json::Array(identities)),
    ]);
    Ok((document(config, result, &checks), all_passed(&checks)))
}

/// All (key, degeneracy) constituents of every distinct level, ascending.
fn all_constituents(
    table: &SpectrumTable,
) -> Vec<(Rational, fichain::motif::EnergyKey, BigUint)> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for level in table.levels() {
        if !seen.insert(level.value.clone()) {
            continue;
        }
        for (key, degeneracy) in table.constituents(&level.value).expect("known level") {
            out.push((level.value.clone(), *key, degeneracy.clone()));
        }
    }
    out
}

fn spectrum_invariant_checks(table: &SpectrumTable) -> Vec<Check> {
    let expected_total = BigUint::from(table.m()).pow(table.n() as u32);
    let total = table.total_degeneracy();
    let mut checks = vec![Check::new(
        "total degeneracy equals m^N",
        total == expected_total,
        format!("{total} vs {expected_total}"),
    )];
    let constituents = all_constituents(table);
    let odd_offsets =
        constituents.iter().filter(|(_, key, _)| key.b.rem_euclid(2) != 0).count();
    checks.push(Check::new(
        "lattice offsets are even",
        odd_offsets == 0,
        format!("{odd_offsets} keys with odd offset"),
    ));
    let beta = table.beta();
    if beta.is_integer() {
        let non_integer = constituents
            .iter()
            .filter(|(value, _, _)| !value.is_integer())
            .count();
        checks.push(Check::new(
            "integer coupling gives an integer spectrum",
            non_integer == 0,
            format!("{non_integer} non-integer levels"),
        ));
        if (beta.numer() % BigInt::from(2)) == BigInt::from(0) {
            let odd = constituents
                .iter()
                .filter(|(value, _, _)| {
                    !value.is_integer() || (value.numer() % BigInt::from(2)) != BigInt::from(0)
                })
                .count();
            checks.push(Check::new(
                "even coupling gives an even spectrum",
                odd == 0,
                format!("{odd} odd levels"),
            ));
        }
    }
    checks
}

fn cmd_spectrum(
    cfg: &ChainConfig,
    irrational_approx: Option<u32>,
    format: Format,
) -> Result<(String, bool)> {
    let (beta, merged) = match irrational_approx {
        Some(digits) => (round_to_decimal_digits(&cfg.beta, digits), false),
        None => (cfg.beta.clone(), true),
    };
    let opts = SpectrumOptions { merge_equal_energies: merged, ..Default::default() };
    let table = spectrum_with(cfg.n, cfg.m, cfg.epsilon, &beta, &opts)?;
    let checks = spectrum_invariant_checks(&table);
    let constituents = all_constituents(&table);
    if format == Format::Csv {
        let rows: Vec<Vec<String>> = constituents
            .iter()
            .map(|(value, key, degeneracy)| {
                vec![
                    key.a.to_string(),
                    key.b.to_string(),
                    float_repr(rational_to_f64(value)),
                    rational_to_string(value),
                    degeneracy.to_string(),
                ]
            })
            .collect();
        return Ok((
            csv_table(&["a", "b", "energy", "energy_exact", "degeneracy"], &rows),
            all_passed(&checks),
        ));
    }
    let levels: Vec<Json> = table
        .levels()
        .iter()
        .map(|level| {
            Json::Object(vec![
                ("a", Json::Int(level.key.a as i64)),
                ("b", Json::Int(level.key.b)),
                ("energy", Json::Float(rational_to_f64(&level.value))),
                ("energy_exact", Json::rational(&level.value)),
                ("degeneracy", Json::big(&level.degeneracy)),
            ])
        })
        .collect();
    let mut config_fields = vec![
        ("command", Json::Str("spectrum".to_string())),
        ("n", Json::size(cfg.n)),
        ("m", Json::size(cfg.m)),
        ("epsilon", Json::Int(cfg.epsilon.sign())),
        ("beta", Json::rational(&beta)),
    ];
    if let Some(digits) = irrational_approx {
        config_fields.push(("irrational_approx", Json::Int(digits as i64)));
    }
    let result = Json::Object(vec![
        ("merged", Json::Bool(table.merged())),
        ("level_count", Json::size(table.len())),
        ("total_degeneracy", Json::big(&table.total_degeneracy())),
        ("levels", Json::Array(levels)),
    ]);
    Ok((
        document(Json::Object(config_fields), result, &checks),
        all_passed(&checks),
    ))
}

fn cmd_partition(
    cfg: &ChainConfig,
    temperature: Option<f64>,
    q_flag: Option<f64>,
    format: Format,
) -> Result<(String, bool)> {
    require_json(format)?;
    let q = match (temperature, q_flag) {
        (Some(_), Some(_)) => {
            return Err(FiError::domain(
                "give either --temperature or --q, not both",
            ))
        }
        (None, None) => {
            return Err(FiError::domain("one of --temperature or --q is required"))
        }
        (None, Some(q)) => q,
        (Some(t), None) => {
            if !(t > 0.0) {
                return Err(FiError::domain(format!("temperature must be positive, got {t}")));
            }
            (-1.0 / t).exp()
        }
    };
    let table = spectrum(cfg.n, cfg.m, cfg.epsilon, &cfg.beta)?;
    let eval = partition_eval(&table, q)?;
    let checks = vec![Check::new(
        "partition routes agree",
        eval.rel_diff <= PARTITION_ROUTE_RTOL,
        format!(
            "relative difference = {} (tol {PARTITION_ROUTE_RTOL:e})",
            float_repr(eval.rel_diff)
        ),
    )];
    let mut config = chain_config_json("partition", cfg);
    if let Json::Object(fields) = &mut config {
        if let Some(t) = temperature {
            fields.push(("temperature", Json::Float(t)));
        }
    }
    let result = Json::Object(vec![
        ("q", Json::Float(eval.q)),
        ("z_table", Json::Float(eval.z_table)),
        ("z_composition", Json::Float(eval.z_composition)),
        ("rel_diff", Json::Float(eval.rel_diff)),
    ]);
    Ok((document(config, result, &checks), all_passed(&checks)))
}

fn cmd_extremes(
    n: usize,
    m: usize,
    beta: &Rational,
    format: Format,
) -> Result<(String, bool)> {
    require_json(format)?;
    let ext = extremes(n, m, beta)?;
    let motif_string: String =
        ext.min_motif.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
    let checks = vec![Check::new(
        "closed-form extremes match the constructed motifs",
        true,
        "asserted exactly during construction".to_string(),
    )];
    let config = Json::Object(vec![
        ("command", Json::Str("extremes".to_string())),
        ("n", Json::size(n)),
        ("m", Json::size(m)),
        ("beta", Json::rational(beta)),
    ]);
    let result = Json::Object(vec![
        ("e_min", key_json(&ext.e_min, beta)),
        ("e_max", key_json(&ext.e_max, beta)),
        ("min_motif", Json::Str(motif_string)),
        (
            "j_range",
            Json::Array(vec![
                Json::Int(ext.j_range.0 as i64),
                Json::Int(ext.j_range.1 as i64),
            ]),
        ),
    ]);
    Ok((document(config, result, &checks), all_passed(&checks)))
}

fn cmd_ed_verify(
    cfg: &ChainConfig,
    cap: Option<usize>,
    format: Format,
) -> Result<(String, bool)> {
    require_json(format)?;
    let spec = LatticeSpec::new(cfg.n, cfg.beta.clone())?;
    let geom = build_geometry(&spec)?;
    let h = match cap {
        Some(max_dim) => build_hamiltonian_capped(&geom, cfg.m, cfg.epsilon, max_dim)?,
        None => build_hamiltonian(&geom, cfg.m, cfg.epsilon)?,
    };
    let eigs = chain_eigenvalues(h)?;
    let table = spectrum(cfg.n, cfg.m, cfg.epsilon, &cfg.beta)?;
    let scale = [table.min_level(), table.max_level()]
        .into_iter()
        .flatten()
        .map(|level| rational_to_f64(&level.value).abs())
        .fold(0.0f64, f64::max);
    let cmp = verify_against_motifs(&table, &eigs, ed_tolerance(scale))?;
    let checks = vec![Check::new(
        "eigenvalues match the motif table",
        cmp.passed,
        format!(
            "max |deviation| = {} (tol {})",
            float_repr(cmp.max_abs_err),
            float_repr(cmp.tol)
        ),
    )];
    let result = Json::Object(vec![
        ("dim", Json::size(cmp.dim)),
        ("level_count", Json::size(table.len())),
        ("max_abs_err", Json::Float(cmp.max_abs_err)),
        ("tol", Json::Float(cmp.tol)),
    ]);
    Ok((
        document(chain_config_json("ed-verify", cfg), result, &checks),
        all_passed(&checks),
    ))
}

fn cmd_freeze_verify(
    cfg: &ChainConfig,
    temperature: f64,
    a_list: &str,
    format: Format,
) -> Result<(String, bool)> {
    require_json(format)?;
    let a_values: Vec<Rational> = a_list
        .split(',')
        .map(|piece| parse_rational(piece))
        .collect::<Result<_>>()?;
    let report = freezing_ratio_check(
        cfg.n,
        cfg.m,
        cfg.epsilon,
        &cfg.beta,
        temperature,
        &a_values,
    )?;
    let checks = vec![
        Check::new(
            "freezing error decreases monotonically",
            report.monotone,
            format!(
                "errors: [{}]",
                report
                    .probes
                    .iter()
                    .map(|p| float_repr(p.error))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ),
        Check::new(
            "error quotients sit in the halving band [0.3, 0.7]",
            report.quotients_in_band,
            format!(
                "quotients: [{}]",
                report
                    .error_quotients
                    .iter()
                    .map(|v| float_repr(*v))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ),
    ];
    let probes: Vec<Json> = report
        .probes
        .iter()
        .map(|p| {
            Json::Object(vec![
                ("a", Json::rational(&p.a)),
                ("ratio", Json::Float(p.ratio)),
                ("error", Json::Float(p.error)),
            ])
        })
        .collect();
    let mut config = chain_config_json("freeze-verify", cfg);
    if let Json::Object(fields) = &mut config {
        fields.push(("temperature", Json::Float(temperature)));
    }
    let result = Json::Object(vec![
        ("target", Json::Float(report.target)),
        ("probes", Json::Array(probes)),
        (
            "error_quotients",
            Json::Array(report.error_quotients.iter().map(|v| Json::Float(*v)).collect()),
        ),
    ]);
    Ok((document(config, result, &checks), all_passed(&checks)))
}

fn cmd_dunkl_verify(
    n: usize,
    cap: u32,
    a_text: &str,
    b_text: &str,
    format: Format,
) -> Result<(String, bool)> {
    require_json(format)?;
    let a = parse_rational(a_text)?;
    let b = parse_rational(b_text)?;
    let report = triangularity_report(n, cap, a.clone(), b.clone())?;
    let detail = |ok: bool| {
        if ok {
            "exact".to_string()
        } else {
            report.violations.join("; ")
        }
    };
    let checks = vec![
        Check::new(
            "lowering operators connect only to preceding monomials",
            report.j_minus_strict,
            detail(report.j_minus_strict),
        ),
        Check::new(
            "mixed operators stay within the rearrangement class",
            report.j_zero_weak,
            detail(report.j_zero_weak),
        ),
        Check::new(
            "squared-operator diagonal equals the eigenvalue factors",
            report.sum_squares_diagonal,
            detail(report.sum_squares_diagonal),
        ),
        Check::new(
            "squared-operator off-diagonal strictly precedes",
            report.sum_squares_strict_off,
            detail(report.sum_squares_strict_off),
        ),
        Check::new(
            "auxiliary Hamiltonian diagonal equals the energy formula",
            report.h_prime_diagonal,
            detail(report.h_prime_diagonal),
        ),
    ];
    let config = Json::Object(vec![
        ("command", Json::Str("dunkl-verify".to_string())),
        ("n", Json::size(n)),
        ("cap", Json::Int(cap as i64)),
        ("a", Json::rational(&a)),
        ("b", Json::rational(&b)),
    ]);
    let result = Json::Object(vec![
        ("basis_size", Json::size(report.basis_size)),
        (
            "violations",
            Json::Array(report.violations.iter().map(|v| Json::Str(v.clone())).collect()),
        ),
    ]);
    Ok((document(config, result, &checks), all_passed(&checks)))
}

/// Degeneracy-weighted level-density histogram (fractions of m^N).
fn level_density_json(table: &SpectrumTable) -> Json {
    let mut values = Vec::new();
    let mut weights = Vec::new();
    let total = Rational::from_integer(BigInt::from(table.total_degeneracy()));
    let mut seen = std::collections::BTreeSet::new();
    for level in table.levels() {
        if !seen.insert(level.value.clone()) {
            continue;
        }
        let mut degeneracy = BigUint::from(0u32);
        for (_, d) in table.constituents(&level.value).expect("known level") {
            degeneracy += d.clone();
        }
        values.push(rational_to_f64(&level.value));
        let fraction = Rational::from_integer(BigInt::from(degeneracy)) / &total;
        weights.push(rational_to_f64(&fraction));
    }
    let bins = fd_histogram(&values);
    if bins.is_empty() {
        return Json::Array(Vec::new());
    }
    let min = bins[0].lo;
    let width = bins[0].hi - bins[0].lo;
    let mut bin_weights = vec![0.0f64; bins.len()];
    for (&v, &w) in values.iter().zip(weights.iter()) {
        let k = (((v - min) / width) as usize).min(bins.len() - 1);
        bin_weights[k] += w;
    }
    Json::Array(
        bins.iter()
            .zip(bin_weights.iter())
            .map(|(bin, &weight)| {
                Json::Object(vec![
                    ("lo", Json::Float(bin.lo)),
                    ("hi", Json::Float(bin.hi)),
                    ("weight", Json::Float(weight)),
                ])
            })
            .collect(),
    )
}

fn moment_json(mu: &Rational, sigma2: &Rational) -> Json {
    Json::Object(vec![
        ("mu", Json::Float(rational_to_f64(mu))),
        ("mu_exact", Json::rational(mu)),
        ("sigma2", Json::Float(rational_to_f64(sigma2))),
        ("sigma2_exact", Json::rational(sigma2)),
    ])
}

fn cmd_stats(cfg: &ChainConfig, format: Format) -> Result<(String, bool)> {
    require_json(format)?;
    let table = spectrum(cfg.n, cfg.m, cfg.epsilon, &cfg.beta)?;
    let closed = closed_form_moments(cfg.n, cfg.m, &cfg.beta, cfg.epsilon)?;
    let flipped = closed_form_moments(cfg.n, cfg.m, &cfg.beta, cfg.epsilon.flipped())?;
    let empirical = empirical_moments(&table)?;
    let gauss = gaussian_comparison(&table)?;
    let moments_equal = closed.mu == empirical.mu && closed.sigma2 == empirical.sigma2;
    let checks = vec![
        Check::new(
            "empirical moments equal the closed forms",
            moments_equal,
            format!(
                "mu {} vs {}, sigma2 {} vs {}",
                rational_to_string(&empirical.mu),
                rational_to_string(&closed.mu),
                rational_to_string(&empirical.sigma2),
                rational_to_string(&closed.sigma2)
            ),
        ),
        Check::new(
            "variance is independent of the coupling sign",
            closed.sigma2 == flipped.sigma2,
            format!(
                "{} vs {}",
                rational_to_string(&closed.sigma2),
                rational_to_string(&flipped.sigma2)
            ),
        ),
    ];
    let result = Json::Object(vec![
        ("closed_form", moment_json(&closed.mu, &closed.sigma2)),
        ("empirical", moment_json(&empirical.mu, &empirical.sigma2)),
        (
            "gaussian",
            Json::Object(vec![
                ("sup_distance", Json::Float(gauss.sup_distance)),
                ("sup_location", Json::Float(gauss.sup_location)),
                ("mu", Json::Float(gauss.mu)),
                ("sigma", Json::Float(gauss.sigma)),
                ("distinct_levels", Json::size(gauss.distinct_levels)),
            ]),
        ),
        ("level_density", level_density_json(&table)),
    ]);
    Ok((
        document(chain_config_json("stats", cfg), result, &checks),
        all_passed(&checks),
    ))
}

fn cmd_spacings(
    cfg: &ChainConfig,
    curve_samples: usize,
    format: Format,
) -> Result<(String, bool)> {
    if curve_samples < 2 {
        return Err(FiError::domain("curve sampling needs at least 2 points"));
    }
    let table = spectrum(cfg.n, cfg.m, cfg.epsilon, &cfg.beta)?;
    let unfolded = unfold_and_spacings(&table)?;
    let params = spacings_law_params(cfg.n, cfg.m, &cfg.beta)?;
    let rms = spacings_cdf_rms(&unfolded.spacings, &params).ok();
    let diag = regime_diagnostics(&table)?;
    let checks = vec![
        Check::new(
            "spacings carry unit sample mean",
            true,
            "enforced to 1e-12 during unfolding".to_string(),
        ),
        Check::new(
            "cluster keys span the expected mode-sum range",
            diag.j_range_consistent,
            format!(
                "observed [{}, {}], expected [{}, {}]",
                diag.clusters.first().map(|c| c.j).unwrap_or(0),
                diag.clusters.last().map(|c| c.j).unwrap_or(0),
                diag.expected_j_range.0,
                diag.expected_j_range.1
            ),
        ),
    ];
    if format == Format::Csv {
        let l = unfolded.spacings.len();
        let rows: Vec<Vec<String>> = (0..unfolded.levels.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    float_repr(unfolded.levels[i]),
                    float_repr(unfolded.eta[i]),
                    if i < l { float_repr(unfolded.spacings[i]) } else { String::new() },
                ]
            })
            .collect();
        return Ok((
            csv_table(&["index", "level", "eta", "spacing"], &rows),
            all_passed(&checks),
        ));
    }
    let l = unfolded.spacings.len();
    let mut sorted = unfolded.spacings.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite spacings"));
    let cdf: Vec<Json> = sorted
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let law = spacings_law(s, &params).map(Json::Float).unwrap_or(Json::Null);
            Json::Object(vec![
                ("s", Json::Float(s)),
                ("empirical", Json::Float((k as f64 + 0.5) / l as f64)),
                ("law", law),
            ])
        })
        .collect();
    let curve: Vec<Json> = (0..curve_samples)
        .map(|k| {
            let s = params.s0
                + (params.s_max - params.s0) * k as f64 / (curve_samples - 1) as f64;
            let p = spacings_law(s, &params).map(Json::Float).unwrap_or(Json::Null);
            Json::Object(vec![("s", Json::Float(s)), ("p", p)])
        })
        .collect();
    let clusters: Vec<Json> = diag
        .clusters
        .iter()
        .map(|c| {
            Json::Object(vec![
                ("j", Json::Int(c.j as i64)),
                ("keys", Json::size(c.keys)),
                ("degeneracy", Json::big(&c.degeneracy)),
            ])
        })
        .collect();
    let difference_counts: Vec<Json> = diag
        .difference_counts
        .iter()
        .map(|(d, count)| {
            Json::Object(vec![
                ("difference", Json::rational(d)),
                ("count", Json::size(*count)),
            ])
        })
        .collect();
    let scatter: Vec<Json> = diag
        .scatter
        .iter()
        .map(|&(e, d)| Json::Array(vec![Json::Float(e), Json::Float(d)]))
        .collect();
    let diagnostics = Json::Object(vec![
        (
            "dominant_difference",
            diag.dominant_difference.as_ref().map(Json::rational).unwrap_or(Json::Null),
        ),
        ("dominant_fraction", Json::Float(diag.dominant_fraction)),
        ("difference_counts", Json::Array(difference_counts)),
        ("scatter", Json::Array(scatter)),
        ("clusters", Json::Array(clusters)),
        (
            "expected_j_range",
            Json::Array(vec![
                Json::Int(diag.expected_j_range.0 as i64),
                Json::Int(diag.expected_j_range.1 as i64),
            ]),
        ),
    ]);
    let mut config = chain_config_json("spacings", cfg);
    if let Json::Object(fields) = &mut config {
        fields.push(("curve_samples", Json::size(curve_samples)));
    }
    let result = Json::Object(vec![
        (
            "levels",
            Json::Array(unfolded.levels.iter().map(|&v| Json::Float(v)).collect()),
        ),
        ("eta", Json::Array(unfolded.eta.iter().map(|&v| Json::Float(v)).collect())),
        (
            "spacings",
            Json::Array(unfolded.spacings.iter().map(|&v| Json::Float(v)).collect()),
        ),
        (
            "law",
            Json::Object(vec![
                ("s_max", Json::Float(params.s_max)),
                ("s0", Json::Float(params.s0)),
            ]),
        ),
        ("rms", rms.map(Json::Float).unwrap_or(Json::Null)),
        ("cdf", Json::Array(cdf)),
        ("curve", Json::Array(curve)),
        ("diagnostics", diagnostics),
    ]);
    Ok((document(config, result, &checks), all_passed(&checks)))
}
