use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use loopgr_core::fgl::{FormalGroupLaw, SeriesLaw};
use loopgr_core::fixedpoints::{carell_dim, quiver_grass_poincare, sl2_enumerate};
use loopgr_core::locality::{verify_m_locality, verify_trivialization, PointConfig};
use loopgr_core::quiver::{catalog, ColorWord, DilationTorus, DimVector, Quiver};
use loopgr_core::shuffle::{associativity_trials, MAX_TRIPLE_WEIGHT, specialize, verify_ideal, weight_space, word_product};
use loopgr_core::symalg::{RationalFunction, Scalar};
use loopgr_core::thom::{check_bilinearity, classical_limit, cross_check, divisor_of, flag_kernel, flag_types};
use loopgr_core::zastava::{ind_fiber, ind_rank, ColoredDivisor, FiberContext, FiberFile, Poset};

use crate::report::Row;
use crate::{Cli, Command, Suite};

type Output = (Vec<Row>, Option<String>);

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_quiver(cli: &Cli) -> Result<Quiver> {
    let q = match &cli.quiver {
        Some(p) => Quiver::from_json(&read(p)?).with_context(|| format!("in quiver file {}", p.display()))?,
        None => Quiver::with_defaults(catalog::a1()),
    };
    match &cli.dilation {
        Some(text) => {
            let rows = text
                .split('|')
                .map(|r| r.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| anyhow!("dilation basis must be integer rows separated by `|`"))?;
            Ok(q.with_dilation(DilationTorus::new(rows)?))
        }
        None => Ok(q),
    }
}

fn load_fgl(cli: &Cli) -> Result<FormalGroupLaw> {
    match cli.fgl.as_str() {
        "additive" => Ok(FormalGroupLaw::Additive),
        "multiplicative" => Ok(FormalGroupLaw::Multiplicative),
        s => match s.strip_prefix("series:") {
            Some(path) => Ok(FormalGroupLaw::Series(SeriesLaw::from_json(&read(Path::new(path))?)?)),
            None => bail!("unknown formal group law `{}`", s),
        },
    }
}

fn parse_tau(text: &str) -> Result<Vec<Scalar>> {
    text.split(',').map(|s| s.trim().parse::<Scalar>().map_err(|_| anyhow!("bad τ value `{}`", s.trim()))).collect()
}

fn tau(cli: &Cli) -> Result<Option<Vec<Scalar>>> {
    cli.tau.as_deref().map(parse_tau).transpose()
}

fn function_value(f: &RationalFunction) -> Value {
    json!({ "text": f.to_string(), "factored": f.to_json() })
}

fn flag_text(flag: &[DimVector]) -> String {
    flag.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("|")
}

fn dilation_rows(q: &Quiver) -> Vec<Row> {
    let mut rows = Vec::new();
    for c in q.validate_dilation() {
        rows.push(Row::check(format!("dilation {}", c.arrow), c.pass, if c.pass { "ok" } else { "m(h) + m(h*) ≠ ω" }, Value::Null, "quiver"));
        if c.is_loop {
            rows.push(Row::info(format!("loop {}", c.arrow), "loop"));
        }
    }
    rows
}

pub fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Kernel { flag, classical } => kernel(cli, flag, *classical),
        Command::Shuffle { word, dim, degree } => shuffle(cli, word.as_deref(), dim.as_deref(), *degree),
        Command::Verify { which, suite, config } => {
            let s = match (which, suite) {
                (Some(a), Some(b)) if a != b => bail!("conflicting suites `{:?}` and `{:?}`", a, b),
                (Some(a), _) | (None, Some(a)) => *a,
                (None, None) => Suite::All,
            };
            verify(cli, s, config.as_deref())
        }
        Command::Sl2Lattice { p, e, n, window } => sl2(*p, *e, *n, window.unwrap_or(*n + *e as u32)),
        Command::Poincare { alpha } => poincare(alpha),
        Command::Carell { n, k } => carell(*n, *k),
        Command::IndRank { poset, divisor } => {
            let rank = ind_rank(&Poset::parse(poset)?, &ColoredDivisor::parse(divisor)?);
            Ok((vec![Row::info("rank", rank)], Some(rank.to_string())))
        }
        Command::ZastavaFiber { config, classical } => zastava(cli, config, *classical),
    }
}

fn kernel(cli: &Cli, flag: &str, classical: bool) -> Result<Output> {
    let q = load_quiver(cli)?;
    let fgl = load_fgl(cli)?;
    let flag = q.parse_flag(flag)?;
    let k = flag_kernel(&q, &fgl, &flag)?;
    let mut rows = dilation_rows(&q);
    rows.push(Row::info("kernel", function_value(&k.function)));
    if k.is_degenerate() {
        let chars: Vec<String> = k.degenerate.iter().map(|c| c.to_string()).collect();
        rows.push(Row::info("degenerate_characters", chars));
    }
    let mut primary = k.function.to_string();
    if classical {
        let f = classical_limit(&fgl, &k.function)?;
        let div = divisor_of(&f, k.degenerate.len());
        let pairs: Vec<Value> =
            div.multiplicities.iter().map(|((a, b), m)| json!({ "pair": [a.to_string(), b.to_string()], "multiplicity": m })).collect();
        rows.push(Row::info("classical_limit", function_value(&f)));
        rows.push(Row::info("classical_divisor", pairs));
        primary = f.to_string();
    }
    Ok((rows, Some(primary)))
}

fn shuffle(cli: &Cli, word: Option<&str>, dim: Option<&str>, degree: u32) -> Result<Output> {
    let q = load_quiver(cli)?;
    let fgl = load_fgl(cli)?;
    match (word, dim) {
        (Some(w), _) => {
            let word = q.parse_word(w)?;
            let e = word_product(&q, &fgl, &word)?;
            let f = match tau(cli)? {
                Some(t) => specialize(&e.representative, &t)?,
                None => e.representative.clone(),
            };
            let rows = vec![
                Row::info("product", function_value(&f)),
                Row::check("polynomial", e.is_polynomial(&fgl), e.is_polynomial(&fgl), true, "ideal property"),
            ];
            Ok((rows, Some(f.to_string())))
        }
        (None, Some(d)) => {
            let alpha = q.parse_dim(d)?;
            let t = tau(cli)?.unwrap_or_else(|| vec![Scalar::from_integer(1.into()); q.dilation.rank]);
            let ws = weight_space(&q, &fgl, &alpha, degree, &t, cli.seed)?;
            let rows = vec![
                Row::info("dimension", ws.dimension),
                Row::info("confirmation", ws.confirmation),
                Row::info("spanning_elements", ws.basis.len()),
            ];
            Ok((rows, Some(ws.dimension.to_string())))
        }
        (None, None) => bail!("shuffle needs --word or --dim"),
    }
}

fn nonzero_below(n: usize, max: u32) -> Vec<DimVector> {
    DimVector(vec![max; n]).below().into_iter().filter(|v| !v.is_zero() && v.total() <= max).collect()
}

fn word_pairs(n: usize, max: usize) -> Vec<(ColorWord, ColorWord)> {
    let mut out = Vec::new();
    for a in 1..max {
        for b in 1..=max - a {
            for g1 in ColorWord::all(n, a) {
                for g2 in ColorWord::all(n, b) {
                    out.push((g1.clone(), g2));
                }
            }
        }
    }
    out
}

fn tally(name: &str, passed: usize, total: usize, failures: Vec<String>, provenance: &str) -> Row {
    Row::check(
        name,
        passed == total,
        json!({ "passed": passed, "total": total, "failures": failures }),
        json!({ "passed": total }),
        provenance,
    )
}

fn word_text(q: &Quiver, w: &ColorWord) -> String {
    w.0.iter().map(|&i| q.spec.vertex_name(i).to_string()).collect::<Vec<_>>().join(",")
}

fn verify(cli: &Cli, suite: Suite, config: Option<&Path>) -> Result<Output> {
    let q = load_quiver(cli)?;
    let fgl = load_fgl(cli)?;
    let n = q.num_vertices();
    let mut rows = dilation_rows(&q);
    let all = suite == Suite::All;
    if all || suite == Suite::Fgl {
        let r = fgl.verify();
        for (name, ok) in [("unit", r.unit), ("commutativity", r.commutativity), ("associativity", r.associativity)] {
            rows.push(Row::check(format!("fgl {} {}", fgl.name(), name), ok, ok, true, "formal group axioms"));
        }
    }
    if all || suite == Suite::Biextension {
        let (mut passed, mut total, mut failures) = (0, 0, Vec::new());
        let vs = nonzero_below(n, 3);
        for v1 in &vs {
            for v2 in &vs {
                if v1.total() + v2.total() > 3 {
                    continue;
                }
                for w in &vs {
                    total += 1;
                    if check_bilinearity(&q, &fgl, v1, v2, w)? {
                        passed += 1;
                    } else {
                        failures.push(format!("{} + {} , {}", v1, v2, w));
                    }
                }
            }
        }
        rows.push(tally("biextension bilinearity", passed, total, failures, "kernel additivity in each slot"));
    }
    if all || suite == Suite::Crosscheck {
        for flag in flag_types(n, 4) {
            let c = cross_check(&q, &fgl, &flag)?;
            let ratio = c.ratio.cancel();
            let value = json!({
                "unit": ratio.to_string(),
                "duality_unit": c.duality_unit.to_string(),
                "degenerate": c.degenerate,
            });
            rows.push(Row::check(format!("crosscheck {}", flag_text(&flag)), c.is_unit(), value, "invertible constant", "two assemblies"));
        }
    }
    if all || suite == Suite::Locality {
        match config {
            Some(path) => {
                let mut cfg = PointConfig::from_json(&q, &read(path)?)?;
                if let Some(t) = tau(cli)? {
                    cfg.tau = t;
                }
                let r = verify_trivialization(&q, &fgl, &cfg)?;
                rows.push(Row::check("locality trivialization", r.pass, serde_json::to_value(&r)?, Value::Null, "shifted diagonals"));
            }
            None => {
                let (mut passed, mut failures) = (0, Vec::new());
                let pairs = word_pairs(n, 4);
                for (g1, g2) in &pairs {
                    if verify_m_locality(&q, &fgl, g1, g2, None)?.identity_holds {
                        passed += 1;
                    } else {
                        failures.push(format!("{} | {}", word_text(&q, g1), word_text(&q, g2)));
                    }
                }
                rows.push(tally("m-locality factorization", passed, pairs.len(), failures, "word kernels"));
            }
        }
    }
    if all || suite == Suite::Ideal {
        let (mut passed, mut failures) = (0, Vec::new());
        // Truncated series factors make weight-4 products expensive.
        let max = if matches!(fgl, FormalGroupLaw::Series(_)) { 3 } else { 4 };
        let pairs = word_pairs(n, max);
        for (g1, g2) in &pairs {
            let a = word_product(&q, &fgl, g1)?;
            let b = word_product(&q, &fgl, g2)?;
            if verify_ideal(&q, &fgl, &a, &b)? {
                passed += 1;
            } else {
                failures.push(format!("{} | {}", word_text(&q, g1), word_text(&q, g2)));
            }
        }
        rows.push(tally("ideal property", passed, pairs.len(), failures, "polynomial closure"));
    }
    if all || suite == Suite::Assoc {
        let count = 20;
        let max_weight = if matches!(fgl, FormalGroupLaw::Series(_)) { 3 } else { MAX_TRIPLE_WEIGHT };
        let passed = associativity_trials(&q, &fgl, count, cli.seed, max_weight)?;
        rows.push(tally("shuffle associativity", passed, count, Vec::new(), "random triples"));
    }
    Ok((rows, None))
}

fn sl2(p: u64, e: usize, n: u32, window: u32) -> Result<Output> {
    let r = sl2_enumerate(p, e, n, window)?;
    let agree = r.membership.iter().all(|m| m.agree);
    let rows = vec![
        Row::info("candidates", r.candidates),
        Row::check("s0_count", r.s0_count as u64 == r.expected_count, r.s0_count, r.expected_count, "monic nilpotent-coefficient count"),
        Row::check("bijection", r.bijection, serde_json::to_value(&r.table)?, Value::Null, "Q ↦ zⁿQ"),
        Row::check("membership", agree, serde_json::to_value(&r.membership)?, Value::Null, "divisibility of z^m"),
    ];
    Ok((rows, Some(r.s0_count.to_string())))
}

fn poincare(alpha: &str) -> Result<Output> {
    let parts: Vec<u32> = alpha
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| anyhow!("bad dimension vector `{}`", alpha)))
        .collect::<Result<_>>()?;
    let alpha = DimVector(parts);
    let p = quiver_grass_poincare(&alpha);
    let expected: i64 = alpha.0.iter().map(|a| 1i64 << a).product();
    let rows = vec![
        Row::info("poincare", p.to_string()),
        Row::check("value at q = 1", p.at_one() == expected, p.at_one(), expected, "∏ 2^α_i"),
    ];
    Ok((rows, Some(p.to_string())))
}

fn carell(n: u32, k: u32) -> Result<Output> {
    let r = carell_dim(n, k)?;
    let rows = vec![
        Row::check("dimension", r.dimension as u64 == r.binomial, r.dimension, r.binomial, "binomial coefficient"),
        Row::check("hilbert", r.hilbert == r.gaussian, r.hilbert.to_string(), r.gaussian.to_string(), "Gaussian binomial"),
    ];
    Ok((rows, Some(r.dimension.to_string())))
}

fn zastava(cli: &Cli, config: &Path, classical: bool) -> Result<Output> {
    let q = load_quiver(cli)?;
    let fgl = load_fgl(cli)?;
    let file = FiberFile::parse(&read(config)?)?;
    let t = match tau(cli)? {
        Some(t) => t,
        None => file.tau.clone(),
    };
    if t.len() != q.dilation.rank {
        bail!("τ has {} entries, dilation torus has rank {}", t.len(), q.dilation.rank);
    }
    let ctx = FiberContext::new(&q, &fgl, t);
    let data = ind_fiber(&ctx, &file.poset, &file.divisor, classical)?;
    let rank = ind_rank(&file.poset, &file.divisor);
    let rows = vec![
        Row::check("rank", data.maps.len() == rank, data.maps.len(), rank, "monotone map count"),
        Row::info("fiber", serde_json::to_value(&data)?),
    ];
    Ok((rows, Some(format!("[{}]", data.values.join(" : ")))))
}
