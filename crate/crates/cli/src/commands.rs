//! One function per subcommand. Each reads its inputs, writes tables under
//! `--out` and finishes with the run manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use iotn::analysis::{self, OrganizationProfile};
use iotn::attack::{self, AttackConfig, AttackMode, Strategy};
use iotn::centrality::{self, Indicator, IndicatorScores, ScoreConfig};
use iotn::community;
use iotn::graph::{Connectivity, TradeNetwork};
use iotn::ingest::{self, EdgeSet, IngestConfig};

use crate::manifest::{digest_file, RunManifest};
use crate::table::{write_json, Cell, Table};
use crate::{
    AttackArgs, BuildArgs, CliError, Common, CommunitiesArgs, CorrelateArgs, OrgsArgs, RankArgs,
};

pub const EDGES_DIR: &str = "edges";

/// Inclusive year ranges from `1988-2017,2020`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearSelection(Vec<(i32, i32)>);

impl YearSelection {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("invalid --years `{text}`"));
        let mut ranges = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = match part.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (part, part),
            };
            let (a, b): (i32, i32) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            ranges.push((a, b));
        }
        if ranges.is_empty() {
            return Err(bad());
        }
        Ok(YearSelection(ranges))
    }

    pub fn contains(&self, year: i32) -> bool {
        self.0.iter().any(|&(a, b)| (a..=b).contains(&year))
    }
}

fn year_selection(common: &Common) -> Result<Option<YearSelection>, CliError> {
    common
        .years
        .as_deref()
        .map(YearSelection::parse)
        .transpose()
}

fn selected(sel: &Option<YearSelection>, year: i32) -> bool {
    sel.as_ref().is_none_or(|s| s.contains(year))
}

fn read_config(common: &Common) -> Result<Option<String>, CliError> {
    common
        .config
        .as_ref()
        .map(|p| {
            fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))
        })
        .transpose()
}

fn score_config(common: &Common, seed: Option<u64>) -> Result<ScoreConfig, CliError> {
    let mut cfg: ScoreConfig = match read_config(common)? {
        Some(text) => {
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config: {e}")))?
        }
        None => ScoreConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.community.seed = seed;
    }
    Ok(cfg)
}

fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("config types serialize")
}

/// Expands `all` and removes duplicates, keeping first occurrences.
pub fn parse_indicators(names: &[String]) -> Result<Vec<Indicator>, CliError> {
    let mut out = Vec::new();
    for name in names.iter().map(|n| n.trim()).filter(|n| !n.is_empty()) {
        let batch = if name.eq_ignore_ascii_case("all") {
            Indicator::ALL.to_vec()
        } else {
            vec![name.parse::<Indicator>()?]
        };
        for ind in batch {
            if !out.contains(&ind) {
                out.push(ind);
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no indicators given".into()));
    }
    Ok(out)
}

pub fn parse_strategies(names: &[String]) -> Result<Vec<Strategy>, CliError> {
    let mut out = Vec::new();
    for name in names.iter().map(|n| n.trim()).filter(|n| !n.is_empty()) {
        let batch = if name.eq_ignore_ascii_case("all") {
            Strategy::all()
        } else {
            vec![name.parse::<Strategy>()?]
        };
        for s in batch {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no strategies given".into()));
    }
    Ok(out)
}

fn edge_file_year(path: &Path) -> Option<i32> {
    let name = path.file_name()?.to_str()?;
    name.strip_prefix("edges_")?
        .strip_suffix(".csv")?
        .parse()
        .ok()
}

/// Yearly networks from `dir/edges/edges_<year>.csv`, or from
/// `dir/edges_<year>.csv` when there is no `edges` subdirectory. Sorted by
/// year.
pub fn load_networks(
    dir: &Path,
    years: &Option<YearSelection>,
) -> Result<Vec<(TradeNetwork, PathBuf)>, CliError> {
    let edges_dir = if dir.join(EDGES_DIR).is_dir() {
        dir.join(EDGES_DIR)
    } else {
        dir.to_path_buf()
    };
    let entries = fs::read_dir(&edges_dir)
        .map_err(|e| CliError::Data(format!("{}: {e}", edges_dir.display())))?;
    let mut files = BTreeMap::new();
    for entry in entries {
        let path = entry?.path();
        if let Some(year) = edge_file_year(&path).filter(|&y| selected(years, y)) {
            files.insert(year, path);
        }
    }
    if files.is_empty() {
        return Err(CliError::Data(format!(
            "no edge lists found in {}",
            edges_dir.display()
        )));
    }
    files
        .into_iter()
        .map(|(year, path)| {
            let set = ingest::read_edge_list(year, BufReader::new(File::open(&path)?))
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            Ok((TradeNetwork::from_edge_set(&set)?, path))
        })
        .collect()
}

fn network_manifest(
    command: &str,
    argv: Vec<String>,
    config: serde_json::Value,
    nets: &[(TradeNetwork, PathBuf)],
) -> Result<RunManifest, CliError> {
    let mut m = RunManifest::new(command, argv, config);
    for (_, path) in nets {
        m.inputs.push(digest_file(path)?);
    }
    Ok(m)
}

fn warn(msg: impl AsRef<str>) {
    eprintln!("warning: {}", msg.as_ref());
}

pub fn cmd_build(args: &BuildArgs, argv: Vec<String>) -> Result<(), CliError> {
    let common = &args.common;
    let config = match read_config(common)? {
        Some(text) => IngestConfig::from_json(&text)?,
        None => IngestConfig::default(),
    };
    let years = year_selection(common)?;
    let filter = config.record_filter()?;
    let mut manifest = RunManifest::new("build", argv, to_json(&config));
    manifest.inputs.push(digest_file(&args.input)?);

    let file = File::open(&args.input)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let parsed = ingest::parse_records(BufReader::new(file), &config)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let records: Vec<_> = parsed
        .records
        .into_iter()
        .filter(|r| selected(&years, r.year))
        .collect();
    let seen: BTreeSet<i32> = records.iter().map(|r| r.year).collect();
    let mut sets = ingest::build_edge_sets(&ingest::filter_records(&records, &filter));
    for &year in &seen {
        sets.entry(year).or_insert_with(|| EdgeSet::new(year));
    }

    let edges_dir = common.out.join(EDGES_DIR);
    fs::create_dir_all(&edges_dir)?;
    let mut summary = Table::new(&["year", "N", "edge_count"]);
    for (year, set) in &sets {
        let mut buf = Vec::new();
        ingest::write_edge_list(set, &mut buf)?;
        fs::write(edges_dir.join(format!("edges_{year}.csv")), buf)?;
        let g = TradeNetwork::from_edge_set(set)?;
        if g.is_empty() {
            warn(format!("{year}: no edges left after filtering"));
        }
        summary.push(vec![
            (*year).into(),
            g.node_count().into(),
            g.edge_count().into(),
        ]);
    }
    if sets.is_empty() {
        warn("no records in the selected years");
    }
    summary.write(&common.out, "network_summary", common.format)?;

    let mut rejections = Table::new(&["line", "reason"]);
    for r in &parsed.rejected {
        rejections.push(vec![r.line.into(), r.reason.as_str().into()]);
    }
    if !rejections.is_empty() {
        warn(format!(
            "{} rows rejected, see rejections.csv",
            rejections.len()
        ));
    }
    rejections.write(&common.out, "rejections", common.format)?;
    manifest.finish(&common.out)
}

fn scores_for(
    g: &TradeNetwork,
    indicators: &[Indicator],
    cfg: &ScoreConfig,
) -> Result<Vec<IndicatorScores>, CliError> {
    if g.is_empty() {
        warn(format!("{}: empty network", g.year()));
        return Ok(Vec::new());
    }
    Ok(centrality::compute_many(g, indicators, cfg)?)
}

pub fn cmd_rank(args: &RankArgs, argv: Vec<String>) -> Result<(), CliError> {
    let common = &args.common;
    let indicators = parse_indicators(&args.indicators)?;
    let cfg = score_config(common, args.seed)?;
    let nets = load_networks(&args.input, &year_selection(common)?)?;
    let mut manifest = network_manifest("rank", argv, to_json(&cfg), &nets)?;
    manifest
        .seeds
        .insert("community".into(), cfg.community.seed);

    let header = ["year", "indicator", "economy", "score", "rank"];
    let mut tables: Vec<Table> = indicators.iter().map(|_| Table::new(&header)).collect();
    let mut top = Table::new(&["year", "indicator", "rank", "economy", "score"]);
    for (g, _) in &nets {
        for (k, scores) in scores_for(g, &indicators, &cfg)?.iter().enumerate() {
            let ranking = centrality::rank(scores);
            for (r, id, s) in ranking.entries() {
                let name = scores.indicator.name();
                tables[k].push(vec![
                    g.year().into(),
                    name.into(),
                    id.into(),
                    s.into(),
                    r.into(),
                ]);
                if r <= args.top_k {
                    top.push(vec![
                        g.year().into(),
                        name.into(),
                        r.into(),
                        id.into(),
                        s.into(),
                    ]);
                }
            }
        }
    }
    let dir = common.out.join("scores");
    for (ind, table) in indicators.iter().zip(&tables) {
        table.write(&dir, ind.name(), common.format)?;
    }
    top.write(&common.out, "top_k", common.format)?;
    manifest.finish(&common.out)
}

pub fn cmd_attack(args: &AttackArgs, argv: Vec<String>) -> Result<(), CliError> {
    let common = &args.common;
    let strategies = parse_strategies(&args.strategies)?;
    let names: Vec<&str> = strategies.iter().map(|s| s.name()).collect();
    let mode: AttackMode = args.mode.parse()?;
    let connectivity: Connectivity = args.connectivity.parse()?;
    let scores = score_config(common, args.seed)?;
    let seed = args.seed.unwrap_or(attack::DEFAULT_RANDOM_SEED);
    let config = AttackConfig {
        mode,
        connectivity,
        scores,
    };
    let nets = load_networks(&args.input, &year_selection(common)?)?;
    let recorded = serde_json::json!({
        "scores": to_json(&scores),
        "mode": mode.to_string(),
        "connectivity": connectivity,
        "trials": args.trials,
        "strategies": names,
    });
    let mut manifest = network_manifest("attack", argv, recorded, &nets)?;
    manifest.seeds.insert("random_trials".into(), seed);
    manifest
        .seeds
        .insert("community".into(), scores.community.seed);

    let curves_dir = common.out.join("curves");
    let mut robustness = Table::new(&["year", "strategy", "R", "trials", "seed"]);
    let mut matrix_header = vec!["year"];
    matrix_header.extend(&names);
    let mut matrix = Table::new(&matrix_header);
    let mut by_strategy: Vec<Vec<f64>> = vec![Vec::new(); strategies.len()];
    for (g, _) in &nets {
        if g.is_empty() {
            warn(format!("{}: empty network, nothing to attack", g.year()));
            continue;
        }
        let year = g.year();
        let mut matrix_row = vec![Cell::from(year)];
        for (k, (curve, r)) in attack::attack_suite(g, &names, args.trials, seed, &config)?
            .into_iter()
            .enumerate()
        {
            let mut table = Table::new(&["year", "strategy", "n", "q", "S"]);
            for (n, q, s) in curve.points() {
                table.push(vec![
                    year.into(),
                    r.strategy.as_str().into(),
                    n.into(),
                    q.into(),
                    s.into(),
                ]);
            }
            table.write(
                &curves_dir,
                &format!("{year}_{}", r.strategy),
                common.format,
            )?;
            robustness.push(vec![
                year.into(),
                r.strategy.as_str().into(),
                r.r.into(),
                r.trials.into(),
                r.seed.into(),
            ]);
            matrix_row.push(r.r.into());
            by_strategy[k].push(r.r);
        }
        matrix.push(matrix_row);
    }
    robustness.write(&common.out, "robustness", common.format)?;
    matrix.write(&common.out, "robustness_matrix", common.format)?;

    let mut boxes = Table::new(&[
        "strategy",
        "count",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "lower_whisker",
        "upper_whisker",
    ]);
    for (name, values) in names.iter().zip(&by_strategy) {
        if let Some(b) = analysis::box_stats(values) {
            boxes.push(vec![
                (*name).into(),
                b.count.into(),
                b.min.into(),
                b.q1.into(),
                b.median.into(),
                b.q3.into(),
                b.max.into(),
                b.lower_whisker.into(),
                b.upper_whisker.into(),
            ]);
        }
    }
    boxes.write(&common.out, "box_stats", common.format)?;
    manifest.finish(&common.out)
}

pub fn cmd_correlate(args: &CorrelateArgs, argv: Vec<String>) -> Result<(), CliError> {
    let common = &args.common;
    let indicators = parse_indicators(&args.indicators)?;
    if indicators.len() < 2 {
        return Err(CliError::Usage(
            "correlate needs at least two indicators".into(),
        ));
    }
    let cfg = score_config(common, args.seed)?;
    let nets = load_networks(&args.input, &year_selection(common)?)?;
    let mut manifest = network_manifest("correlate", argv, to_json(&cfg), &nets)?;
    manifest
        .seeds
        .insert("community".into(), cfg.community.seed);

    let mut table = Table::new(&[
        "year",
        "indicator_a",
        "indicator_b",
        "n",
        "rho",
        "p",
        "stars",
    ]);
    for (g, _) in &nets {
        let scores = scores_for(g, &indicators, &cfg)?;
        if scores.is_empty() {
            continue;
        }
        let matrix = analysis::correlation_matrix(&scores)?;
        for e in &matrix.entries {
            let (a, b) = (e.a.name(), e.b.name());
            let row = match &e.result {
                Ok(c) => vec![
                    g.year().into(),
                    a.into(),
                    b.into(),
                    c.n.into(),
                    c.rho.into(),
                    c.p.into(),
                    analysis::significance_stars(c.p).into(),
                ],
                Err(why) => {
                    warn(format!("{}: {a} vs {b}: {why}", g.year()));
                    vec![
                        g.year().into(),
                        a.into(),
                        b.into(),
                        g.node_count().into(),
                        Cell::Missing,
                        Cell::Missing,
                        "".into(),
                    ]
                }
            };
            table.push(row);
        }
    }
    table.write(&common.out, "correlations", common.format)?;
    manifest.finish(&common.out)
}

pub fn cmd_orgs(args: &OrgsArgs, argv: Vec<String>) -> Result<(), CliError> {
    let common = &args.common;
    let indicators = parse_indicators(&args.indicators)?;
    let text = read_config(common)?.ok_or_else(|| {
        CliError::Usage(format!(
            "orgs needs an organisation list via --config or {}",
            crate::CONFIG_ENV
        ))
    })?;
    let orgs: Vec<OrganizationProfile> = analysis::load_organizations(&text)?;
    let mut cfg = ScoreConfig::default();
    if let Some(seed) = args.seed {
        cfg.community.seed = seed;
    }
    let nets = load_networks(&args.input, &year_selection(common)?)?;
    let recorded = serde_json::json!({ "scores": to_json(&cfg), "organizations": to_json(&orgs) });
    let mut manifest = network_manifest("orgs", argv, recorded, &nets)?;
    manifest
        .seeds
        .insert("community".into(), cfg.community.seed);

    let mut table = Table::new(&[
        "organization",
        "indicator",
        "year",
        "mean_score",
        "members_present",
    ]);
    let mut series: BTreeMap<(usize, usize), BTreeMap<i32, Option<f64>>> = BTreeMap::new();
    for (g, _) in &nets {
        let scores = scores_for(g, &indicators, &cfg)?;
        for (o, org) in orgs.iter().enumerate() {
            for (k, s) in scores.iter().enumerate() {
                let got = analysis::org_influence(org, s, g.year());
                if let Some(inf) = got {
                    table.push(vec![
                        org.name.as_str().into(),
                        s.indicator.name().into(),
                        g.year().into(),
                        inf.mean.into(),
                        inf.members_present.into(),
                    ]);
                }
                series
                    .entry((o, k))
                    .or_default()
                    .insert(g.year(), got.map(|i| i.mean));
            }
        }
    }
    table.write(&common.out, "organizations", common.format)?;

    let span = nets
        .first()
        .map(|n| n.0.year())
        .zip(nets.last().map(|n| n.0.year()));
    let mut evolution = Table::new(&["organization", "indicator", "year", "mean_score"]);
    for ((o, k), values) in &series {
        for row in analysis::evolution_table(values, &orgs[*o].name, span.map(|(a, b)| a..=b)) {
            evolution.push(vec![
                row.entity.into(),
                indicators[*k].name().into(),
                row.year.into(),
                row.value.into(),
            ]);
        }
    }
    evolution.write(&common.out, "evolution", common.format)?;
    manifest.finish(&common.out)
}

pub fn cmd_communities(args: &CommunitiesArgs, argv: Vec<String>) -> Result<(), CliError> {
    let common = &args.common;
    let cfg = score_config(common, args.seed)?;
    let seed = cfg.community.seed;
    let nets = load_networks(&args.input, &year_selection(common)?)?;
    let mut manifest = network_manifest("communities", argv, to_json(&cfg.community), &nets)?;
    manifest.seeds.insert("community".into(), seed);

    let mut partitions = Table::new(&["year", "economy", "module_id"]);
    let mut modules = Table::new(&["year", "N", "module_count", "modularity", "seed"]);
    for (g, _) in &nets {
        if g.is_empty() {
            warn(format!("{}: empty network", g.year()));
            continue;
        }
        let p = community::detect_modules(g, seed);
        for (v, &m) in p.assignment.iter().enumerate() {
            partitions.push(vec![g.year().into(), g.id(v).into(), m.into()]);
        }
        modules.push(vec![
            g.year().into(),
            g.node_count().into(),
            p.module_count.into(),
            p.modularity.into(),
            seed.into(),
        ]);
    }
    partitions.write(&common.out, "partitions", common.format)?;
    modules.write(&common.out, "modules", common.format)?;
    write_json(&common.out.join("modules.json"), &modules.to_json())?;
    manifest.finish(&common.out)
}
