use charsum_cli::campaign::{run_campaign, run_to_output};
use charsum_cli::engine::Checks;
use charsum_cli::row::TIMING_COLUMNS;
use charsum_cli::{run_case, CampaignConfig, CaseRow, CaseSpec, CliError, Family};

fn small(jobs: usize) -> CampaignConfig {
    CampaignConfig {
        primes: vec![2, 3, 5],
        m_min: 1,
        m_max: 3,
        families: vec![Family::Monomial, Family::Scaled],
        jobs,
        ..CampaignConfig::default()
    }
}

fn collect(cfg: &CampaignConfig) -> (Vec<CaseRow>, charsum_cli::Summary) {
    let mut rows = Vec::new();
    let summary = run_campaign(cfg, |r| {
        rows.push(r.clone());
        Ok(())
    })
    .unwrap();
    (rows, summary)
}

/// CSV bytes with the timing column blanked.
fn csv_without_timing(path: &std::path::Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    let body = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let skip: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| TIMING_COLUMNS.contains(h))
        .map(|(i, _)| i)
        .collect();
    let mut out = format!(
        "{comment}\n{}\n",
        headers.iter().collect::<Vec<_>>().join(",")
    );
    for rec in reader.records() {
        let rec = rec.unwrap();
        let cells: Vec<&str> = rec
            .iter()
            .enumerate()
            .map(|(i, c)| if skip.contains(&i) { "" } else { c })
            .collect();
        out += &cells.join(",");
        out.push('\n');
    }
    out
}

#[test]
fn monomial_campaign_has_no_violations() {
    let cfg = CampaignConfig {
        primes: vec![3, 5],
        m_min: 1,
        m_max: 3,
        families: vec![Family::Monomial],
        ..CampaignConfig::default()
    };
    let (rows, summary) = collect(&cfg);
    assert!(summary.cases > 10_000);
    assert_eq!(summary.violations, 0, "{}", summary.render());
    assert_eq!(
        rows.iter().filter(|r| !r.passed()).count() as u64,
        summary.violations
    );
    assert!(rows.windows(2).all(|w| w[0].id + 1 == w[1].id));
}

#[test]
fn rows_are_deterministic_across_parallelism() {
    let dir = std::env::temp_dir().join(format!("charsum-det-{}", std::process::id()));
    let (a, b) = (dir.join("a"), dir.join("b"));
    let s1 = run_to_output(&CampaignConfig {
        out: Some(a.clone()),
        ..small(1)
    })
    .unwrap();
    let s2 = run_to_output(&CampaignConfig {
        out: Some(b.clone()),
        ..small(3)
    })
    .unwrap();
    assert_eq!(s1.cases, s2.cases);
    assert_eq!(s1.violations, 0, "{}", s1.render());
    assert_eq!(
        csv_without_timing(&a.join("cases.csv")),
        csv_without_timing(&b.join("cases.csv"))
    );
    let jsonl = std::fs::read_to_string(a.join("cases.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count() as u64, s1.cases);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["cases"], s1.cases);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn empty_grid_yields_empty_summary() {
    let cfg = CampaignConfig {
        primes: vec![7],
        m_min: 5,
        m_max: 6,
        max_q: 1000,
        ..CampaignConfig::default()
    };
    let (rows, summary) = collect(&cfg);
    assert!(rows.is_empty());
    assert_eq!((summary.cases, summary.violations), (0, 0));
}

#[test]
fn single_case_grid_matches_run_case() {
    let cfg = CampaignConfig {
        primes: vec![5],
        m_min: 3,
        m_max: 3,
        families: vec![Family::Monomial],
        ..CampaignConfig::default()
    };
    let (rows, _) = collect(&cfg);
    let target = rows
        .iter()
        .find(|r| r.f == "(0,0,0,1)/(1)" && r.g == "(1,1)/(1)" && r.c == 15)
        .expect("x^3 with g = x + 1, c = 15");
    let spec = CaseSpec {
        p: 5,
        m: 3,
        f: "x^3".into(),
        g: "x + 1".into(),
        chi: Some(15),
        kappa: None,
    };
    let mut single = run_case(&spec, &Checks::default()).unwrap().row;
    single.id = target.id;
    single.family = target.family.clone();
    single.time_us = target.time_us;
    assert_eq!(&single, target);
}

#[test]
fn unwritable_output_exits_with_three() {
    let file = std::env::temp_dir().join(format!("charsum-file-{}", std::process::id()));
    std::fs::write(&file, "not a directory").unwrap();
    let cfg = CampaignConfig {
        out: Some(file.join("sub")),
        ..small(1)
    };
    let err = run_to_output(&cfg).unwrap_err();
    assert!(matches!(err, CliError::Output { .. }));
    assert_eq!(err.exit_code(), 3);
    std::fs::remove_file(&file).unwrap();
}
