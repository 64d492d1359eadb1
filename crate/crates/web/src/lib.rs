//! Browser bindings. Every export takes plain values and returns a JSON
//! string, so the page needs no generated TypeScript types.

use fdmusic::models::{build_all_interval, build_jarrell};
use fdmusic::pitch::pitch_name;
use fdmusic::search::dfs;
use fdmusic::{JarrellSpec, Relation, SearchOptions, SearchOutcome, Space, SpaceStatus, ValHeuristic, VarHeuristic};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Hard cap on solutions returned to the page.
pub const MAX_SHOWN: usize = 500;

fn render(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn stats(out: &SearchOutcome) -> Value {
    json!({
        "nodes": out.stats.nodes,
        "failures": out.stats.failures,
        "max_depth": out.stats.max_depth,
        "elapsed_ms": out.stats.elapsed.as_secs_f64() * 1000.0,
    })
}

/// Posts `p1 > p2 + offset` on `p1 in lo1..hi1`, `p2 in lo2..hi2` and
/// reports the domains after propagation.
pub fn narrow_json(lo1: i32, hi1: i32, lo2: i32, hi2: i32, offset: i32) -> Result<Value, String> {
    let mut s = Space::new();
    let p1 = s.new_var_range(lo1.into(), hi1.into());
    let p2 = s.new_var_range(lo2.into(), hi2.into());
    s.post_binary(p1, Relation::Gt, p2, offset.into()).map_err(|e| e.to_string())?;
    let status = match s.propagate() {
        SpaceStatus::Failed => "failed",
        SpaceStatus::Solved => "solved",
        SpaceStatus::Stable => "stable",
    };
    Ok(json!({
        "status": status,
        "pitch1": s.domain(p1).ranges(),
        "pitch2": s.domain(p2).ranges(),
    }))
}

fn var_heuristic(name: &str, seed: u64) -> Result<VarHeuristic, String> {
    Ok(match name {
        "input" => VarHeuristic::InputOrder,
        "smallest" => VarHeuristic::SmallestDomain,
        "largest" => VarHeuristic::LargestDomain,
        "random" => VarHeuristic::Random(seed),
        other => return Err(format!("unknown variable heuristic `{other}`")),
    })
}

fn val_heuristic(name: &str, seed: u64) -> Result<ValHeuristic, String> {
    Ok(match name {
        "min" => ValHeuristic::Min,
        "max" => ValHeuristic::Max,
        "median" => ValHeuristic::Median,
        "random" => ValHeuristic::Random(seed ^ 0x9E37_79B9_7F4A_7C15),
        other => return Err(format!("unknown value heuristic `{other}`")),
    })
}

pub fn all_interval_json(
    n: usize,
    var: &str,
    val: &str,
    seed: u64,
    max_solutions: usize,
    time_limit_ms: u32,
) -> Result<Value, String> {
    let model = build_all_interval(n).map_err(|e| e.to_string())?;
    let opts = SearchOptions {
        var_heuristic: var_heuristic(var, seed)?,
        val_heuristic: val_heuristic(val, seed)?,
        max_solutions: Some(max_solutions.clamp(1, MAX_SHOWN)),
        time_limit: (time_limit_ms > 0).then(|| std::time::Duration::from_millis(time_limit_ms.into())),
    };
    let out = dfs(model.space().map_err(|e| e.to_string())?, &opts);
    let rows: Vec<Vec<i64>> = out.solutions.iter().map(|s| s.project(&model.pitches)).collect();
    let names: Option<Vec<Vec<String>>> =
        (n == 12).then(|| rows.iter().map(|r| r.iter().map(|&v| pitch_name(60 + v)).collect()).collect());
    Ok(json!({
        "solutions": rows,
        "pitches": names,
        "stopped_by_limit": out.stopped_by_limit,
        "stats": stats(&out),
    }))
}

pub fn jarrell_json(spec: &str, max_solutions: usize) -> Result<Value, String> {
    let spec = JarrellSpec::from_json(spec).map_err(|e| e.to_string())?;
    let model = build_jarrell(&spec).map_err(|e| e.to_string())?;
    let opts = SearchOptions { max_solutions: Some(max_solutions.clamp(1, MAX_SHOWN)), ..Default::default() };
    let out = dfs(model.space().map_err(|e| e.to_string())?, &opts);
    let rows: Vec<Vec<i64>> = out.solutions.iter().map(|s| s.project(&model.pitches)).collect();
    let names: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&v| pitch_name(v)).collect()).collect();
    Ok(json!({
        "solutions": rows,
        "pitches": names,
        "stopped_by_limit": out.stopped_by_limit,
        "stats": stats(&out),
    }))
}

#[wasm_bindgen]
pub fn narrow(lo1: i32, hi1: i32, lo2: i32, hi2: i32, offset: i32) -> String {
    render(narrow_json(lo1, hi1, lo2, hi2, offset))
}

#[wasm_bindgen]
pub fn all_interval(n: usize, var: &str, val: &str, seed: u64, max_solutions: usize, time_limit_ms: u32) -> String {
    render(all_interval_json(n, var, val, seed, max_solutions, time_limit_ms))
}

#[wasm_bindgen]
pub fn jarrell(spec: &str, max_solutions: usize) -> String {
    render(jarrell_json(spec, max_solutions))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrowing_matches_the_worked_example() {
        let v = narrow_json(36, 72, 60, 80, 2).unwrap();
        assert_eq!(v["status"], "stable");
        assert_eq!(v["pitch1"], json!([[63, 72]]));
        assert_eq!(v["pitch2"], json!([[60, 69]]));
        let v: Value = serde_json::from_str(&narrow(0, 3, 5, 9, 0)).unwrap();
        assert_eq!(v["status"], "failed");
    }

    #[test]
    fn all_interval_rows() {
        let v = all_interval_json(4, "input", "min", 0, 10, 0).unwrap();
        assert_eq!(v["solutions"], json!([[0, 1, 3, 2], [0, 3, 1, 2]]));
        assert!(v["pitches"].is_null());
        let v = all_interval_json(12, "smallest", "random", 3, 2, 0).unwrap();
        assert_eq!(v["solutions"].as_array().unwrap().len(), 2);
        assert_eq!(v["pitches"][0][0], "C4");
        assert!(all_interval_json(12, "sideways", "min", 0, 1, 0).is_err());
        let v: Value = serde_json::from_str(&all_interval(1, "input", "min", 0, 1, 0)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn jarrell_rows() {
        let spec = r#"{"n":5,"chord":[60,62,64,65,67],"first":60,"last":67,
                       "motives":[{"intervals":[2,2],"occurrences":1}]}"#;
        let v = jarrell_json(spec, 100).unwrap();
        assert_eq!(v["solutions"].as_array().unwrap().len(), 6);
        assert_eq!(v["pitches"][0], json!(["C4", "C4", "D4", "E4", "G4"]));
        let v: Value = serde_json::from_str(&jarrell(r#"{"n":5}"#, 1)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("chord"));
    }
}
