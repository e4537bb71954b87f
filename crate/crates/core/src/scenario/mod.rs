//! Time-series management: representative-day clustering, scenario
//! probabilities and NPV scaling factors.

pub mod kmedoids;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use kmedoids::{cluster_representative_days, ClusterResult};

/// A scenario with its probability of occurrence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub probability: f64,
}

/// Weighted representative-day time structure shared by all models.
///
/// Hours of one simulation year form `days_per_year` contiguous 24-hour
/// blocks; each block stands for `weight` calendar days, and the weights
/// of one (scenario, year) sum to the number of clustered days.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    pub years: Vec<u32>,
    /// Years between modelling years.
    pub year_gap: u32,
    /// Calendar years represented by one simulation year.
    pub calendar_multiplicity: u32,
    pub days_per_year: usize,
    pub hours_per_day: usize,
    /// Time step in hours.
    pub dt_hours: f64,
    /// Day weights `[scenario][year index][day]`, in days per year.
    pub day_weights: Vec<Vec<Vec<f64>>>,
}

impl ScenarioSet {
    /// Hours per simulation year (the `T` of the storage boundary).
    pub fn hours_per_year(&self) -> usize {
        self.days_per_year * self.hours_per_day
    }

    pub fn block_of(&self, t: usize) -> usize {
        t / self.hours_per_day
    }

    pub fn is_block_start(&self, t: usize) -> bool {
        t % self.hours_per_day == 0
    }

    pub fn is_block_end(&self, t: usize) -> bool {
        (t + 1) % self.hours_per_day == 0
    }

    /// Day weight applying to hour `t` of `(scenario, year)`.
    pub fn hour_weight(&self, scenario: usize, year_idx: usize, t: usize) -> f64 {
        self.day_weights[scenario][year_idx][self.block_of(t)]
    }

    /// A single-scenario, single-year, uniform-weight set for small test
    /// systems: `hours` hours in one block, each standing for one hour.
    pub fn toy(hours: usize) -> ScenarioSet {
        ScenarioSet {
            scenarios: vec![Scenario {
                id: "base".into(),
                probability: 1.0,
            }],
            years: vec![2020],
            year_gap: 10,
            calendar_multiplicity: 1,
            days_per_year: 1,
            hours_per_day: hours,
            dt_hours: 1.0,
            day_weights: vec![vec![vec![1.0]]],
        }
    }
}

/// Per-scenario, per-year hourly series, keyed by profile name.
///
/// Generator availability series are per-unit in `[0, 1]`; demand series
/// are in MW.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProfileLibrary {
    /// `series[key][scenario][year index]` is one year of hourly values.
    series: BTreeMap<String, Vec<Vec<Vec<f64>>>>,
}

impl ProfileLibrary {
    pub fn insert(&mut self, key: &str, per_scenario_year: Vec<Vec<Vec<f64>>>) {
        self.series.insert(key.to_string(), per_scenario_year);
    }

    pub fn get(&self, key: &str, scenario: usize, year_idx: usize) -> Option<&[f64]> {
        self.series
            .get(key)
            .and_then(|s| s.get(scenario))
            .and_then(|y| y.get(year_idx))
            .map(Vec::as_slice)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.series.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }
}

/// NPV scaling factors per modelling year.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NpvFactors {
    pub discount_rate: f64,
    pub base_year: u32,
    /// `(f_y, f_h)` keyed by year: the yearly factor discounts one-shot
    /// investments, the hourly factor scales a one-hour value stream over
    /// the calendar years the simulation year stands for.
    pub per_year: BTreeMap<u32, (f64, f64)>,
}

impl NpvFactors {
    pub fn yearly(&self, year: u32) -> f64 {
        self.per_year[&year].0
    }

    pub fn hourly(&self, year: u32) -> f64 {
        self.per_year[&year].1
    }
}

/// Compute NPV factors.
///
/// `f_y(y) = (1+r)^-(y-base)` and
/// `f_h(y) = sum_{j=0}^{m-1} (1+r)^-(y-base+j)`, where `m` is the number
/// of calendar years represented by one simulation year. Day weights are
/// applied at summation time, not baked into `f_h`.
pub fn npv_factors(
    discount_rate: f64,
    base_year: u32,
    years: &[u32],
    calendar_multiplicity: u32,
) -> Result<NpvFactors> {
    if discount_rate <= -1.0 {
        return Err(Error::Scenario("discount rate must be > -1".into()));
    }
    if calendar_multiplicity < 1 {
        return Err(Error::Scenario("calendar multiplicity must be >= 1".into()));
    }
    let q = 1.0 + discount_rate;
    let mut per_year = BTreeMap::new();
    for &y in years {
        let offset = y as i64 - base_year as i64;
        let f_y = q.powi(-(offset as i32));
        let f_h = (0..calendar_multiplicity)
            .map(|j| q.powi(-((offset + j as i64) as i32)))
            .sum();
        per_year.insert(y, (f_y, f_h));
    }
    Ok(NpvFactors {
        discount_rate,
        base_year,
        per_year,
    })
}

/// Raw (pre-clustering) hourly data for one scenario: per year, a map of
/// profile key to an hourly series whose length is a multiple of 24.
pub type RawYearData = BTreeMap<String, Vec<f64>>;

/// Raw input to [`build_scenario_set`]: `(scenario id, year -> data)`.
pub type RawScenario = (String, BTreeMap<u32, RawYearData>);

/// Cluster raw hourly data into `k` representative days per simulation
/// year and assemble the scenario set plus profile library.
///
/// All series of one (scenario, year) must share the same hourly index;
/// they are concatenated per day so clustering preserves their temporal
/// correlation. Probabilities must sum to 1 within 1e-9 and are then
/// normalised exactly.
pub fn build_scenario_set(
    raw: &[RawScenario],
    k: usize,
    probabilities: &[f64],
    year_gap: u32,
    calendar_multiplicity: u32,
    seed: u64,
) -> Result<(ScenarioSet, ProfileLibrary)> {
    if raw.is_empty() {
        return Err(Error::Scenario("no scenarios given".into()));
    }
    if probabilities.len() != raw.len() {
        return Err(Error::Scenario(format!(
            "{} probabilities for {} scenarios",
            probabilities.len(),
            raw.len()
        )));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Scenario(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    if probabilities.iter().any(|p| *p < 0.0) {
        return Err(Error::Scenario("probabilities must be >= 0".into()));
    }

    let years: Vec<u32> = raw[0].1.keys().copied().collect();
    let keys: Vec<String> = raw[0]
        .1
        .values()
        .next()
        .map(|m| m.keys().cloned().collect())
        .unwrap_or_default();
    if years.is_empty() || keys.is_empty() {
        return Err(Error::Scenario("scenario carries no data".into()));
    }

    let hours_per_day = 24usize;
    let mut day_weights: Vec<Vec<Vec<f64>>> = Vec::with_capacity(raw.len());
    let mut clustered: BTreeMap<String, Vec<Vec<Vec<f64>>>> = keys
        .iter()
        .map(|key| (key.clone(), vec![Vec::new(); raw.len()]))
        .collect();

    for (s_idx, (sid, per_year)) in raw.iter().enumerate() {
        if per_year.keys().copied().collect::<Vec<_>>() != years {
            return Err(Error::Scenario(format!(
                "scenario `{sid}` has a different year set"
            )));
        }
        let mut weights_per_year = Vec::with_capacity(years.len());
        for (&year, data) in per_year {
            let len = data
                .values()
                .next()
                .map(Vec::len)
                .ok_or_else(|| Error::Scenario(format!("scenario `{sid}` year {year} empty")))?;
            if len == 0 || len % hours_per_day != 0 {
                return Err(Error::Scenario(format!(
                    "scenario `{sid}` year {year}: series length {len} is not a multiple of 24"
                )));
            }
            let n_days = len / hours_per_day;
            let mut matrix = vec![Vec::with_capacity(keys.len() * hours_per_day); n_days];
            for key in &keys {
                let series = data.get(key).ok_or_else(|| Error::Scenario(format!(
                    "scenario `{sid}` year {year}: misaligned series, missing `{key}`"
                )))?;
                if series.len() != len {
                    return Err(Error::Scenario(format!(
                        "scenario `{sid}` year {year}: series `{key}` has length {} != {len}",
                        series.len()
                    )));
                }
                for (day, row) in matrix.iter_mut().enumerate() {
                    row.extend_from_slice(
                        &series[day * hours_per_day..(day + 1) * hours_per_day],
                    );
                }
            }

            let result = cluster_representative_days(&matrix, k, seed)?;
            weights_per_year.push(result.weights.iter().map(|w| *w as f64).collect());
            for key in &keys {
                let series = &data[key];
                let mut year_profile = Vec::with_capacity(k * hours_per_day);
                for &day in &result.medoids {
                    year_profile
                        .extend_from_slice(&series[day * hours_per_day..(day + 1) * hours_per_day]);
                }
                clustered.get_mut(key).unwrap()[s_idx].push(year_profile);
            }
        }
        day_weights.push(weights_per_year);
    }

    let scenarios = raw
        .iter()
        .zip(probabilities)
        .map(|((id, _), p)| Scenario {
            id: id.clone(),
            probability: p / total,
        })
        .collect();

    let mut library = ProfileLibrary::default();
    for (key, data) in clustered {
        library.insert(&key, data);
    }

    Ok((
        ScenarioSet {
            scenarios,
            years,
            year_gap,
            calendar_multiplicity,
            days_per_year: k,
            hours_per_day,
            dt_hours: 1.0,
            day_weights,
        },
        library,
    ))
}

/// Read one profile from CSV with columns `scenario,year,hour,value`.
pub fn read_profile_csv<R: Read>(reader: R) -> Result<BTreeMap<(String, u32), Vec<f64>>> {
    let mut out: BTreeMap<(String, u32), Vec<(u32, f64)>> = BTreeMap::new();
    let mut rdr = csv::Reader::from_reader(reader);
    for record in rdr.deserialize() {
        let (scenario, year, hour, value): (String, u32, u32, f64) =
            record.map_err(|e| Error::Scenario(format!("profile csv: {e}")))?;
        out.entry((scenario, year)).or_default().push((hour, value));
    }
    let mut series = BTreeMap::new();
    for ((scenario, year), mut rows) in out {
        rows.sort_by_key(|(h, _)| *h);
        for (i, (h, _)) in rows.iter().enumerate() {
            if *h as usize != i {
                return Err(Error::Scenario(format!(
                    "profile csv: scenario `{scenario}` year {year} misses hour {i}"
                )));
            }
        }
        series.insert((scenario, year), rows.into_iter().map(|(_, v)| v).collect());
    }
    Ok(series)
}

/// Export cluster assignments for audit as `day,medoid_day,weight` CSV.
pub fn write_assignments_csv(result: &ClusterResult, path: &Path) -> Result<()> {
    let mut out = String::from("day,medoid_day,weight\n");
    for (day, &pos) in result.assignment.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            day, result.medoids[pos], result.weights[pos]
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn npv_degenerates_at_zero_rate() {
        let f = npv_factors(0.0, 2020, &[2020, 2030, 2040], 1).unwrap();
        for &y in &[2020, 2030, 2040] {
            assert_eq!(f.yearly(y), 1.0);
            assert_eq!(f.hourly(y), 1.0);
        }
    }

    #[test]
    fn npv_matches_direct_evaluation() {
        let f = npv_factors(0.04, 2020, &[2030], 1).unwrap();
        assert!((f.yearly(2030) - 1.04f64.powi(-10)).abs() < 1e-12);
    }

    #[test]
    fn npv_hourly_is_the_geometric_series() {
        let f = npv_factors(0.04, 2020, &[2020], 10).unwrap();
        let direct: f64 = (0..10).map(|j| 1.04f64.powi(-j)).sum();
        assert!((f.hourly(2020) - direct).abs() < 1e-12);
        assert!((f.hourly(2020) - 8.4353).abs() < 1e-3);
    }

    #[test]
    fn npv_yearly_strictly_decreasing_for_positive_rate() {
        let years = [2020, 2030, 2040];
        let f = npv_factors(0.07, 2020, &years, 10).unwrap();
        for w in years.windows(2) {
            assert!(f.yearly(w[1]) < f.yearly(w[0]));
            let ratio = f.hourly(w[0]) / f.yearly(w[0]);
            let m = 10.0;
            assert!(ratio <= m + 1e-9);
            assert!(ratio >= m * 1.07f64.powi(-9) - 1e-9);
        }
    }

    fn raw_case(hours: usize, n_scenarios: usize) -> (Vec<RawScenario>, Vec<f64>) {
        let raw: Vec<RawScenario> = (0..n_scenarios)
            .map(|s| {
                let mut per_year = BTreeMap::new();
                for year in [2020u32, 2030] {
                    let mut data = BTreeMap::new();
                    data.insert(
                        "wind".to_string(),
                        (0..hours).map(|h| ((h + s) % 24) as f64 / 24.0).collect(),
                    );
                    data.insert(
                        "load".to_string(),
                        (0..hours).map(|h| 100.0 + (h % 24) as f64).collect(),
                    );
                    per_year.insert(year, data);
                }
                (format!("s{s}"), per_year)
            })
            .collect();
        let probs = vec![1.0 / n_scenarios as f64; n_scenarios];
        (raw, probs)
    }

    #[test]
    fn build_scenario_set_reduces_years() {
        let (raw, probs) = raw_case(8760, 1);
        let (set, lib) = build_scenario_set(&raw, 4, &probs, 10, 10, 0).unwrap();
        assert_eq!(set.hours_per_year(), 96);
        let weight_sum: f64 = set.day_weights[0][0].iter().sum();
        assert_eq!(weight_sum * 24.0, 8760.0);
        assert_eq!(lib.get("wind", 0, 0).unwrap().len(), 96);
        assert_eq!(set.scenarios[0].probability, 1.0);
    }

    #[test]
    fn six_equal_scenarios() {
        let (raw, probs) = raw_case(48, 6);
        let (set, _) = build_scenario_set(&raw, 2, &probs, 10, 10, 0).unwrap();
        for s in &set.scenarios {
            assert!((s.probability - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_probabilities_are_rejected() {
        let (raw, _) = raw_case(48, 2);
        let err = build_scenario_set(&raw, 2, &[0.6, 0.6], 10, 10, 0);
        assert!(err.is_err());
    }

    #[test]
    fn misaligned_series_are_rejected() {
        let (mut raw, probs) = raw_case(48, 1);
        raw[0].1.get_mut(&2020).unwrap().get_mut("wind").unwrap().pop();
        assert!(build_scenario_set(&raw, 2, &probs, 10, 10, 0).is_err());
    }

    #[test]
    fn profile_csv_roundtrip() {
        let csv = "scenario,year,hour,value\ns0,2020,0,1.5\ns0,2020,1,2.5\n";
        let series = read_profile_csv(csv.as_bytes()).unwrap();
        assert_eq!(series[&("s0".to_string(), 2020)], vec![1.5, 2.5]);
    }
}
