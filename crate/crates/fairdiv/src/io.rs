//! Scenario and division files. Rationals are always strings (`"p/q"` or an
//! integer), so nothing passes through a float on the way in or out.

use std::path::Path;

use fairdiv_core::measures::{Geometry, Interval, MeasureError, PiecewiseConstantMeasure};
use fairdiv_core::rational::{self, ParseRationalError, Rational};
use fairdiv_core::{ConnectedDivision, Division, GeneralDivision};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{at}: {source}")]
    Rational { at: String, source: ParseRationalError },
    #[error("{at}: {source}")]
    Measure { at: String, source: MeasureError },
    #[error("{at}: {message}")]
    Invalid { at: String, message: String },
}

fn invalid(at: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Invalid { at: at.into(), message: message.into() }
}

fn number(at: &str, text: &str) -> Result<Rational, InputError> {
    rational::parse(text).map_err(|source| InputError::Rational { at: at.to_string(), source })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntervalFile {
    pub start: String,
    pub end: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceFile {
    pub start: String,
    pub end: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlayerFile {
    pub name: String,
    pub density: Vec<PieceFile>,
}

/// On disk a division is either `{"type": "connected", "cuts", "assignment"}`
/// or `{"type": "general", "shares"}`; `type` may be omitted.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DivisionFile {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuts: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shares: Option<Vec<Vec<IntervalFile>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedDivisionFile {
    pub name: String,
    #[serde(flatten)]
    pub division: DivisionFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub geometry: String,
    pub players: Vec<PlayerFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divisions: Vec<NamedDivisionFile>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub geometry: Geometry,
    pub names: Vec<String>,
    pub measures: Vec<PiecewiseConstantMeasure>,
    pub divisions: Vec<(String, Division)>,
}

pub fn geometry_name(g: Geometry) -> &'static str {
    match g {
        Geometry::Cake => "cake",
        Geometry::Pie => "pie",
    }
}

fn parse_geometry(at: &str, text: &str) -> Result<Geometry, InputError> {
    match text {
        "cake" => Ok(Geometry::Cake),
        "pie" => Ok(Geometry::Pie),
        other => Err(invalid(at, format!("geometry must be \"cake\" or \"pie\", got {other:?}"))),
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Read { path: path.display().to_string(), source })
}

pub fn write(path: &Path, text: &str) -> Result<(), InputError> {
    std::fs::write(path, text).map_err(|source| InputError::Write { path: path.display().to_string(), source })
}

fn from_json<T: for<'de> Deserialize<'de>>(path: &str, text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|source| InputError::Json { path: path.to_string(), source })
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let label = path.display().to_string();
        Self::parse(&label, &read(path)?)
    }

    pub fn parse(label: &str, text: &str) -> Result<Self, InputError> {
        let file: ScenarioFile = from_json(label, text)?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &ScenarioFile) -> Result<Self, InputError> {
        let geometry = parse_geometry("geometry", &file.geometry)?;
        if file.players.is_empty() {
            return Err(invalid("players", "a scenario needs at least one player"));
        }
        let mut names = Vec::new();
        let mut measures = Vec::new();
        for (i, p) in file.players.iter().enumerate() {
            let at = format!("players[{i}] ({})", p.name);
            let mut pieces = Vec::new();
            for (j, piece) in p.density.iter().enumerate() {
                let here = format!("{at}.density[{j}]");
                let start = number(&format!("{here}.start"), &piece.start)?;
                let end = number(&format!("{here}.end"), &piece.end)?;
                let value = number(&format!("{here}.value"), &piece.value)?;
                let iv = Interval::new(geometry, start, end)
                    .map_err(|source| InputError::Measure { at: here.clone(), source })?;
                pieces.push((iv, value));
            }
            let m = PiecewiseConstantMeasure::from_pieces(geometry, &pieces)
                .map_err(|source| InputError::Measure { at: at.clone(), source })?;
            names.push(p.name.clone());
            measures.push(m);
        }
        let mut divisions = Vec::new();
        for (i, d) in file.divisions.iter().enumerate() {
            let at = format!("divisions[{i}] ({})", d.name);
            divisions.push((d.name.clone(), division_from_file(&at, &d.division, geometry, measures.len())?));
        }
        Ok(Scenario { geometry, names, measures, divisions })
    }

    pub fn division(&self, name: &str) -> Option<&Division> {
        self.divisions.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn n(&self) -> usize {
        self.measures.len()
    }
}

/// Reads a division file for a scenario with `n` players.
pub fn load_division(path: &Path, geometry: Geometry, n: usize) -> Result<Division, InputError> {
    let label = path.display().to_string();
    let file: DivisionFile = from_json(&label, &read(path)?)?;
    division_from_file(&label, &file, geometry, n)
}

pub fn parse_division(label: &str, text: &str, geometry: Geometry, n: usize) -> Result<Division, InputError> {
    let file: DivisionFile = from_json(label, text)?;
    division_from_file(label, &file, geometry, n)
}

/// Cake cut lists may also be written with the outer points `0` and `1`.
pub fn division_from_file(at: &str, f: &DivisionFile, geometry: Geometry, n: usize) -> Result<Division, InputError> {
    let general = match f.kind.as_deref() {
        Some("general") => true,
        Some("connected") => false,
        Some(other) => return Err(invalid(at, format!("unknown division type {other:?}"))),
        None => f.shares.is_some(),
    };
    if general {
        let shares = f.shares.as_ref().ok_or_else(|| invalid(at, "general division needs \"shares\""))?;
        if shares.len() != n {
            return Err(invalid(at, format!("{} shares for {n} players", shares.len())));
        }
        let mut out = Vec::with_capacity(n);
        for (i, share) in shares.iter().enumerate() {
            let mut ivs = Vec::new();
            for (j, iv) in share.iter().enumerate() {
                let here = format!("{at}.shares[{i}][{j}]");
                let s = number(&format!("{here}.start"), &iv.start)?;
                let e = number(&format!("{here}.end"), &iv.end)?;
                ivs.push(Interval::new(geometry, s, e).map_err(|source| InputError::Measure { at: here, source })?);
            }
            out.push(ivs);
        }
        let d = GeneralDivision::new(geometry, out).map_err(|v| invalid(at, v.to_string()))?;
        return Ok(Division::General(d));
    }
    let cuts = f.cuts.as_ref().ok_or_else(|| invalid(at, "connected division needs \"cuts\""))?;
    let assignment = f.assignment.clone().unwrap_or_else(|| (0..n).collect());
    if assignment.len() != n {
        return Err(invalid(at, format!("assignment has {} entries for {n} players", assignment.len())));
    }
    let mut cuts: Vec<Rational> =
        cuts.iter().enumerate().map(|(j, c)| number(&format!("{at}.cuts[{j}]"), c)).collect::<Result<_, _>>()?;
    if geometry == Geometry::Cake && cuts.len() == n + 1 && cuts[0] == rational::zero() && cuts[n] == rational::one() {
        cuts = cuts[1..n].to_vec();
    }
    let d = ConnectedDivision::new(geometry, cuts, assignment).map_err(|v| invalid(at, v.to_string()))?;
    Ok(Division::Connected(d))
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

pub fn division_file(d: &Division) -> DivisionFile {
    match d {
        Division::Connected(c) => DivisionFile {
            kind: Some("connected".into()),
            cuts: Some(c.cuts().iter().map(rational::format).collect()),
            assignment: Some(c.assignment().to_vec()),
            shares: None,
        },
        Division::General(g) => DivisionFile {
            kind: Some("general".into()),
            cuts: None,
            assignment: None,
            shares: Some(
                g.shares()
                    .iter()
                    .map(|s| {
                        s.iter()
                            .map(|iv| IntervalFile {
                                start: rational::format(iv.start()),
                                end: rational::format(iv.end()),
                            })
                            .collect()
                    })
                    .collect(),
            ),
        },
    }
}

pub fn division_json(d: &Division) -> Value {
    serde_json::to_value(division_file(d)).expect("plain data")
}

/// Density cells with nonzero value; gaps read back as zero.
pub fn player_file(name: &str, m: &PiecewiseConstantMeasure) -> PlayerFile {
    let bps = m.breakpoints();
    let density = m
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != rational::zero())
        .map(|(c, v)| PieceFile {
            start: rational::format(&bps[c]),
            end: rational::format(&bps[c + 1]),
            value: rational::format(v),
        })
        .collect();
    PlayerFile { name: name.to_string(), density }
}

pub fn scenario_file(s: &Scenario) -> ScenarioFile {
    ScenarioFile {
        geometry: geometry_name(s.geometry).to_string(),
        players: s.names.iter().zip(&s.measures).map(|(n, m)| player_file(n, m)).collect(),
        divisions: s
            .divisions
            .iter()
            .map(|(name, d)| NamedDivisionFile { name: name.clone(), division: division_file(d) })
            .collect(),
    }
}

pub fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

pub fn matrix_json(rows: &[Vec<Rational>]) -> Value {
    json!(rows.iter().map(|r| r.iter().map(rational::format).collect::<Vec<_>>()).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairdiv_core::rational::rat;

    const PIE: &str = r#"{
        "geometry": "pie",
        "players": [
            {"name": "a", "density": [{"start": "1/6", "end": "1", "value": "6/5"}]},
            {"name": "b", "density": [{"start": "2/3", "end": "1/2", "value": "6/5"}]}
        ],
        "divisions": [{"name": "halves", "cuts": ["0", "1/2"], "assignment": [1, 0]}]
    }"#;

    #[test]
    fn loads_wrapping_densities() {
        let s = Scenario::parse("pie", PIE).unwrap();
        assert_eq!(s.n(), 2);
        let b = &s.measures[1];
        assert_eq!(b.value(&Interval::new(Geometry::Pie, rat(1, 2), rat(2, 3)).unwrap()), rational::zero());
        assert!(s.division("halves").is_some());
    }

    #[test]
    fn reports_normalization_deficit() {
        let text = r#"{"geometry": "cake", "players": [{"name": "x", "density": [{"start": "0", "end": "1/2", "value": "1"}]}]}"#;
        let err = Scenario::parse("s", text).unwrap_err().to_string();
        assert!(err.contains("players[0] (x)"), "{err}");
        assert!(err.contains("1/2"), "{err}");
    }

    #[test]
    fn rejects_zero_denominator() {
        let text = r#"{"geometry": "cake", "players": [{"name": "x", "density": [{"start": "0", "end": "1/0", "value": "1"}]}]}"#;
        let err = Scenario::parse("s", text).unwrap_err();
        assert!(matches!(err, InputError::Rational { .. }));
        assert!(err.to_string().contains("density[0].end"));
    }

    #[test]
    fn json_errors_carry_line_numbers() {
        let err = Scenario::parse("s", "{\n  \"geometry\": \"cake\",\n  \"players\": [\n}").unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn division_round_trip() {
        let d = parse_division("d", r#"{"cuts": ["0", "1/3", "1"], "assignment": [1, 0]}"#, Geometry::Cake, 2).unwrap();
        let Division::Connected(c) = &d else { panic!() };
        assert_eq!(c.cuts(), &[rat(1, 3)]);
        let text = pretty(&division_file(&d));
        let back = parse_division("d", &text, Geometry::Cake, 2).unwrap();
        assert_eq!(back, d);
        let g = parse_division(
            "g",
            r#"{"shares": [[{"start": "0", "end": "1/4"}, {"start": "3/4", "end": "1"}], [{"start": "1/4", "end": "3/4"}]]}"#,
            Geometry::Cake,
            2,
        )
        .unwrap();
        assert_eq!(parse_division("g", &pretty(&division_file(&g)), Geometry::Cake, 2).unwrap(), g);
    }

    #[test]
    fn scenario_round_trip() {
        let s = Scenario::parse("pie", PIE).unwrap();
        let again = Scenario::from_file(&scenario_file(&s)).unwrap();
        assert_eq!(again.measures, s.measures);
        assert_eq!(again.divisions, s.divisions);
    }
}
