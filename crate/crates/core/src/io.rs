//! JSON input and output.
//!
//! A complex is `{"vertices": N, "maximal": [[v, …], …]}` or `{"named": "torus:2"}`.
//! Wherever another document expects a complex it accepts such an object
//! inline, or a string naming a file relative to the referring document.
//! Simplex keys are sorted vertex lists such as `"0,1,2"`; map keys are
//! `"σ<τ"` for sheaves and `"σ>τ"` for perverse attaching maps.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::complex::{circle, cone, simplex, sphere, suspension, torus, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::euler::ConstructibleFunction;
use crate::exactla::{Rational, SparseMatrix};
use crate::perverse::{BBDGPerversity, CellularPerverseSheaf, DeltaFunction};
use crate::sheaf::CellularSheaf;
use crate::strat::StratifiedComplex;

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedInput(msg.into())
}

/// Reads and parses a JSON file, reporting the location of syntax errors.
pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    // serde_json's message already ends with "at line L column C"
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Builds a named complex: `simplex:n`, `sphere:n`, `circle:m`, `torus:n`,
/// optionally prefixed by `cone/` or `suspension/`.
pub fn named_complex(name: &str) -> Result<SimplicialComplex> {
    if let Some(rest) = name.strip_prefix("cone/") {
        return Ok(cone(&named_complex(rest)?));
    }
    if let Some(rest) = name.strip_prefix("suspension/") {
        return Ok(suspension(&named_complex(rest)?));
    }
    let (kind, arg) = name.split_once(':').unwrap_or((name, ""));
    let size = |default: usize| -> Result<usize> {
        if arg.is_empty() {
            Ok(default)
        } else {
            arg.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad size in '{name}'")))
        }
    };
    match kind {
        "simplex" => Ok(simplex(size(2)?)),
        "sphere" => Ok(sphere(size(2)?)),
        "circle" => circle(size(3)?),
        "torus" => Ok(torus(size(2)?)),
        _ => Err(Error::InvalidArgument(format!("unknown complex '{name}'"))),
    }
}

pub fn complex_from_value(v: &Value, dir: &Path) -> Result<SimplicialComplex> {
    match v {
        Value::String(file) => {
            let path = dir.join(file);
            complex_from_value(&read_json(&path)?, &base_dir(&path))
        }
        Value::Object(obj) => {
            if let Some(name) = obj.get("named") {
                let name = name.as_str().ok_or_else(|| malformed("'named' must be a string"))?;
                return named_complex(name);
            }
            let n = obj
                .get("vertices")
                .and_then(Value::as_u64)
                .ok_or_else(|| malformed("complex needs an integer 'vertices'"))?;
            let maximal = obj
                .get("maximal")
                .ok_or_else(|| malformed("complex needs 'maximal'"))?;
            let maximal = simplex_list(maximal, "maximal")?;
            SimplicialComplex::from_maximal(n as usize, &maximal)
        }
        _ => Err(malformed("a complex must be an object or a file name")),
    }
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    complex_from_value(&read_json(path)?, &base_dir(path))
}

fn simplex_list(v: &Value, what: &str) -> Result<Vec<Vec<usize>>> {
    let arr = v
        .as_array()
        .ok_or_else(|| malformed(format!("'{what}' must be a list of simplices")))?;
    arr.iter()
        .map(|s| {
            s.as_array()
                .ok_or_else(|| malformed(format!("entries of '{what}' must be vertex lists")))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| malformed(format!("vertex ids in '{what}' must be naturals")))
                })
                .collect()
        })
        .collect()
}

pub fn complex_to_json(k: &SimplicialComplex) -> Value {
    json!({"vertices": k.vertex_count(), "maximal": k.maximal_simplices()})
}

fn simplex_id(k: &SimplicialComplex, key: &str) -> Result<usize> {
    let s = Simplex::parse_key(key)?;
    k.id(&s)
        .ok_or_else(|| malformed(format!("simplex '{key}' is not in the complex")))
}

pub fn parse_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                Err(malformed(format!("{n} is not an exact rational; quote fractions as \"a/b\"")))
            }
        }
        Value::String(s) => {
            Rational::from_str(s.trim()).map_err(|_| malformed(format!("'{s}' is not a rational")))
        }
        _ => Err(malformed("matrix entries must be integers or \"a/b\" strings")),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.to_integer().to_i64() {
            return json!(i);
        }
    }
    json!(r.to_string())
}

/// A matrix given as a list of rows with the expected shape.
pub fn parse_matrix(v: &Value, rows: usize, cols: usize, what: &str) -> Result<SparseMatrix> {
    let arr = v
        .as_array()
        .ok_or_else(|| malformed(format!("{what}: matrix must be a list of rows")))?;
    if arr.len() != rows {
        return Err(malformed(format!("{what}: expected {rows} rows, got {}", arr.len())));
    }
    let mut m = SparseMatrix::zeros(rows, cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| malformed(format!("{what}: row {i} is not a list")))?;
        if row.len() != cols {
            return Err(malformed(format!(
                "{what}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, x) in row.iter().enumerate() {
            let x = parse_rational(x)?;
            if !x.is_zero() {
                m.set(i, j, x);
            }
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &SparseMatrix) -> Value {
    Value::Array(
        m.to_dense()
            .iter()
            .map(|row| Value::Array(row.iter().map(rational_to_json).collect()))
            .collect(),
    )
}

fn stalks(obj: &Map<String, Value>, k: &SimplicialComplex) -> Result<Vec<usize>> {
    let mut dims = vec![0; k.len()];
    if let Some(st) = obj.get("stalks") {
        let st = st.as_object().ok_or_else(|| malformed("'stalks' must be an object"))?;
        for (key, d) in st {
            let id = simplex_id(k, key)?;
            dims[id] = d
                .as_u64()
                .ok_or_else(|| malformed(format!("stalk of '{key}' must be a natural")))?
                as usize;
        }
    }
    Ok(dims)
}

fn stalks_to_json(k: &SimplicialComplex, dims: &[usize]) -> Value {
    let m: Map<String, Value> = dims
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(id, &d)| (k.simplex(id).key(), json!(d)))
        .collect();
    Value::Object(m)
}

fn keyed_maps(
    obj: &Map<String, Value>,
    field: &str,
    sep: char,
    k: &SimplicialComplex,
    dims: &[usize],
) -> Result<BTreeMap<(usize, usize), SparseMatrix>> {
    let mut out = BTreeMap::new();
    let Some(maps) = obj.get(field) else {
        return Ok(out);
    };
    let maps = maps
        .as_object()
        .ok_or_else(|| malformed(format!("'{field}' must be an object")))?;
    for (key, m) in maps {
        let (a, b) = key
            .split_once(sep)
            .ok_or_else(|| malformed(format!("map key '{key}' must look like \"σ{sep}τ\"")))?;
        let (s, t) = (simplex_id(k, a)?, simplex_id(k, b)?);
        out.insert((s, t), parse_matrix(m, dims[t], dims[s], key)?);
    }
    Ok(out)
}

pub fn sheaf_from_value(v: &Value, dir: &Path) -> Result<CellularSheaf> {
    let obj = v.as_object().ok_or_else(|| malformed("a sheaf must be an object"))?;
    let k = complex_from_value(
        obj.get("complex").ok_or_else(|| malformed("sheaf needs 'complex'"))?,
        dir,
    )?;
    let dims = stalks(obj, &k)?;
    let maps = keyed_maps(obj, "maps", '<', &k, &dims)?;
    CellularSheaf::new(k, dims, maps)
}

pub fn read_sheaf(path: &Path) -> Result<CellularSheaf> {
    sheaf_from_value(&read_json(path)?, &base_dir(path))
}

pub fn sheaf_to_json(a: &CellularSheaf) -> Value {
    let k = a.base();
    let maps: Map<String, Value> = a
        .maps()
        .iter()
        .map(|(&(s, t), m)| {
            (format!("{}<{}", k.simplex(s).key(), k.simplex(t).key()), matrix_to_json(m))
        })
        .collect();
    json!({"complex": complex_to_json(k), "stalks": stalks_to_json(k, a.dims()), "maps": maps})
}

fn bbdg(v: &Value) -> Result<BBDGPerversity> {
    let vals: Vec<i64> = v
        .as_array()
        .ok_or_else(|| malformed("'perversity' must be a list of integers"))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| malformed("perversity entries must be integers")))
        .collect::<Result<_>>()?;
    BBDGPerversity::new(vals)
}

pub fn perverse_from_value(v: &Value, dir: &Path) -> Result<CellularPerverseSheaf> {
    let obj = v.as_object().ok_or_else(|| malformed("a perverse sheaf must be an object"))?;
    let k = complex_from_value(
        obj.get("complex").ok_or_else(|| malformed("perverse sheaf needs 'complex'"))?,
        dir,
    )?;
    let p = bbdg(obj.get("perversity").ok_or_else(|| malformed("needs 'perversity'"))?)?;
    let dims = stalks(obj, &k)?;
    let attach = keyed_maps(obj, "attach", '>', &k, &dims)?;
    let delta = Arc::new(DeltaFunction::new(k, p)?);
    CellularPerverseSheaf::new(delta, dims, attach)
}

pub fn read_perverse(path: &Path) -> Result<CellularPerverseSheaf> {
    perverse_from_value(&read_json(path)?, &base_dir(path))
}

pub fn perverse_to_json(s: &CellularPerverseSheaf) -> Value {
    let k = s.base();
    let attach: Map<String, Value> = s
        .attach_maps()
        .iter()
        .map(|(&(a, b), m)| {
            (format!("{}>{}", k.simplex(a).key(), k.simplex(b).key()), matrix_to_json(m))
        })
        .collect();
    json!({
        "complex": complex_to_json(k),
        "perversity": s.delta_function().perversity().values(),
        "stalks": stalks_to_json(k, s.dims()),
        "attach": attach,
    })
}

/// `{"complex": …, "filtration": {"codim2": [[…]], …}, "boundary": false}`.
pub fn stratified_from_value(v: &Value, dir: &Path) -> Result<StratifiedComplex> {
    let obj = v.as_object().ok_or_else(|| malformed("a stratification must be an object"))?;
    let k = complex_from_value(
        obj.get("complex").ok_or_else(|| malformed("stratification needs 'complex'"))?,
        dir,
    )?;
    let mut levels = BTreeMap::new();
    if let Some(f) = obj.get("filtration") {
        let f = f.as_object().ok_or_else(|| malformed("'filtration' must be an object"))?;
        for (key, list) in f {
            let c: usize = key
                .strip_prefix("codim")
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| malformed(format!("filtration key '{key}' must be codimN")))?;
            levels.insert(c, simplex_list(list, key)?);
        }
    }
    let boundary = obj.get("boundary").and_then(Value::as_bool).unwrap_or(false);
    Ok(StratifiedComplex::new(k, &levels)?.with_boundary(boundary))
}

pub fn read_stratified(path: &Path) -> Result<StratifiedComplex> {
    stratified_from_value(&read_json(path)?, &base_dir(path))
}

/// `{"complex": …, "values": {"σ-key": integer}}`; absent keys are 0.
pub fn function_from_value(v: &Value, dir: &Path) -> Result<ConstructibleFunction> {
    let obj = v.as_object().ok_or_else(|| malformed("a function must be an object"))?;
    let k = complex_from_value(
        obj.get("complex").ok_or_else(|| malformed("function needs 'complex'"))?,
        dir,
    )?;
    let mut values = vec![0; k.len()];
    if let Some(vals) = obj.get("values") {
        let vals = vals.as_object().ok_or_else(|| malformed("'values' must be an object"))?;
        for (key, x) in vals {
            values[simplex_id(&k, key)?] = x
                .as_i64()
                .ok_or_else(|| malformed(format!("value of '{key}' must be an integer")))?;
        }
    }
    ConstructibleFunction::new(k, values)
}

pub fn read_function(path: &Path) -> Result<ConstructibleFunction> {
    function_from_value(&read_json(path)?, &base_dir(path))
}

pub fn function_to_json(f: &ConstructibleFunction) -> Value {
    let k = f.base();
    let values: Map<String, Value> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(id, &v)| (k.simplex(id).key(), json!(v)))
        .collect();
    json!({"complex": complex_to_json(k), "values": values})
}

/// `{"target": complex, "vertex_map": [..]}`.
pub fn map_target_from_value(v: &Value, dir: &Path) -> Result<(SimplicialComplex, Vec<usize>)> {
    let obj = v.as_object().ok_or_else(|| malformed("a map must be an object"))?;
    let target = complex_from_value(
        obj.get("target").ok_or_else(|| malformed("map needs 'target'"))?,
        dir,
    )?;
    let vm = obj
        .get("vertex_map")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("map needs a 'vertex_map' list"))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| malformed("vertex_map entries must be naturals")))
        .collect::<Result<_>>()?;
    Ok((target, vm))
}

/// `{"facets": [[vertex ids], …]}`.
pub fn polytope_from_value(v: &Value) -> Result<Vec<Vec<usize>>> {
    let obj = v.as_object().ok_or_else(|| malformed("a polytope must be an object"))?;
    simplex_list(
        obj.get("facets").ok_or_else(|| malformed("polytope needs 'facets'"))?,
        "facets",
    )
}
