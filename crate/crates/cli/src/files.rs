//! Model and POVM description files.
//!
//! Model file:
//!
//! ```json
//! {
//!   "pure": { "kind": "xz_circle" | "longitude_param" | "colatitude_param", "fixed_angle": 1.0 },
//!   "weight": "pure" | { "kind": "const" | "affine" | "sinusoidal", "coefficients": [0.75] }
//! }
//! ```
//!
//! POVM file (entries are row-major `[re, im]` pairs, labels optional):
//!
//! ```json
//! { "dim": 2, "elements": [ { "label": "+", "entries": [[0.5, 0.0], ...] }, ... ] }
//! ```

use std::fmt::Write as _;
use std::path::Path;

use helstrom::measure::{Povm, PovmElement};
use helstrom::{ComplexMatrix, PureFamily, PureKind, QubitModel, WeightFamily, C64};
use serde_json::{Map, Value};

use crate::error::CliError;

fn read_json(path: &Path, what: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(what, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(what, format!("invalid JSON in {}: {e}", path.display())))
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| CliError::config(field, "expected an object"))
}

fn get<'a>(obj: &'a Map<String, Value>, field: &str, key: &str) -> Result<&'a Value, CliError> {
    obj.get(key).ok_or_else(|| CliError::config(&format!("{field}.{key}"), "missing"))
}

fn number(v: &Value, field: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::config(field, "expected a finite number"))
}

fn string<'a>(v: &'a Value, field: &str) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| CliError::config(field, "expected a string"))
}

pub fn read_model(path: &Path) -> Result<QubitModel, CliError> {
    let root = read_json(path, "model")?;
    parse_model(&root)
}

pub fn parse_model(root: &Value) -> Result<QubitModel, CliError> {
    let top = object(root, "model")?;
    let pure = object(get(top, "model", "pure")?, "pure")?;
    let kind = string(get(pure, "pure", "kind")?, "pure.kind")?;
    let fixed = match pure.get("fixed_angle") {
        Some(v) => number(v, "pure.fixed_angle")?,
        None => 0.0,
    };
    let family = match kind {
        "xz_circle" => PureFamily::xz_circle(),
        "longitude_param" => PureFamily::longitude(fixed),
        "colatitude_param" => PureFamily::colatitude(fixed),
        other => {
            return Err(CliError::config(
                "pure.kind",
                format!("unknown kind `{other}` (expected xz_circle, longitude_param or colatitude_param)"),
            ))
        }
    };
    if family.kind != PureKind::XzCircle && pure.get("fixed_angle").is_none() {
        return Err(CliError::config("pure.fixed_angle", "missing"));
    }

    let weight = get(top, "model", "weight")?;
    if weight.as_str() == Some("pure") {
        return Ok(QubitModel::pure(family));
    }
    if weight.is_string() {
        return Err(CliError::config("weight", "expected \"pure\" or an object"));
    }
    let w = object(weight, "weight")?;
    let wkind = string(get(w, "weight", "kind")?, "weight.kind")?;
    let coeffs = get(w, "weight", "coefficients")?
        .as_array()
        .ok_or_else(|| CliError::config("weight.coefficients", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| number(v, &format!("weight.coefficients[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let expect = |n: usize| {
        if coeffs.len() == n {
            Ok(())
        } else {
            Err(CliError::config(
                "weight.coefficients",
                format!("`{wkind}` takes {n} coefficient(s), got {}", coeffs.len()),
            ))
        }
    };
    let family_w = match wkind {
        "const" => {
            expect(1)?;
            WeightFamily::Const { value: coeffs[0] }
        }
        "affine" => {
            expect(2)?;
            WeightFamily::Affine { a: coeffs[0], b: coeffs[1] }
        }
        "sinusoidal" => {
            expect(2)?;
            WeightFamily::Sinusoidal { a: coeffs[0], b: coeffs[1] }
        }
        other => {
            return Err(CliError::config(
                "weight.kind",
                format!("unknown kind `{other}` (expected const, affine or sinusoidal)"),
            ))
        }
    };
    Ok(QubitModel::mixed(family, family_w))
}

pub fn read_povm(path: &Path) -> Result<Povm, CliError> {
    let root = read_json(path, "povm")?;
    parse_povm(&root)
}

pub fn parse_povm(root: &Value) -> Result<Povm, CliError> {
    let top = object(root, "povm")?;
    let dim = get(top, "povm", "dim")?
        .as_u64()
        .ok_or_else(|| CliError::config("povm.dim", "expected a positive integer"))? as usize;
    if dim != 2 {
        return Err(CliError::config("povm.dim", format!("only qubit POVMs (dim 2) are supported, got {dim}")));
    }
    let elements = get(top, "povm", "elements")?
        .as_array()
        .ok_or_else(|| CliError::config("povm.elements", "expected an array"))?;
    let mut out = Vec::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        let field = format!("povm.elements[{i}]");
        let obj = object(e, &field)?;
        let label = match obj.get("label") {
            Some(v) => string(v, &format!("{field}.label"))?.to_string(),
            None => i.to_string(),
        };
        let entries = get(obj, &field, "entries")?
            .as_array()
            .ok_or_else(|| CliError::config(&format!("{field}.entries"), "expected an array"))?;
        if entries.len() != dim * dim {
            return Err(CliError::config(
                &format!("{field}.entries"),
                format!("expected {} entries, got {}", dim * dim, entries.len()),
            ));
        }
        let zs = entries
            .iter()
            .enumerate()
            .map(|(j, z)| {
                let f = format!("{field}.entries[{j}]");
                match z.as_array().map(Vec::as_slice) {
                    Some([re, im]) => Ok(C64::new(number(re, &f)?, number(im, &f)?)),
                    _ => Err(CliError::config(&f, "expected a [re, im] pair")),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = ComplexMatrix::from_row_major(dim, &zs).map_err(|e| CliError::invalid(&field, e))?;
        out.push(PovmElement { label, m });
    }
    Povm::new(out).map_err(|e| CliError::invalid("povm", e))
}

/// Serializes with 17 significant digits so the file re-parses bit-for-bit.
pub fn format_povm(povm: &Povm) -> String {
    let mut s = String::from("{\n  \"dim\": 2,\n  \"elements\": [\n");
    for (i, e) in povm.elements().iter().enumerate() {
        let entries: Vec<String> = e
            .m
            .row_major()
            .iter()
            .map(|z| format!("[{:.16e}, {:.16e}]", z.re, z.im))
            .collect();
        let label = serde_json::to_string(&e.label).expect("string serializes");
        let sep = if i + 1 < povm.len() { "," } else { "" };
        let _ = writeln!(
            s,
            "    {{ \"label\": {label}, \"entries\": [{}] }}{sep}",
            entries.join(", ")
        );
    }
    s.push_str("  ]\n}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use helstrom::measure::{optimal_measurement, random_povm};

    fn assert_bitwise_round_trip(povm: &Povm) {
        let text = format_povm(povm);
        let back = parse_povm(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.labels(), povm.labels());
        for (a, b) in povm.elements().iter().zip(back.elements()) {
            for (x, y) in a.m.row_major().iter().zip(b.m.row_major()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn povm_text_round_trips_exactly() {
        let m = QubitModel::mixed(PureFamily::longitude(1.1), WeightFamily::Sinusoidal { a: 0.7, b: 0.1 });
        for i in 0..20 {
            let t = -3.0 + 0.3 * i as f64;
            assert_bitwise_round_trip(&optimal_measurement(&m, t).unwrap());
        }
        for seed in 0..20 {
            assert_bitwise_round_trip(&random_povm(2 + seed as usize % 4, seed).unwrap());
        }
    }

    #[test]
    fn model_errors_name_fields() {
        let err = |s: &str| match parse_model(&serde_json::from_str(s).unwrap()) {
            Err(CliError::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(err(r#"{"weight": "pure"}"#), "model.pure");
        assert_eq!(err(r#"{"pure": {"kind": "spiral"}, "weight": "pure"}"#), "pure.kind");
        assert_eq!(err(r#"{"pure": {"kind": "longitude_param"}, "weight": "pure"}"#), "pure.fixed_angle");
        assert_eq!(err(r#"{"pure": {"kind": "xz_circle"}, "weight": {"kind": 3}}"#), "weight.kind");
        assert_eq!(
            err(r#"{"pure": {"kind": "xz_circle"}, "weight": {"kind": "affine", "coefficients": [0.7]}}"#),
            "weight.coefficients"
        );
    }

    #[test]
    fn povm_errors_name_fields() {
        let err = |s: &str| match parse_povm(&serde_json::from_str(s).unwrap()) {
            Err(CliError::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(err(r#"{"dim": 3, "elements": []}"#), "povm.dim");
        assert_eq!(err(r#"{"dim": 2, "elements": [{"entries": [[1, 0]]}]}"#), "povm.elements[0].entries");
        assert_eq!(
            err(r#"{"dim": 2, "elements": [{"entries": [[1, 0], [0, 0], [0, 0], [0.5, 0]]}]}"#),
            "povm"
        );
    }
}
