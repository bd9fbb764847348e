use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde_json::{json, Value as Json};

use super::{Complex, ComplexError, Facet, Label, ProcessName, Value, Vertex};
use crate::protocol::RingView;
use crate::reduction::SetFamily;

/// Tagged JSON form of a value: `{"label": "a"}`, `{"id_label": [7, "a"]}`,
/// `{"view": "a|b|c"}` or `{"family": [[value, ...], ...]}`.
pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Label(l) => json!({ "label": l.as_str() }),
        Value::IdLabel { id, label } => json!({ "id_label": [id, label.as_str()] }),
        Value::View(w) => json!({ "view": w.as_str() }),
        Value::Family(f) => {
            let sets: Vec<Json> = f
                .sets()
                .iter()
                .map(|s| Json::Array(s.iter().map(value_to_json).collect()))
                .collect();
            json!({ "family": sets })
        }
    }
}

fn format_err(msg: impl Into<String>) -> ComplexError {
    ComplexError::Format(msg.into())
}

fn label_from_json(j: &Json) -> Result<Label, ComplexError> {
    let s = j
        .as_str()
        .ok_or_else(|| format_err(format!("expected a label string, got {j}")))?;
    Label::new(s).map_err(|e| format_err(e.to_string()))
}

pub fn value_from_json(j: &Json) -> Result<Value, ComplexError> {
    let obj = j
        .as_object()
        .filter(|o| o.len() == 1)
        .ok_or_else(|| format_err(format!("expected a one-key tagged value, got {j}")))?;
    let (tag, body) = obj.iter().next().expect("one key");
    match tag.as_str() {
        "label" => Ok(Value::Label(label_from_json(body)?)),
        "id_label" => {
            let pair = body
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| format_err("id_label needs [id, label]"))?;
            let id = pair[0]
                .as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .filter(|&x| x > 0)
                .ok_or_else(|| format_err("id must be a positive integer"))?;
            Ok(Value::IdLabel {
                id,
                label: label_from_json(&pair[1])?,
            })
        }
        "view" => {
            let s = body
                .as_str()
                .ok_or_else(|| format_err("view must be a string"))?;
            RingView::parse(s)
                .map(Value::View)
                .map_err(|e| format_err(e.to_string()))
        }
        "family" => {
            let sets = body
                .as_array()
                .ok_or_else(|| format_err("family must be an array"))?;
            let mut fam = SetFamily::new();
            for s in sets {
                let members = s
                    .as_array()
                    .ok_or_else(|| format_err("family member must be an array"))?;
                let set: BTreeSet<Value> = members
                    .iter()
                    .map(value_from_json)
                    .collect::<Result<_, _>>()?;
                fam.insert(set);
            }
            Ok(Value::Family(fam))
        }
        other => Err(format_err(format!("unknown value tag {other:?}"))),
    }
}

/// Canonical JSON document of a complex. Facets appear in canonical order,
/// so equal complexes serialize to identical bytes.
pub fn complex_to_json(k: &Complex) -> Json {
    let facets: Vec<Json> = k
        .facets()
        .iter()
        .map(|f| {
            Json::Array(
                f.entries()
                    .iter()
                    .map(|v| json!([v.name.0, value_to_json(&v.value)]))
                    .collect(),
            )
        })
        .collect();
    json!({ "degree": k.degree(), "facets": facets })
}

/// Parses a complex document, validating it like [`super::make_complex`].
pub fn complex_from_json(j: &Json) -> Result<Complex, ComplexError> {
    let degree = j
        .get("degree")
        .and_then(Json::as_u64)
        .ok_or_else(|| format_err("missing integer field \"degree\""))? as usize;
    let facets = j
        .get("facets")
        .and_then(Json::as_array)
        .ok_or_else(|| format_err("missing array field \"facets\""))?;
    let mut out = Vec::with_capacity(facets.len());
    for f in facets {
        let entries = f
            .as_array()
            .ok_or_else(|| format_err("facet must be an array"))?;
        let mut vs = Vec::with_capacity(entries.len());
        for e in entries {
            let pair = e
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| format_err("facet entry must be [name, value]"))?;
            let name = pair[0]
                .as_i64()
                .and_then(|x| i32::try_from(x).ok())
                .ok_or_else(|| format_err("process name must be an integer"))?;
            vs.push(Vertex::new(ProcessName(name), value_from_json(&pair[1])?));
        }
        out.push(Facet::new(vs)?);
    }
    if degree == 1
        && out
            .iter()
            .any(|f| f.names().ne([ProcessName(0), ProcessName(1)]))
    {
        // skeletons keep arbitrary name pairs
        return Complex::from_facets(1, out);
    }
    super::make_complex(degree, out)
}

fn dot_id(v: &Vertex) -> String {
    let s = format!("{}:{}", v.name, v.value);
    serde_json::to_string(&s).expect("strings serialize")
}

/// DOT rendering of the 1-skeleton. Vertex ids are `"name:value"`.
pub fn skeleton_to_dot(k: &Complex) -> String {
    let sk = super::one_skeleton(k);
    let mut out = String::from("graph skeleton {\n");
    for v in sk.vertices() {
        let _ = writeln!(out, "  {};", dot_id(v));
    }
    for e in sk.facets() {
        let _ = writeln!(
            out,
            "  {} -- {};",
            dot_id(&e.entries()[0]),
            dot_id(&e.entries()[1])
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::make_complex;

    fn lab(s: &str) -> Value {
        Value::Label(Label::new(s).unwrap())
    }

    fn sample() -> Complex {
        let f = |a: &str, b: &str, c: &str| {
            Facet::from_values(2, vec![lab(a), lab(b), lab(c)]).unwrap()
        };
        make_complex(2, vec![f("0", "1", "0"), f("1", "0", "0")]).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let k = sample();
        let j = complex_to_json(&k);
        assert_eq!(complex_from_json(&j).unwrap(), k);
        assert_eq!(
            j.to_string(),
            r#"{"degree":2,"facets":[[[-1,{"label":"0"}],[0,{"label":"1"}],[1,{"label":"0"}]],[[-1,{"label":"1"}],[0,{"label":"0"}],[1,{"label":"0"}]]]}"#
        );
    }

    #[test]
    fn tagged_values_round_trip() {
        let view = Value::View(RingView::parse("(1:a)|(2:b)|(3:c)").unwrap());
        let mut fam = SetFamily::new();
        fam.insert([view.clone()].into());
        fam.insert(BTreeSet::new());
        let vals = [
            lab("x"),
            Value::IdLabel {
                id: 4,
                label: Label::new("y").unwrap(),
            },
            view,
            Value::Family(fam),
        ];
        for v in vals {
            assert_eq!(value_from_json(&value_to_json(&v)).unwrap(), v);
        }
        assert!(value_from_json(&json!({"id_label": [0, "a"]})).is_err());
        assert!(value_from_json(&json!({"colour": "a"})).is_err());
    }

    #[test]
    fn dot_output_is_stable() {
        let dot = skeleton_to_dot(&sample());
        assert!(dot.starts_with("graph skeleton {\n"));
        assert!(dot.contains("\"-1:0\" -- \"0:1\";"));
        assert_eq!(dot, skeleton_to_dot(&sample()));
    }
}
