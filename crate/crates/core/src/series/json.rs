//! JSON documents for golden files:
//! `{ "valuation": v, "order": n, "coeffs": [ [ [[exp...], "num/den"], ... ] per t-power ] }`.

use serde_json::{json, Value};

use super::bseries::BSeries;
use super::lpoly::LPoly;
use super::rat::{fmt_rat, parse_rat};
use super::tseries::TSeries;
use crate::error::{Error, Result};

pub fn tseries_to_json(s: &TSeries) -> Value {
    let v = s.valuation();
    let hi = if s.is_exact() {
        s.iter().map(|(n, _)| n + 1).max().unwrap_or(v)
    } else {
        s.prec()
    };
    let coeffs: Vec<Value> = (v..hi)
        .map(|n| {
            Value::Array(
                s.coeff(n)
                    .terms()
                    .map(|(e, c)| json!([[e], fmt_rat(c)]))
                    .collect(),
            )
        })
        .collect();
    json!({ "valuation": v, "order": hi - v, "exact": s.is_exact(), "coeffs": coeffs })
}

pub fn tseries_from_json(doc: &Value) -> Result<TSeries> {
    let bad = |m: &str| Error::Parse(format!("series json: {m}"));
    let v = doc["valuation"].as_i64().ok_or_else(|| bad("valuation"))?;
    let layers = doc["coeffs"].as_array().ok_or_else(|| bad("coeffs"))?;
    let mut coeffs = Vec::with_capacity(layers.len());
    for layer in layers {
        let mut p = LPoly::zero();
        for term in layer.as_array().ok_or_else(|| bad("layer"))? {
            let e = term[0][0].as_i64().ok_or_else(|| bad("exponent"))?;
            let c = parse_rat(term[1].as_str().ok_or_else(|| bad("coefficient"))?)?;
            p.add_term(e, c);
        }
        coeffs.push(p);
    }
    let exact = doc["exact"].as_bool().unwrap_or(false);
    let prec = if exact { super::tseries::EXACT } else { v + coeffs.len() as i64 };
    Ok(TSeries::new(v, coeffs, prec))
}

pub fn bseries_to_json(s: &BSeries) -> Value {
    let coeffs: Vec<Value> = (0..s.order())
        .map(|n| {
            Value::Array(
                s.layer(n)
                    .iter()
                    .map(|((i, j), c)| json!([[i, j], fmt_rat(c)]))
                    .collect(),
            )
        })
        .collect();
    json!({ "valuation": 0, "order": s.order(), "coeffs": coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat::rat;

    #[test]
    fn series_document_shape() {
        let s = TSeries::poly(&[(1, -1, rat(1, 2)), (2, 3, rat(-3, 1))]).truncate(4);
        let doc = tseries_to_json(&s);
        assert_eq!(doc["valuation"], 1);
        assert_eq!(doc["coeffs"][0][0], json!([[-1], "1/2"]));
        assert_eq!(doc["coeffs"][1][0], json!([[3], "-3/1"]));
        assert_eq!(tseries_from_json(&doc).unwrap(), s);
    }
}
