use serde_json::{json, Value};

use jetalg::syntax::format_rational;
use jetalg::{print, DiffPoly};

/// `{"text": ..., "terms": [{"coefficient": "p/q", "factors": [{"atom", "exponent"}]}]}`.
pub fn poly(p: &DiffPoly) -> Value {
    let terms: Vec<Value> = p
        .iter()
        .map(|(m, c)| {
            let factors: Vec<Value> = m
                .factors()
                .iter()
                .map(|(a, e)| json!({"atom": a.to_string(), "exponent": e}))
                .collect();
            json!({"coefficient": format_rational(c), "factors": factors})
        })
        .collect();
    json!({"text": print(p), "terms": terms})
}

pub fn document(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_keep_exact_coefficients() {
        let v = poly(&jetalg::parse("-3/4*u^4 + u_x").unwrap());
        assert_eq!(v["text"], "u_x - 3/4*u^4");
        assert_eq!(v["terms"][1]["coefficient"], "-3/4");
        assert_eq!(v["terms"][1]["factors"][0]["atom"], "u");
        assert_eq!(v["terms"][1]["factors"][0]["exponent"], 4);
    }
}
