use serde_json::{Number, Value};

/// `x` rounded to 15 significant digits.
pub fn round_f64(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap()
}

pub fn sig(x: f64) -> String {
    if x.is_finite() {
        let r = round_f64(x);
        if r != 0.0 && (r.abs() < 1e-5 || r.abs() >= 1e16) {
            format!("{r:e}")
        } else {
            r.to_string()
        }
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn round(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            Number::from_f64(round_f64(n.as_f64().unwrap())).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.iter().map(round).collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), round(v))).collect()),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(sig(0.1 + 0.2), "0.3");
        assert_eq!(sig(2.367_604_543_724_308), "2.36760454372431");
        assert_eq!(sig(-1.5e-300), "-1.5e-300");
        assert_eq!(sig(f64::NEG_INFINITY), "-inf");
    }
}
