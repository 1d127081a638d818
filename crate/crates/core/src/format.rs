//! Fixed-precision number formatting shared by CSV writers and reports.

/// Formats `x` as a plain decimal with `digits` significant digits (no exponent).
pub fn sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".to_string()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (0.0999999 -> 0.100000); re-format once.
    let rounded: f64 = s.parse().unwrap_or(x);
    let new_magnitude = rounded.abs().log10().floor() as i32;
    if rounded != 0.0 && new_magnitude != magnitude {
        let decimals = (digits as i32 - 1 - new_magnitude).max(0) as usize;
        return format!("{rounded:.decimals$}");
    }
    s
}

/// Rounds `x` to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every floating-point number in a JSON tree to `digits` significant digits.
pub fn round_json(value: &mut serde_json::Value, digits: usize) {
    match value {
        serde_json::Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(|f| round_sig(f, digits))
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(|v| round_json(v, digits)),
        serde_json::Value::Object(map) => map.values_mut().for_each(|v| round_json(v, digits)),
        _ => {}
    }
}
