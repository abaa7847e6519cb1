/// Parses a comma-separated SNR list where each item is either a value or an
/// inclusive `start:step:stop` range, e.g. `0,5:5:20` → 0, 5, 10, 15, 20.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(format!("empty entry in SNR list `{s}`"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_num(v)?),
            [start, step, stop] => {
                let (start, step, stop) = (parse_num(start)?, parse_num(step)?, parse_num(stop)?);
                if step == 0.0 || (stop - start) * step < 0.0 {
                    return Err(format!("range `{item}` does not reach its stop value"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 100_000 {
                    return Err(format!("range `{item}` expands to too many values"));
                }
                out.extend((0..count).map(|i| start + i as f64 * step));
            }
            _ => return Err(format!("malformed SNR entry `{item}`")),
        }
    }
    Ok(out)
}

fn parse_num(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}
