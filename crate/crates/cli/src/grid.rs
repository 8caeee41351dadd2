//! Grid specifications: `v1,v2,...` or geometric `start:stop:count`.

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("geometric grid must be start:stop:count, got {spec:?}"));
        };
        let start = parse_number(start)?;
        let stop = parse_number(stop)?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("grid count must be a positive integer, got {count:?}"))?;
        if !(start > 0.0 && stop > 0.0) {
            return Err(format!(
                "geometric grid endpoints must be positive, got {start} and {stop}"
            ));
        }
        return match count {
            0 => Err("grid count must be at least 1".into()),
            1 if start == stop => Ok(vec![start]),
            1 => Err("a one-point geometric grid needs start == stop".into()),
            _ => {
                let ratio = (stop / start).ln() / (count - 1) as f64;
                let mut g: Vec<f64> = (0..count).map(|i| start * (ratio * i as f64).exp()).collect();
                g[count - 1] = stop;
                Ok(g)
            }
        };
    }
    spec.split(',').map(parse_number).collect()
}

fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("not a finite number: {s:?}")),
    }
}

/// `p1,p2;q1,q2` into points.
pub fn parse_points(spec: &str) -> Result<Vec<Vec<f64>>, String> {
    spec.split(';')
        .map(|p| p.split(',').map(parse_number).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_geometric_specs() {
        assert_eq!(parse_grid("1e3,1e4, 2").unwrap(), vec![1e3, 1e4, 2.0]);
        let g = parse_grid("1e3:1e6:4").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g[0], 1e3);
        assert_eq!(g[3], 1e6);
        assert!((g[1] - 1e4).abs() < 1e-9 && (g[2] - 1e5).abs() < 1e-8);
        assert_eq!(parse_grid("5:5:1").unwrap(), vec![5.0]);
        for bad in ["1,x", "1:2", "0:10:3", "1:10:0", "nan", "1:2:1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_points("0.3,0.2;0.5").unwrap(), vec![vec![0.3, 0.2], vec![0.5]]);
    }
}
