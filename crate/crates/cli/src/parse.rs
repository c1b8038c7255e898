//! Parsers for complex scalars, polynomials and matrix triples given on the command line.

use serde::Deserialize;
use tetra_core::{ComplexMatrix, Poly3, C64};

/// Parses `"re"`, `"re+imi"`, `"re-imi"`, `"imi"`, `"i"`, `"-i"`.
pub fn complex(s: &str) -> Result<C64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex number {s:?}; expected e.g. 0.2, -1e-3, 0.1+0.3i");
    if s.is_empty() {
        return Err(bad());
    }
    let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => t.parse::<f64>().map_err(|_| bad()),
    };
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        let re = real(&s)?;
        return finite(C64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let z = match split {
        Some(k) => C64::new(real(&body[..k])?, imag(&body[k..])?),
        None => C64::new(0.0, imag(body)?),
    };
    finite(z).ok_or_else(bad)
}

fn finite(z: C64) -> Option<C64> {
    z.is_finite().then_some(z)
}

/// Parses `"coef:i,j,k;coef:i,j,k;..."`, e.g. `"1:1,0,0;0.5-2i:0,1,2"`.
pub fn polynomial(s: &str) -> Result<Poly3, String> {
    let mut terms = Vec::new();
    for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (coef, exp) = term
            .split_once(':')
            .ok_or_else(|| format!("term {term:?} must look like coef:i,j,k"))?;
        let exp: Vec<u32> = exp
            .split(',')
            .map(|e| e.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("bad exponents in term {term:?}"))?;
        let exp: [u32; 3] = exp
            .try_into()
            .map_err(|_| format!("term {term:?} needs exactly three exponents"))?;
        terms.push((exp, complex(coef)?));
    }
    Poly3::from_terms(terms).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct TripleJson {
    t1: ComplexMatrix,
    t2: ComplexMatrix,
    t3: ComplexMatrix,
}

/// `{"t1": M, "t2": M, "t3": M}` with matrices as nested `[re, im]` rows, given inline or
/// as a file path.
pub fn triple(s: &str) -> Result<[ComplexMatrix; 3], String> {
    let text = if s.trim_start().starts_with('{') {
        s.to_owned()
    } else {
        std::fs::read_to_string(s).map_err(|e| format!("cannot read triple file {s:?}: {e}"))?
    };
    let t: TripleJson =
        serde_json::from_str(&text).map_err(|e| format!("invalid triple JSON: {e}"))?;
    Ok([t.t1, t.t2, t.t3])
}

/// A matrix as nested `[re, im]` rows, inline or as a file path.
pub fn matrix(s: &str) -> Result<ComplexMatrix, String> {
    let text = if s.trim_start().starts_with('[') {
        s.to_owned()
    } else {
        std::fs::read_to_string(s).map_err(|e| format!("cannot read matrix file {s:?}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("invalid matrix JSON: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("0.2").unwrap(), C64::new(0.2, 0.0));
        assert_eq!(complex("-1e-3").unwrap(), C64::new(-1e-3, 0.0));
        assert_eq!(complex("0.1+0.3i").unwrap(), C64::new(0.1, 0.3));
        assert_eq!(complex("0.1-0.3i").unwrap(), C64::new(0.1, -0.3));
        assert_eq!(complex("-2e-1-3e-2i").unwrap(), C64::new(-0.2, -0.03));
        assert_eq!(complex("1e+2+1i").unwrap(), C64::new(100.0, 1.0));
        assert_eq!(complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(complex("0.5i").unwrap(), C64::new(0.0, 0.5));
        assert_eq!(complex("1-i").unwrap(), C64::new(1.0, -1.0));
        for bad in ["", "abc", "1+2", "1+2k", "nan", "inf", "1++2i"] {
            assert!(complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn polynomial_forms() {
        let p = polynomial("1:1,0,0; 0.5-2i:0,1,2").unwrap();
        assert_eq!(p.coefficient([1, 0, 0]), C64::new(1.0, 0.0));
        assert_eq!(p.coefficient([0, 1, 2]), C64::new(0.5, -2.0));
        assert!(polynomial("1:1,0").is_err());
        assert!(polynomial("1;1,0,0").is_err());
        assert!(polynomial("").unwrap().is_zero());
    }

    #[test]
    fn triple_json() {
        let s = r#"{"t1": [[[0,0],[0.2,0]],[[0,0],[0,0]]],
                    "t2": [[[0,0],[0.1,0]],[[0,0],[0,0]]],
                    "t3": [[[0,0],[0.15,0]],[[0,0],[0,0]]]}"#;
        let [t1, _, t3] = triple(s).unwrap();
        assert_eq!(t1[(0, 1)], C64::new(0.2, 0.0));
        assert_eq!(t3[(0, 1)], C64::new(0.15, 0.0));
        assert!(triple("{\"t1\": 3}").is_err());
    }
}
