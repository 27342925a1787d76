use std::fmt;

use super::WeightModel;
use crate::error::{Error, Result};

/// Longest length accepted by [`enumerate_paths`].
pub const MAX_ENUMERATION_LENGTH: usize = 14;

/// A Motzkin path given by its altitudes `γ_0, ..., γ_L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotzkinPath {
    altitudes: Vec<usize>,
}

impl MotzkinPath {
    pub fn new(altitudes: Vec<usize>) -> Result<Self> {
        if altitudes.is_empty() {
            return Err(Error::invalid("a path has at least one altitude"));
        }
        for (k, w) in altitudes.windows(2).enumerate() {
            if w[0].abs_diff(w[1]) > 1 {
                return Err(Error::invalid(format!(
                    "step {} goes from {} to {}",
                    k + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(MotzkinPath { altitudes })
    }

    pub fn altitudes(&self) -> &[usize] {
        &self.altitudes
    }

    /// Number of steps `L`.
    pub fn len(&self) -> usize {
        self.altitudes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> usize {
        self.altitudes[0]
    }

    pub fn end(&self) -> usize {
        *self.altitudes.last().expect("nonempty")
    }

    /// Steps as `-1`, `0` or `+1`.
    pub fn steps(&self) -> impl Iterator<Item = i8> + '_ {
        self.altitudes
            .windows(2)
            .map(|w| (w[1] as i64 - w[0] as i64) as i8)
    }

    pub fn into_altitudes(self) -> Vec<usize> {
        self.altitudes
    }
}

impl fmt::Display for MotzkinPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.altitudes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Number of flat steps `H(γ)`.
pub fn horizontal_count(path: &MotzkinPath) -> usize {
    path.steps().filter(|&s| s == 0).count()
}

/// Product over steps of `a`, `b` or `c` at the left altitude.
pub fn path_weight(path: &MotzkinPath, model: &WeightModel) -> f64 {
    path.altitudes
        .windows(2)
        .map(|w| match w[1] as i64 - w[0] as i64 {
            1 => model.up(w[0]),
            0 => model.flat(w[0]),
            _ => model.down(w[0]),
        })
        .product()
}

/// All paths of length `l` from altitude `m` to altitude `n`, in
/// lexicographic order of their altitude sequences.
pub fn enumerate_paths(l: usize, m: usize, n: usize) -> Result<Vec<MotzkinPath>> {
    if l > MAX_ENUMERATION_LENGTH {
        return Err(Error::SizeGuard(format!(
            "enumeration length {l} exceeds {MAX_ENUMERATION_LENGTH}"
        )));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(l + 1);
    cur.push(m);
    extend(l, n, &mut cur, &mut out);
    Ok(out)
}

fn extend(l: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<MotzkinPath>) {
    let here = *cur.last().expect("nonempty");
    let left = l + 1 - cur.len();
    if here.abs_diff(n) > left {
        return;
    }
    if left == 0 {
        out.push(MotzkinPath {
            altitudes: cur.clone(),
        });
        return;
    }
    let lo = here.saturating_sub(1);
    for next in lo..=here + 1 {
        cur.push(next);
        extend(l, n, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ascpoly::QModelParams;
    use crate::qspecial::q_number;
    use approx::assert_relative_eq;

    #[test]
    fn validation() {
        assert!(MotzkinPath::new(vec![]).is_err());
        assert!(MotzkinPath::new(vec![0, 2]).is_err());
        let p = MotzkinPath::new(vec![0, 1, 1, 0]).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(horizontal_count(&p), 1);
        assert_eq!(p.to_string(), "0,1,1,0");
    }

    #[test]
    fn motzkin_numbers() {
        let counts: Vec<usize> = (0..8).map(|l| enumerate_paths(l, 0, 0).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 21, 51, 127]);
        assert_eq!(
            enumerate_paths(1, 0, 0).unwrap(),
            vec![MotzkinPath::new(vec![0, 0]).unwrap()]
        );
        assert!(enumerate_paths(15, 0, 0).is_err());
    }

    #[test]
    fn descending_with_one_flat() {
        let got: Vec<Vec<usize>> = enumerate_paths(3, 2, 0)
            .unwrap()
            .into_iter()
            .map(MotzkinPath::into_altitudes)
            .collect();
        assert_eq!(got, vec![vec![2, 1, 0, 0], vec![2, 1, 1, 0], vec![2, 2, 1, 0]]);
    }

    #[test]
    fn weights_of_small_paths() {
        let qm = QModelParams::new(0.4, 0.7, 0.2, 0.2).unwrap();
        let m = WeightModel::q_model(qm);
        let q = qm.q();
        let flat = MotzkinPath::new(vec![0, 0, 0]).unwrap();
        assert_relative_eq!(path_weight(&flat, &m), (1.4f64).powi(2), max_relative = 1e-15);
        let ud = MotzkinPath::new(vec![0, 1, 0]).unwrap();
        assert_relative_eq!(path_weight(&ud, &m), q_number(2, q), max_relative = 1e-15);

        let fig = MotzkinPath::new(vec![2, 1, 1, 0, 1, 1, 2, 1, 0, 1]).unwrap();
        let want = m.flat(1).powi(2) * m.up(0).powi(2) * m.up(1) * m.down(1).powi(2) * m.down(2).powi(2);
        assert_relative_eq!(path_weight(&fig, &m), want, max_relative = 1e-14);
        // (2σ)^H Π [γ_k + 1]_q
        let alt = fig.altitudes();
        let closed = 1.4f64.powi(horizontal_count(&fig) as i32)
            * alt[1..].iter().map(|&g| q_number(g + 1, q)).product::<f64>();
        assert_relative_eq!(path_weight(&fig, &m), closed, max_relative = 1e-14);
    }
}
