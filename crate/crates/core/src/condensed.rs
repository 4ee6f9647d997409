//! Labelled symmetric matrices stored as a flat upper triangle, plus the text
//! formats used to exchange them (full square CSV and PHYLIP square matrix).

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Row-major index of pair `(i, j)`, `i < j`, in a condensed upper triangle of order `n`.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Number of off-diagonal pairs, `n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Symmetric `n x n` matrix with an implied default diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Condensed<T> {
    labels: Vec<String>,
    values: Vec<T>,
}

impl<T: Copy + Default> Condensed<T> {
    pub fn new(labels: Vec<String>, values: Vec<T>) -> Result<Self> {
        if values.len() != pair_count(labels.len()) {
            return Err(Error::InvalidInput(format!(
                "{} labels need {} pair entries, got {}",
                labels.len(),
                pair_count(labels.len()),
                values.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::InvalidInput(format!("duplicate label `{label}`")));
            }
        }
        Ok(Condensed { labels, values })
    }

    /// Fills every pair `i < j` from `f(i, j)`, in row-major order.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let n = labels.len();
        let mut values = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                values.push(f(i, j));
            }
        }
        Condensed::new(labels, values)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => T::default(),
            Less => self.values[pair_index(self.order(), i, j)],
            Greater => self.values[pair_index(self.order(), j, i)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        assert_ne!(i, j, "diagonal is implied");
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let idx = pair_index(self.order(), i, j);
        self.values[idx] = value;
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Value between two labelled rows.
    pub fn lookup(&self, a: &str, b: &str) -> Result<T> {
        let i = self
            .index_of(a)
            .ok_or_else(|| Error::UnknownLabel(a.to_owned()))?;
        let j = self
            .index_of(b)
            .ok_or_else(|| Error::UnknownLabel(b.to_owned()))?;
        Ok(self.get(i, j))
    }

    /// `(i, j, value)` for every `i < j` in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.order();
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.values.iter().copied())
            .map(|((i, j), v)| (i, j, v))
    }

    pub fn map<U: Copy + Default>(&self, f: impl FnMut(T) -> U) -> Condensed<U> {
        Condensed {
            labels: self.labels.clone(),
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    /// Reorders rows so that row `k` of the result is row `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        Condensed::from_fn(labels, |i, j| self.get(perm[i], perm[j]))
    }

    /// Full square CSV: header `label,<l1>,...,<lN>` then one row per label.
    pub fn to_csv_with(&self, fmt: impl Fn(T) -> String) -> String {
        let n = self.order();
        let mut out = String::from("label");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for i in 0..n {
            out.push_str(&self.labels[i]);
            for j in 0..n {
                out.push(',');
                out.push_str(&fmt(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

impl Condensed<f64> {
    /// Square CSV with six fixed decimals.
    pub fn to_csv(&self) -> String {
        self.to_csv_with(|v| format!("{v:.6}"))
    }

    /// PHYLIP square matrix: order on the first line, then each label padded or
    /// truncated to 10 characters followed by its row.
    pub fn to_phylip(&self) -> String {
        let n = self.order();
        let mut out = format!("{n}\n");
        for i in 0..n {
            let name: String = self.labels[i].chars().take(10).collect();
            let pad = 10 - name.chars().count();
            out.push_str(&name);
            out.extend(std::iter::repeat_n(' ', pad));
            for j in 0..n {
                let _ = write!(out, " {:.6}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    /// Parses a square CSV as written by [`Condensed::to_csv`].
    ///
    /// The matrix must be symmetric with a zero diagonal; symmetric cells are
    /// compared after parsing.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty matrix file".into(),
        })?;
        let mut head = header.split(',');
        if head.next() != Some("label") {
            return Err(Error::Parse {
                line: 1,
                message: "header must start with `label`".into(),
            });
        }
        let labels: Vec<String> = head.map(str::to_owned).collect();
        let n = labels.len();
        let mut full = vec![0.0f64; n * n];
        let mut rows = 0;
        for (idx, line) in lines {
            let line_no = idx + 1;
            if rows == n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("more than {n} data rows"),
                });
            }
            let mut cells = line.split(',');
            let label = cells.next().unwrap_or_default();
            if label != labels[rows] {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("row label `{label}` does not match header `{}`", labels[rows]),
                });
            }
            let values: Vec<&str> = cells.collect();
            if values.len() != n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {n} values, found {}", values.len()),
                });
            }
            for (j, cell) in values.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("`{cell}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("non-finite value `{cell}`"),
                    });
                }
                full[rows * n + j] = v;
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse {
                line: rows + 2,
                message: format!("expected {n} data rows, found {rows}"),
            });
        }
        for i in 0..n {
            if full[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry for `{}` is not zero",
                    labels[i]
                )));
            }
            for j in i + 1..n {
                if full[i * n + j] != full[j * n + i] {
                    return Err(Error::InvalidInput(format!(
                        "matrix not symmetric at `{}`/`{}`",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Condensed::from_fn(labels, |i, j| full[i * n + j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("l{i}")).collect()
    }

    #[test]
    fn pair_index_is_row_major_and_dense() {
        for n in 2..12 {
            let mut expected = 0;
            for i in 0..n {
                for j in i + 1..n {
                    assert_eq!(pair_index(n, i, j), expected);
                    expected += 1;
                }
            }
            assert_eq!(expected, pair_count(n));
        }
        assert_eq!(pair_count(23), 253);
    }

    #[test]
    fn get_is_symmetric_with_zero_diagonal() {
        let m = Condensed::from_fn(labels(4), |i, j| (10 * i + j) as f64).unwrap();
        for i in 0..4 {
            assert_eq!(m.get(i, i), 0.0);
            for j in 0..4 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        assert_eq!(m.get(3, 1), 13.0);
    }

    #[test]
    fn wrong_entry_count_rejected() {
        assert!(Condensed::new(labels(3), vec![1.0, 2.0]).is_err());
        assert!(Condensed::new(vec!["a".into(), "a".into()], vec![1.0]).is_err());
    }

    #[test]
    fn csv_layout_and_parse_back() {
        let m = Condensed::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.5, 0.25, 0.125],
        )
        .unwrap();
        let csv = m.to_csv();
        assert_eq!(
            csv,
            "label,a,b,c\na,0.000000,0.500000,0.250000\nb,0.500000,0.000000,0.125000\nc,0.250000,0.125000,0.000000\n"
        );
        assert_eq!(Condensed::from_csv(&csv).unwrap(), m);
    }

    #[test]
    fn csv_parse_errors() {
        assert!(Condensed::from_csv("").is_err());
        assert!(Condensed::from_csv("lbl,a,b\n").is_err());
        let asym = "label,a,b\na,0,0.5\nb,0.4,0\n";
        assert!(matches!(Condensed::from_csv(asym), Err(Error::InvalidInput(_))));
        let short = "label,a,b\na,0,0.5\n";
        assert!(Condensed::from_csv(short).is_err());
        let bad = "label,a,b\na,0,x\nb,x,0\n";
        assert!(matches!(Condensed::from_csv(bad), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn phylip_pads_and_truncates_labels() {
        let m = Condensed::new(vec!["ab".into(), "antananarivo".into()], vec![0.5]).unwrap();
        assert_eq!(
            m.to_phylip(),
            "2\nab         0.000000 0.500000\nantananari 0.500000 0.000000\n"
        );
    }
}
