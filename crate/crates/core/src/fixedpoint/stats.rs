use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::qllr::{QLlr, QWidth};
use crate::construct::Side;
use crate::error::{param, Error, Result};

/// A tree edge: the `side` child of the Branch node covering
/// `[offset, offset + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey {
    pub offset: usize,
    pub len: usize,
    pub side: Side,
}

impl EdgeKey {
    pub fn new(offset: usize, len: usize, side: Side) -> Self {
        Self { offset, len, side }
    }

    /// Segment of the child node the edge leads to.
    pub fn child_segment(&self) -> (usize, usize) {
        let half = self.len / 2;
        match self.side {
            Side::F => (self.offset, half),
            Side::G => (self.offset + half, half),
        }
    }
}

/// Magnitude histogram of LLRs at one point of the decoder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(width: QWidth) -> Self {
        Self {
            counts: vec![0; width.max_mag() as usize + 1],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn saturation_rate(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            0.0
        } else {
            *self.counts.last().unwrap() as f64 / t as f64
        }
    }

    /// Shannon entropy (bits) of the magnitude after dropping `shift` LSBs.
    pub fn entropy(&self, shift: u32) -> f64 {
        let mut merged: BTreeMap<usize, u64> = BTreeMap::new();
        for (m, &c) in self.counts.iter().enumerate() {
            *merged.entry(m >> shift).or_default() += c;
        }
        let t = self.total() as f64;
        if t == 0.0 {
            return 0.0;
        }
        merged
            .values()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / t;
                -p * p.log2()
            })
            .sum()
    }

    fn record(&mut self, values: &[QLlr]) {
        for v in values {
            self.counts[v.mag() as usize] += 1;
        }
    }

    fn merge(&mut self, o: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
    }
}

/// Per-edge LLR magnitude statistics gathered by an instrumented decoder
/// running at a uniform width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrStats {
    pub width: QWidth,
    pub block_len: usize,
    pub frames: u64,
    /// Channel LLRs entering the root.
    pub root: Histogram,
    pub edges: BTreeMap<EdgeKey, Histogram>,
}

impl LlrStats {
    pub fn new(block_len: usize, width: QWidth) -> Self {
        Self {
            width,
            block_len,
            frames: 0,
            root: Histogram::new(width),
            edges: BTreeMap::new(),
        }
    }

    pub fn record_root(&mut self, values: &[QLlr]) {
        self.root.record(values);
    }

    pub fn record_edge(&mut self, edge: EdgeKey, values: &[QLlr]) {
        let width = self.width;
        self.edges
            .entry(edge)
            .or_insert_with(|| Histogram::new(width))
            .record(values);
    }

    /// Associative merge of partial statistics.
    pub fn merge(&mut self, o: &LlrStats) -> Result<()> {
        if o.width != self.width || o.block_len != self.block_len {
            return Err(param("cannot merge statistics of different shape"));
        }
        self.frames += o.frames;
        self.root.merge(&o.root);
        for (k, h) in &o.edges {
            match self.edges.get_mut(k) {
                Some(mine) => mine.merge(h),
                None => {
                    self.edges.insert(*k, h.clone());
                }
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> u64 {
        self.root.total() + self.edges.values().map(Histogram::total).sum::<u64>()
    }

    /// Long-format CSV: `offset,len,side,mag,count`; the root row uses side `in`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# width={} block_len={} frames={}",
            self.width, self.block_len, self.frames
        );
        s.push_str("offset,len,side,mag,count\n");
        for (m, c) in self.root.counts.iter().enumerate() {
            let _ = writeln!(s, "0,{},in,{},{}", self.block_len, m, c);
        }
        for (k, h) in &self.edges {
            for (m, c) in h.counts.iter().enumerate() {
                let _ = writeln!(s, "{},{},{},{},{}", k.offset, k.len, k.side.as_str(), m, c);
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let mut lines = text.lines().enumerate();
        let (_, meta) = lines.next().ok_or(perr(0, "empty".into()))?;
        let mut width = None;
        let mut block_len = None;
        let mut frames = 0;
        for kv in meta.trim_start_matches('#').split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or(perr(0, format!("bad field {kv:?}")))?;
            let num: u64 = v.parse().map_err(|e| perr(0, format!("{k}: {e}")))?;
            match k {
                "width" => width = Some(QWidth::new(num as u8)?),
                "block_len" => block_len = Some(num as usize),
                "frames" => frames = num,
                _ => return Err(perr(0, format!("unknown field {k}"))),
            }
        }
        let (width, block_len) = match (width, block_len) {
            (Some(w), Some(b)) => (w, b),
            _ => return Err(perr(0, "missing width or block_len".into())),
        };
        let mut st = Self::new(block_len, width);
        st.frames = frames;
        for (ln, line) in lines {
            if line.starts_with("offset") || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(perr(ln, format!("expected 5 fields, got {}", f.len())));
            }
            let num =
                |i: usize| -> Result<u64> { f[i].trim().parse().map_err(|e| perr(ln, format!("field {i}: {e}"))) };
            let (offset, len, mag, count) = (num(0)? as usize, num(1)? as usize, num(3)? as usize, num(4)?);
            if mag > width.max_mag() as usize {
                return Err(perr(ln, format!("magnitude {mag} out of range")));
            }
            let hist = match f[2].trim() {
                "in" => &mut st.root,
                s => {
                    let side = match s {
                        "F" => Side::F,
                        "G" => Side::G,
                        _ => return Err(perr(ln, format!("bad side {s:?}"))),
                    };
                    st.edges
                        .entry(EdgeKey::new(offset, len, side))
                        .or_insert_with(|| Histogram::new(width))
                }
            };
            hist.counts[mag] += count;
        }
        Ok(st)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w5() -> QWidth {
        QWidth::new(5).unwrap()
    }

    #[test]
    fn entropy_of_degenerate_and_uniform() {
        let mut h = Histogram::new(w5());
        h.counts[15] = 100;
        assert_eq!(h.entropy(0), 0.0);
        let h = Histogram { counts: vec![1; 16] };
        assert!((h.entropy(0) - 4.0).abs() < 1e-12);
        assert!((h.entropy(1) - 3.0).abs() < 1e-12);
        assert!((h.entropy(4) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn merge_is_additive() {
        let mut a = LlrStats::new(4, w5());
        let mut b = LlrStats::new(4, w5());
        let vals: Vec<QLlr> = [1, -3, 15, 0]
            .iter()
            .map(|&v| QLlr::from_value(v, w5()).unwrap())
            .collect();
        a.record_root(&vals);
        a.frames = 1;
        b.record_edge(EdgeKey::new(0, 4, Side::F), &vals[..2]);
        b.frames = 2;
        a.merge(&b).unwrap();
        assert_eq!(a.frames, 3);
        assert_eq!(a.samples(), 6);
        assert!(a.merge(&LlrStats::new(8, w5())).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut a = LlrStats::new(4, w5());
        let vals: Vec<QLlr> = [2, -3, 15, 0]
            .iter()
            .map(|&v| QLlr::from_value(v, w5()).unwrap())
            .collect();
        a.record_root(&vals);
        a.record_edge(EdgeKey::new(0, 4, Side::G), &vals[1..]);
        a.frames = 7;
        assert_eq!(LlrStats::from_csv(&a.to_csv()).unwrap(), a);
    }
}
