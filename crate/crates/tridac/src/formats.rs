//! Text dumps of edge configurations, spin configurations and DaC samples.
//!
//! Edge configurations are one line each: run lengths of alternating closed
//! and open edges in box edge order, starting with a (possibly empty) closed
//! run, e.g. `12 3 5` for 12 closed, 3 open, 5 closed. Spin dumps print one
//! row per `l`, top row first, `+` and `-` per vertex in `k` order.

use std::collections::BTreeMap;
use std::str::FromStr;

use tridac_core::dac::{DacSample, SpinConfig};
use tridac_core::lattice::Parallelogram;
use tridac_core::rcm::EdgeConfig;

use crate::error::{Error, Result};
use crate::output::fmt17;

pub fn rle_encode(eta: &EdgeConfig) -> String {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u64;
    for bit in eta.iter() {
        if bit == current {
            len += 1;
        } else {
            runs.push(len);
            current = bit;
            len = 1;
        }
    }
    runs.push(len);
    runs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn rle_decode(line: &str, len: usize) -> Result<EdgeConfig> {
    let mut bits = Vec::with_capacity(len);
    let mut open = false;
    for tok in line.split_whitespace() {
        let n: usize = tok.parse().map_err(|_| Error::Config(format!("bad run length {tok:?}")))?;
        bits.extend(std::iter::repeat_n(open, n));
        open = !open;
    }
    if bits.len() != len {
        return Err(Error::Config(format!("run lengths cover {} edges, expected {len}", bits.len())));
    }
    Ok(EdgeConfig::from_bools(&bits))
}

/// Header fields of an edge dump.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeHeader {
    pub region: Parallelogram,
    pub beta: f64,
    pub seed: u64,
    pub burn_in: u32,
    pub thin: u32,
    pub edges: usize,
}

impl EdgeHeader {
    fn line(&self) -> String {
        format!(
            "# box {} beta={} seed={} burn_in={} thin={} edges={}\n",
            self.region,
            fmt17(self.beta),
            self.seed,
            self.burn_in,
            self.thin,
            self.edges
        )
    }
}

pub fn write_edge_dump(header: &EdgeHeader, configs: &[EdgeConfig]) -> String {
    let mut s = String::from("# tridac edge-config\n");
    s.push_str(&header.line());
    for eta in configs {
        s.push_str(&rle_encode(eta));
        s.push('\n');
    }
    s
}

fn fields(line: &str) -> BTreeMap<&str, &str> {
    line.split_whitespace().filter_map(|t| t.split_once('=')).collect()
}

fn field<T: FromStr>(map: &BTreeMap<&str, &str>, key: &str) -> Result<T> {
    map.get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Config(format!("dump header: missing or bad {key}")))
}

fn parse_box(line: &str) -> Result<Parallelogram> {
    let tok = line
        .split_whitespace()
        .nth(2)
        .ok_or_else(|| Error::Config("dump header: missing box".into()))?;
    Ok(tok.parse()?)
}

pub fn read_edge_dump(text: &str) -> Result<(EdgeHeader, Vec<EdgeConfig>)> {
    let mut lines = text.lines();
    if lines.next() != Some("# tridac edge-config") {
        return Err(Error::Config("not an edge dump".into()));
    }
    let h = lines.next().ok_or_else(|| Error::Config("dump header: missing".into()))?;
    let f = fields(h);
    let header = EdgeHeader {
        region: parse_box(h)?,
        beta: field(&f, "beta")?,
        seed: field(&f, "seed")?,
        burn_in: field(&f, "burn_in")?,
        thin: field(&f, "thin")?,
        edges: field(&f, "edges")?,
    };
    let configs = lines
        .take_while(|l| !l.starts_with('#'))
        .map(|l| rle_decode(l, header.edges))
        .collect::<Result<_>>()?;
    Ok((header, configs))
}

pub fn write_spin_dump(sigma: &SpinConfig, r: f64) -> String {
    let g = sigma.region();
    let mut s = format!("# tridac spin-config\n# box {g} r={}\n", fmt17(r));
    for l in (g.c..=g.d).rev() {
        for k in g.a..=g.b {
            s.push(if sigma.is_plus(tridac_core::lattice::Vertex::new(k, l)) { '+' } else { '-' });
        }
        s.push('\n');
    }
    s
}

pub fn read_spin_dump(text: &str) -> Result<SpinConfig> {
    let mut lines = text.lines();
    if lines.next() != Some("# tridac spin-config") {
        return Err(Error::Config("not a spin dump".into()));
    }
    let region = parse_box(lines.next().unwrap_or_default())?;
    let rows: Vec<&str> = lines.collect();
    if rows.len() != (region.d - region.c + 1) as usize || rows.iter().any(|r| r.len() != (region.b - region.a + 1) as usize) {
        return Err(Error::Config("spin dump: rows do not match the box".into()));
    }
    Ok(SpinConfig::from_fn(region, |v| rows[(region.d - v.l) as usize].as_bytes()[(v.k - region.a) as usize] == b'+'))
}

/// Edge dump of one sample followed by its cluster-mark table
/// (`canonical id, mark` per line).
pub fn write_dac_dump(header: &EdgeHeader, sample: &DacSample) -> String {
    let mut s = write_edge_dump(header, std::slice::from_ref(&sample.eta));
    s.push_str(&format!("# marks sample_id={} clusters={}\n", sample.sample_id, sample.marks.len()));
    for (id, mark) in sample.clusters.canonical_ids().iter().zip(&sample.marks) {
        s.push_str(&format!("{id} {}\n", fmt17(*mark)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use tridac_core::lattice::BoxLattice;

    #[test]
    fn rle_round_trip_and_shape() {
        let bits = [false, false, true, true, true, false];
        let eta = EdgeConfig::from_bools(&bits);
        assert_eq!(rle_encode(&eta), "2 3 1");
        assert_eq!(rle_decode("2 3 1", 6).unwrap(), eta);
        let open = EdgeConfig::from_bools(&[true, true]);
        assert_eq!(rle_encode(&open), "0 2");
        assert_eq!(rle_encode(&EdgeConfig::closed(7)), "7");
        assert!(rle_decode("2 3", 6).is_err());
    }

    #[test]
    fn edge_dump_round_trip() {
        let region = Parallelogram::square(3);
        let lat = BoxLattice::new(region);
        let header = EdgeHeader { region, beta: 0.3, seed: 9, burn_in: 200, thin: 10, edges: lat.n_edges() };
        let configs: Vec<EdgeConfig> =
            (0..3).map(|i| EdgeConfig::from_bools(&(0..lat.n_edges()).map(|e| (e * 7 + i) % 3 == 0).collect::<Vec<_>>())).collect();
        let text = write_edge_dump(&header, &configs);
        let (h, c) = read_edge_dump(&text).unwrap();
        assert_eq!(h, header);
        assert_eq!(c, configs);
    }

    #[test]
    fn spin_dump_round_trip() {
        let region = Parallelogram::new(-1, 2, 0, 1).unwrap();
        let sigma = SpinConfig::from_fn(region, |v| (v.k + 2 * v.l) % 3 == 0);
        let text = write_spin_dump(&sigma, 0.5);
        assert!(text.lines().nth(2).unwrap().len() == 4);
        assert_eq!(read_spin_dump(&text).unwrap(), sigma);
    }
}
