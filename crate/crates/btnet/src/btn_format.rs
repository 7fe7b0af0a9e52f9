//! The `.btn` text format.
//!
//! ```text
//! BTN v1
//! depth 2
//! dims 2 2 1
//! layer 1
//! 11
//! 11
//! b: 0 2
//! g: 1 -1
//! layer 2
//! 11
//! b: -1
//! g: 1
//! ```
//!
//! Row characters are `0`, `1` and, in a ternary first layer, `-` for −1.
//! Lines starting with `#` and blank lines are ignored. Biases outside the
//! standard range but inside the widened one mark the network as wide-bias.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{bias_range, Layer, Network};

pub fn to_btn_string(net: &Network) -> String {
    let mut s = String::new();
    s.push_str("BTN v1\n");
    let _ = writeln!(s, "depth {}", net.depth());
    let dims: Vec<String> = net.dims().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "dims {}", dims.join(" "));
    for (l, layer) in net.layers().iter().enumerate() {
        let _ = writeln!(s, "layer {}", l + 1);
        for i in 0..layer.outputs() {
            for j in 0..layer.inputs() {
                s.push(match layer.weight(i, j) {
                    1 => '1',
                    -1 => '-',
                    _ => '0',
                });
            }
            s.push('\n');
        }
        let b: Vec<String> = layer.biases().iter().map(|v| v.to_string()).collect();
        let g: Vec<String> = layer.scales().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "b: {}", b.join(" "));
        let _ = writeln!(s, "g: {}", g.join(" "));
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok((i + 1, t));
            }
        }
        Err(Error::Parse {
            line: 0,
            msg: "unexpected end of file".into(),
        })
    }

    fn rest_is_empty(&mut self) -> Option<usize> {
        self.next().ok().map(|(n, _)| n)
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn keyed<'a>(line: (usize, &'a str), key: &str) -> Result<&'a str> {
    line.1
        .strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| err(line.0, format!("expected `{key}`")))
}

fn ints<T: std::str::FromStr>(line: usize, s: &str, count: usize) -> Result<Vec<T>> {
    let v = s
        .split_whitespace()
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| err(line, format!("bad integer `{t}`")))
        })
        .collect::<Result<Vec<T>>>()?;
    if v.len() != count {
        return Err(err(
            line,
            format!("expected {count} values, found {}", v.len()),
        ));
    }
    Ok(v)
}

pub fn parse_btn(text: &str) -> Result<Network> {
    let mut lines = Lines {
        inner: text.lines().enumerate().peekable(),
    };
    let head = lines.next()?;
    if head.1 != "BTN v1" {
        return Err(err(head.0, "expected header `BTN v1`"));
    }
    let dl = lines.next()?;
    let depth: usize = keyed(dl, "depth")?
        .parse()
        .map_err(|_| err(dl.0, "bad depth"))?;
    if depth == 0 {
        return Err(err(dl.0, "depth must be at least 1"));
    }
    let dimsl = lines.next()?;
    let dims: Vec<usize> = ints(dimsl.0, keyed(dimsl, "dims")?, depth + 1)?;
    let mut layers = Vec::with_capacity(depth);
    let mut wide = false;
    for l in 1..=depth {
        let ll = lines.next()?;
        let idx: usize = keyed(ll, "layer")?
            .parse()
            .map_err(|_| err(ll.0, "bad layer index"))?;
        if idx != l {
            return Err(err(ll.0, format!("expected layer {l}, found {idx}")));
        }
        let (fan_in, width) = (dims[l - 1], dims[l]);
        let mut rows = Vec::with_capacity(width);
        for _ in 0..width {
            let (n, row) = lines.next()?;
            if row.chars().count() != fan_in {
                return Err(err(n, format!("row must have {fan_in} characters")));
            }
            rows.push((n, row));
        }
        let ternary = rows.iter().any(|(_, r)| r.contains('-'));
        if ternary && l != 1 {
            return Err(err(rows[0].0, "only the first layer may be ternary"));
        }
        let mut layer = Layer::zeros(width, fan_in, ternary);
        for (i, (n, row)) in rows.iter().enumerate() {
            for (j, c) in row.chars().enumerate() {
                let v = match c {
                    '0' => 0,
                    '1' => 1,
                    '-' => -1,
                    _ => return Err(err(*n, format!("bad weight character `{c}`"))),
                };
                layer.set_weight(i, j, v);
            }
        }
        let bl = lines.next()?;
        let biases: Vec<i64> = ints(bl.0, keyed(bl, "b:")?, width)?;
        let gl = lines.next()?;
        let scales: Vec<i8> = ints(gl.0, keyed(gl, "g:")?, width)?;
        let (lo, hi) = bias_range(fan_in, false);
        for i in 0..width {
            wide |= biases[i] < lo || biases[i] > hi;
            layer.set_bias(i, biases[i]);
            layer.set_scale(i, scales[i]);
        }
        layers.push(layer);
    }
    if let Some(n) = lines.rest_is_empty() {
        return Err(err(n, "trailing content after the last layer"));
    }
    if wide {
        Network::new_wide(layers)
    } else {
        Network::new(layers)
    }
}
