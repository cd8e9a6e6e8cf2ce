//! Network architecture descriptors.
//!
//! Grammar (whitespace separated, order significant):
//!
//! ```text
//! descriptor := "input=" H "x" W "x" C layer* "actions=" M "residual=" ("on"|"off")
//! layer      := "conv=" FILTERS | "dense=" UNITS
//! ```
//!
//! Convolutions are 3x3, stride 1, zero padded, followed by ReLU; all conv
//! layers come before any dense layer. With `residual=on`, a conv layer whose
//! input and output channel counts match adds its input before the ReLU. The
//! trunk feeds a linear policy head of width `M` (softmax) and a linear value
//! head of width 1 (tanh).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layer {
    Conv { filters: usize },
    Dense { units: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Architecture {
    pub size: usize,
    pub planes: usize,
    pub layers: Vec<Layer>,
    pub actions: usize,
    pub residual: bool,
}

/// Offsets of one parameter block inside the flat weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Block {
    pub weights: usize,
    pub bias: usize,
    pub fan_in: usize,
    pub fan_out: usize,
}

impl Block {
    pub fn weight_range(&self) -> std::ops::Range<usize> {
        self.weights..self.weights + self.fan_in * self.fan_out
    }

    pub fn bias_range(&self) -> std::ops::Range<usize> {
        self.bias..self.bias + self.fan_out
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub hidden: Vec<Block>,
    pub policy: Block,
    pub value: Block,
    pub total: usize,
    /// Feature count flowing out of each hidden layer.
    pub widths: Vec<usize>,
}

impl Architecture {
    /// Two 32-filter conv blocks and a 128-unit dense layer.
    pub fn desk_scale(size: usize, actions: usize) -> Self {
        Architecture {
            size,
            planes: 2,
            layers: vec![
                Layer::Conv { filters: 32 },
                Layer::Conv { filters: 32 },
                Layer::Dense { units: 128 },
            ],
            actions,
            residual: false,
        }
    }

    pub fn input_len(&self) -> usize {
        self.size * self.size * self.planes
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 || self.planes == 0 || self.actions == 0 {
            return Err(Error::Config(format!(
                "architecture `{self}` has a zero dimension"
            )));
        }
        let mut seen_dense = false;
        for layer in &self.layers {
            match *layer {
                Layer::Conv { filters } => {
                    if seen_dense {
                        return Err(Error::Config(format!(
                            "architecture `{self}`: conv layer after dense layer"
                        )));
                    }
                    if filters == 0 {
                        return Err(Error::Config("conv layer with zero filters".into()));
                    }
                }
                Layer::Dense { units } => {
                    seen_dense = true;
                    if units == 0 {
                        return Err(Error::Config("dense layer with zero units".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn layout(&self) -> Layout {
        let cells = self.size * self.size;
        let mut offset = 0;
        let mut block = |fan_in: usize, fan_out: usize| {
            let b = Block {
                weights: offset,
                bias: offset + fan_in * fan_out,
                fan_in,
                fan_out,
            };
            offset += fan_in * fan_out + fan_out;
            b
        };

        let mut hidden = Vec::with_capacity(self.layers.len());
        let mut widths = Vec::with_capacity(self.layers.len());
        let mut channels = self.planes;
        let mut features = self.input_len();
        for layer in &self.layers {
            match *layer {
                Layer::Conv { filters } => {
                    hidden.push(block(channels * 9, filters));
                    channels = filters;
                    features = filters * cells;
                }
                Layer::Dense { units } => {
                    hidden.push(block(features, units));
                    features = units;
                }
            }
            widths.push(features);
        }
        let policy = block(features, self.actions);
        let value = block(features, 1);
        Layout {
            hidden,
            policy,
            value,
            total: offset,
            widths,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.layout().total
    }

    /// Indices of bias parameters, which are exempt from L2 regularisation.
    pub fn bias_mask(&self) -> Vec<bool> {
        let layout = self.layout();
        let mut mask = vec![false; layout.total];
        for b in layout.hidden.iter().chain([&layout.policy, &layout.value]) {
            mask[b.bias_range()].iter_mut().for_each(|m| *m = true);
        }
        mask
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "input={}x{}x{}", self.size, self.size, self.planes)?;
        for layer in &self.layers {
            match layer {
                Layer::Conv { filters } => write!(f, " conv={filters}")?,
                Layer::Dense { units } => write!(f, " dense={units}")?,
            }
        }
        write!(
            f,
            " actions={} residual={}",
            self.actions,
            if self.residual { "on" } else { "off" }
        )
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("architecture `{s}`: {msg}"));
        let mut tokens = s.split_whitespace();

        let input = tokens
            .next()
            .and_then(|t| t.strip_prefix("input="))
            .ok_or_else(|| bad("must start with input=HxWxC".into()))?;
        let dims: Vec<usize> = input
            .split('x')
            .map(|d| d.parse().map_err(|_| bad(format!("bad input dimension {d:?}"))))
            .collect::<Result<_>>()?;
        let [h, w, c] = dims[..] else {
            return Err(bad("input needs three dimensions".into()));
        };
        if h != w {
            return Err(bad("only square boards are supported".into()));
        }

        let mut layers = Vec::new();
        let mut actions = None;
        let mut residual = None;
        for token in tokens {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| bad(format!("token {token:?} is not key=value")))?;
            let number = || {
                value
                    .parse::<usize>()
                    .map_err(|_| bad(format!("{key} expects an integer, got {value:?}")))
            };
            if actions.is_some() && key != "residual" {
                return Err(bad(format!("unexpected {key:?} after actions")));
            }
            match key {
                "conv" => layers.push(Layer::Conv { filters: number()? }),
                "dense" => layers.push(Layer::Dense { units: number()? }),
                "actions" => actions = Some(number()?),
                "residual" => {
                    residual = Some(match value {
                        "on" => true,
                        "off" => false,
                        _ => return Err(bad(format!("residual must be on|off, got {value:?}"))),
                    })
                }
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        let arch = Architecture {
            size: h,
            planes: c,
            layers,
            actions: actions.ok_or_else(|| bad("missing actions=M".into()))?,
            residual: residual.ok_or_else(|| bad("missing residual=on|off".into()))?,
        };
        arch.validate()?;
        Ok(arch)
    }
}

impl TryFrom<String> for Architecture {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Architecture> for String {
    fn from(a: Architecture) -> String {
        a.to_string()
    }
}
