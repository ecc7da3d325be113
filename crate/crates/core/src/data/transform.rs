use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::params::{ParamMap, ParamReader};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    StandardScale,
    MinMaxScale,
    OneHot,
    GaussianNoise,
    Clip,
    L2Normalize,
    PolynomialDeg2,
    DropConstant,
}

impl TransformKind {
    pub const ALL: [TransformKind; 8] = [
        TransformKind::StandardScale,
        TransformKind::MinMaxScale,
        TransformKind::OneHot,
        TransformKind::GaussianNoise,
        TransformKind::Clip,
        TransformKind::L2Normalize,
        TransformKind::PolynomialDeg2,
        TransformKind::DropConstant,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::UnknownTransformer(name.to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::StandardScale => "standard_scale",
            TransformKind::MinMaxScale => "minmax_scale",
            TransformKind::OneHot => "one_hot",
            TransformKind::GaussianNoise => "gaussian_noise",
            TransformKind::Clip => "clip",
            TransformKind::L2Normalize => "l2_normalize",
            TransformKind::PolynomialDeg2 => "polynomial_deg2",
            TransformKind::DropConstant => "drop_constant",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Learned {
    /// `(x - shift) / scale` per column.
    Affine { shift: Vec<f64>, scale: Vec<f64> },
    /// Sorted categories per encoded column; `None` keeps the column as is.
    OneHot { categories: Vec<Option<Vec<f64>>> },
    Noise { sd: f64, seed: u64 },
    Clip { lo: f64, hi: f64 },
    L2,
    Poly,
    Keep { columns: Vec<usize> },
}

/// A fitted transform, reusable on new rows with the fitted width.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformerState {
    kind: TransformKind,
    input_cols: usize,
    learned: Learned,
    warnings: Vec<String>,
}

impl TransformerState {
    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Applies the fitted transform. Gaussian noise is a training-time
    /// augmentation and passes rows through unchanged here.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_cols && !(x.rows() == 0 && x.cols() == 0) {
            return Err(Error::dims("transform input width", self.input_cols, x.cols()));
        }
        Ok(match &self.learned {
            Learned::Affine { shift, scale } => {
                let mut out = x.clone();
                for i in 0..out.rows() {
                    for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                        *v = (*v - shift[j]) / scale[j];
                    }
                }
                out
            }
            Learned::OneHot { categories } => {
                let width: usize = categories
                    .iter()
                    .map(|c| c.as_ref().map_or(1, Vec::len))
                    .sum();
                let mut out = Matrix::zeros(x.rows(), width);
                for i in 0..x.rows() {
                    let mut pos = 0;
                    for (j, cats) in categories.iter().enumerate() {
                        let v = x[(i, j)];
                        match cats {
                            None => {
                                out[(i, pos)] = v;
                                pos += 1;
                            }
                            Some(cats) => {
                                // unseen categories encode as all zeros
                                if let Ok(c) = cats.binary_search_by(|p| p.total_cmp(&v)) {
                                    out[(i, pos + c)] = 1.0;
                                }
                                pos += cats.len();
                            }
                        }
                    }
                }
                out
            }
            Learned::Noise { .. } => x.clone(),
            Learned::Clip { lo, hi } => {
                let mut out = x.clone();
                for v in out.as_mut_slice() {
                    *v = v.max(*lo).min(*hi);
                }
                out
            }
            Learned::L2 => {
                let mut out = x.clone();
                for i in 0..out.rows() {
                    let row = out.row_mut(i);
                    let norm = math::sqrt(math::dot(row, row));
                    if norm > 0.0 {
                        for v in row.iter_mut() {
                            *v /= norm;
                        }
                    }
                }
                out
            }
            Learned::Poly => {
                let d = x.cols();
                let width = d + d * (d + 1) / 2;
                let mut out = Matrix::zeros(x.rows(), width);
                for i in 0..x.rows() {
                    let r = x.row(i);
                    let o = out.row_mut(i);
                    o[..d].copy_from_slice(r);
                    let mut pos = d;
                    for a in 0..d {
                        for b in a..d {
                            o[pos] = r[a] * r[b];
                            pos += 1;
                        }
                    }
                }
                out
            }
            Learned::Keep { columns } => x.select_cols(columns),
        })
    }
}

/// Fits a transform on `x_all` (labeled and unlabeled rows together) and
/// returns the fitted state with the transformed matrix.
pub fn transform_fit_apply(
    kind: TransformKind,
    params: &ParamMap,
    x_all: &Matrix,
) -> Result<(TransformerState, Matrix)> {
    let mut r = ParamReader::new(kind.name(), params);
    let mut warnings = Vec::new();
    let cols = x_all.cols();
    let needs_stats = matches!(
        kind,
        TransformKind::StandardScale
            | TransformKind::MinMaxScale
            | TransformKind::OneHot
            | TransformKind::DropConstant
    );
    if needs_stats && x_all.rows() == 0 {
        return Err(Error::InvalidData(format!(
            "{} needs at least one row to fit",
            kind.name()
        )));
    }

    let learned = match kind {
        TransformKind::StandardScale => {
            let mut shift = Vec::with_capacity(cols);
            let mut scale = Vec::with_capacity(cols);
            for j in 0..cols {
                let col = x_all.col_values(j);
                let sd = math::sqrt(math::variance(&col));
                if sd > 0.0 {
                    shift.push(math::mean(&col));
                    scale.push(sd);
                } else {
                    warnings.push(format!("column {j} has zero variance; passed through unscaled"));
                    shift.push(0.0);
                    scale.push(1.0);
                }
            }
            Learned::Affine { shift, scale }
        }
        TransformKind::MinMaxScale => {
            let mut shift = Vec::with_capacity(cols);
            let mut scale = Vec::with_capacity(cols);
            for j in 0..cols {
                let col = x_all.col_values(j);
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                shift.push(lo);
                if hi > lo {
                    scale.push(hi - lo);
                } else {
                    warnings.push(format!("column {j} is constant; mapped to 0"));
                    scale.push(1.0);
                }
            }
            Learned::Affine { shift, scale }
        }
        TransformKind::OneHot => {
            let encode = r.usize_list_opt("columns")?;
            let mut categories = Vec::with_capacity(cols);
            for j in 0..cols {
                let selected = encode.as_ref().map_or(true, |c| c.contains(&j));
                if !selected {
                    categories.push(None);
                    continue;
                }
                let mut vals = x_all.col_values(j);
                vals.sort_by(|a, b| a.total_cmp(b));
                vals.dedup();
                categories.push(Some(vals));
            }
            if let Some(enc) = &encode {
                if let Some(&bad) = enc.iter().find(|&&c| c >= cols) {
                    return Err(Error::invalid("columns", format!("column {bad} out of range")));
                }
            }
            Learned::OneHot { categories }
        }
        TransformKind::GaussianNoise => {
            let sd = r.real("sd", 0.1)?;
            if sd < 0.0 {
                return Err(Error::invalid("sd", "must be >= 0"));
            }
            let seed = r.int_opt("seed")?.unwrap_or(0) as u64;
            Learned::Noise { sd, seed }
        }
        TransformKind::Clip => {
            let lo = r.real_opt("lo")?.unwrap_or(f64::NEG_INFINITY);
            let hi = r.real_opt("hi")?.unwrap_or(f64::INFINITY);
            if lo > hi {
                return Err(Error::invalid("lo", "must not exceed hi"));
            }
            Learned::Clip { lo, hi }
        }
        TransformKind::L2Normalize => Learned::L2,
        TransformKind::PolynomialDeg2 => Learned::Poly,
        TransformKind::DropConstant => {
            let columns: Vec<usize> = (0..cols)
                .filter(|&j| {
                    let col = x_all.col_values(j);
                    col.iter().any(|&v| v != col[0])
                })
                .collect();
            if columns.is_empty() {
                return Err(Error::InvalidData("every column is constant".into()));
            }
            if columns.len() < cols {
                warnings.push(format!("dropped {} constant column(s)", cols - columns.len()));
            }
            Learned::Keep { columns }
        }
    };
    r.finish()?;

    let state = TransformerState {
        kind,
        input_cols: cols,
        learned,
        warnings,
    };
    let out = match &state.learned {
        Learned::Noise { sd, seed } => {
            let mut out = x_all.clone();
            if *sd > 0.0 {
                let mut rng = Rng::new(*seed);
                for v in out.as_mut_slice() {
                    *v += sd * rng.normal();
                }
            }
            out
        }
        _ => state.apply(x_all)?,
    };
    Ok((state, out))
}
