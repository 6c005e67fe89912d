//! LIBSVM-compatible `c_svc` model files.
//!
//! ```text
//! svm_type c_svc
//! kernel_type rbf
//! gamma 0.5
//! nr_class 2
//! total_sv 3
//! rho -1.6666666666666667
//! label 1 -1
//! nr_sv 2 1
//! SV
//! 0 1:1
//! ...
//! ```
//!
//! `rho` is the negated bias so that LIBSVM's `sum(coef * k) - rho` equals
//! our decision value. Support vectors are written in training order; for a
//! binary model LIBSVM sums all coefficients regardless of class grouping, so
//! `nr_sv` only has to add up to `total_sv`.

use std::io::{BufRead, Write};

use crate::dataset::LabelMap;
use crate::error::{Error, Result};
use crate::io::format::format_real;
use crate::io::libsvm::canonical_label;
use crate::kernel::{KernelConfig, KernelKind};
use crate::matrix::{FeatureMatrix, DEFAULT_BLOCK};
use crate::model::Model;

pub fn write_model<W: Write>(model: &Model, mut out: W) -> Result<()> {
    let kernel = &model.kernel;
    writeln!(out, "svm_type c_svc")?;
    writeln!(out, "kernel_type {}", kernel.kind.libsvm_name())?;
    match kernel.kind {
        KernelKind::Linear => {}
        KernelKind::Polynomial => {
            writeln!(out, "degree {}", kernel.degree)?;
            writeln!(out, "gamma {}", format_real(kernel.gamma))?;
            writeln!(out, "coef0 {}", format_real(kernel.coef0))?;
        }
        KernelKind::Radial => writeln!(out, "gamma {}", format_real(kernel.gamma))?,
    }
    writeln!(out, "nr_class 2")?;
    writeln!(out, "total_sv {}", model.num_support_vectors())?;
    writeln!(out, "rho {}", format_real(model.rho()))?;
    writeln!(out, "label {} {}", model.label_map.positive, model.label_map.negative)?;
    writeln!(out, "nr_sv {} {}", model.class_counts[0], model.class_counts[1])?;
    writeln!(out, "SV")?;
    let sv = &model.support_points;
    for (i, &w) in model.weights.iter().enumerate() {
        out.write_all(format_real(w).as_bytes())?;
        for j in 0..sv.num_features() {
            let v = sv.get(i, j);
            if v != 0.0 {
                write!(out, " {}:{}", j + 1, format_real(v))?;
            }
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn model_to_string(model: &Model) -> String {
    let mut out = Vec::new();
    write_model(model, &mut out).expect("writing to memory");
    String::from_utf8(out).expect("model text is UTF-8")
}

#[derive(Default)]
struct Header {
    svm_type: Option<String>,
    kernel: Option<KernelKind>,
    degree: Option<u32>,
    gamma: Option<f64>,
    coef0: Option<f64>,
    nr_class: Option<usize>,
    total_sv: Option<usize>,
    rho: Option<f64>,
    labels: Option<(String, String)>,
    nr_sv: Option<[usize; 2]>,
}

fn header_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_value<T: std::str::FromStr>(values: &[&str], line: usize, key: &str) -> Result<T> {
    match values {
        [v] => v
            .parse()
            .map_err(|_| header_error(line, format!("invalid value for {key}: {v:?}"))),
        _ => Err(header_error(line, format!("{key} expects one value"))),
    }
}

/// Reads a model written by [`write_model`] or by LIBSVM for a binary
/// `c_svc` problem.
pub fn parse_model<R: BufRead>(reader: R) -> Result<Model> {
    let mut lines = reader.lines().enumerate();
    let mut header = Header::default();
    let mut saw_sv = false;

    for (idx, line) in lines.by_ref() {
        let line_no = idx + 1;
        let line = line?;
        let mut parts = line.split_whitespace();
        let Some(key) = parts.next() else { continue };
        let values: Vec<&str> = parts.collect();
        match key {
            "SV" => {
                saw_sv = true;
                break;
            }
            "svm_type" => header.svm_type = Some(header_value(&values, line_no, key)?),
            "kernel_type" => {
                let name: String = header_value(&values, line_no, key)?;
                header.kernel =
                    Some(KernelKind::from_libsvm_name(&name).ok_or(Error::UnknownKernel(name))?);
            }
            "degree" => header.degree = Some(header_value(&values, line_no, key)?),
            "gamma" => header.gamma = Some(header_value(&values, line_no, key)?),
            "coef0" => header.coef0 = Some(header_value(&values, line_no, key)?),
            "nr_class" => {
                let n: usize = header_value(&values, line_no, key)?;
                if n != 2 {
                    return Err(Error::UnsupportedClassCount(n));
                }
                header.nr_class = Some(n);
            }
            "total_sv" => header.total_sv = Some(header_value(&values, line_no, key)?),
            "rho" => header.rho = Some(header_value(&values, line_no, key)?),
            "label" => match values.as_slice() {
                [a, b] => {
                    header.labels =
                        Some((canonical_label(a, line_no)?, canonical_label(b, line_no)?))
                }
                _ => return Err(header_error(line_no, "label expects two values")),
            },
            "nr_sv" => match values.as_slice() {
                [a, b] => {
                    let parse = |v: &str| {
                        v.parse::<usize>()
                            .map_err(|_| header_error(line_no, format!("invalid nr_sv {v:?}")))
                    };
                    header.nr_sv = Some([parse(a)?, parse(b)?]);
                }
                _ => return Err(header_error(line_no, "nr_sv expects two values")),
            },
            // probability outputs are not supported and carry no decision data
            "probA" | "probB" => {}
            other => {
                return Err(header_error(line_no, format!("unknown header field {other:?}")));
            }
        }
    }

    let svm_type = header.svm_type.ok_or(Error::MissingField("svm_type"))?;
    if svm_type != "c_svc" {
        return Err(Error::UnsupportedSvmType(svm_type));
    }
    let kind = header.kernel.ok_or(Error::MissingField("kernel_type"))?;
    header.nr_class.ok_or(Error::MissingField("nr_class"))?;
    let total_sv = header.total_sv.ok_or(Error::MissingField("total_sv"))?;
    let rho = header.rho.ok_or(Error::MissingField("rho"))?;
    let (positive, negative) = header.labels.ok_or(Error::MissingField("label"))?;
    let nr_sv = header.nr_sv.ok_or(Error::MissingField("nr_sv"))?;
    if !saw_sv {
        return Err(Error::MissingField("SV"));
    }
    let kernel = match kind {
        KernelKind::Linear => KernelConfig::linear(),
        KernelKind::Polynomial => KernelConfig::polynomial(
            header.gamma.ok_or(Error::MissingField("gamma"))?,
            header.degree.ok_or(Error::MissingField("degree"))?,
            header.coef0.ok_or(Error::MissingField("coef0"))?,
        ),
        KernelKind::Radial => KernelConfig::radial(header.gamma.ok_or(Error::MissingField("gamma"))?),
    };
    if nr_sv[0] + nr_sv[1] != total_sv {
        return Err(Error::MalformedData(format!(
            "nr_sv {} + {} does not add up to total_sv {total_sv}",
            nr_sv[0], nr_sv[1]
        )));
    }

    let mut weights = Vec::with_capacity(total_sv);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(total_sv);
    let mut num_features = 0;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let Some(coef) = tokens.next() else { continue };
        let coef: f64 = coef
            .parse()
            .map_err(|_| header_error(line_no, format!("non-numeric coefficient {coef:?}")))?;
        let mut row = Vec::new();
        let mut previous = 0usize;
        for token in tokens {
            let parsed = token.split_once(':').and_then(|(i, v)| {
                Some((i.parse::<usize>().ok()?, v.parse::<f64>().ok()?))
            });
            let Some((index, value)) = parsed else {
                return Err(header_error(line_no, format!("malformed feature {token:?}")));
            };
            if index <= previous {
                return Err(header_error(line_no, "indices must be ascending"));
            }
            previous = index;
            row.push((index - 1, value));
        }
        num_features = num_features.max(previous);
        weights.push(coef);
        rows.push(row);
    }
    if weights.len() != total_sv {
        return Err(Error::MalformedData(format!(
            "expected {total_sv} support vectors, found {}",
            weights.len()
        )));
    }
    let mut support_points =
        FeatureMatrix::zeros(total_sv, num_features.max(1), DEFAULT_BLOCK, DEFAULT_BLOCK)?;
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            support_points.set(i, j, v);
        }
    }
    Ok(Model {
        kernel,
        support_points,
        weights,
        bias: -rho,
        label_map: LabelMap::new(positive, negative),
        class_counts: nr_sv,
    })
}
