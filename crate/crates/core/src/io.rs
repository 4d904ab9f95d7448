//! JSON file formats.
//!
//! Tensors are `{"shape":[…],"data":[…]}` with data in last-index-fastest
//! order. Floats are written in shortest round-trip form, so one
//! write/read cycle is bit-exact. Reports write every float with 17
//! significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tensor::DenseTensor;
use crate::vn::{BlockDiagonalSpec, EqualityWitness, Permutation, VnReport};

pub const TOOL_NAME: &str = "tvn";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl From<&DenseTensor> for TensorFile {
    fn from(t: &DenseTensor) -> Self {
        TensorFile {
            shape: t.shape().to_vec(),
            data: t.data().to_vec(),
        }
    }
}

impl TryFrom<TensorFile> for DenseTensor {
    type Error = Error;

    fn try_from(f: TensorFile) -> Result<Self> {
        DenseTensor::from_parts(f.shape, f.data)
    }
}

fn parse<T: DeserializeOwned>(bytes: &[u8], source_name: &str) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::parse(source_name, &e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn parse_tensor(bytes: &[u8], source_name: &str) -> Result<DenseTensor> {
    parse::<TensorFile>(bytes, source_name)?.try_into()
}

pub fn tensor_to_json(t: &DenseTensor) -> String {
    let mut s = serde_json::to_string(&TensorFile::from(t)).expect("finite floats serialize");
    s.push('\n');
    s
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    parse_tensor(&read_bytes(path)?, &path.display().to_string())
}

pub fn write_tensor(t: &DenseTensor, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), tensor_to_json(t).as_bytes())
}

pub fn write_matrix(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    write_tensor(&m.to_tensor(), path)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    Matrix::try_from(&read_tensor(path)?)
}

/// Parses and validates a block-diagonal spec.
pub fn parse_spec(bytes: &[u8], source_name: &str) -> Result<BlockDiagonalSpec> {
    let spec: BlockDiagonalSpec = parse(bytes, source_name)?;
    spec.validate()?;
    Ok(spec)
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<BlockDiagonalSpec> {
    let path = path.as_ref();
    parse_spec(&read_bytes(path)?, &path.display().to_string())
}

pub fn write_spec(spec: &BlockDiagonalSpec, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(spec).expect("spec serializes");
    s.push('\n');
    write_bytes(path.as_ref(), s.as_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&read_bytes(path)?),
        })
    }
}

/// A [`VnReport`] plus provenance of the inputs it was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    #[serde(serialize_with = "float17")]
    pub lhs: f64,
    #[serde(serialize_with = "floats17")]
    pub rhs_per_mode: Vec<f64>,
    #[serde(serialize_with = "floats17")]
    pub gap_per_mode: Vec<f64>,
    pub equality_per_mode: Vec<bool>,
    pub equality_all_modes: bool,
    #[serde(serialize_with = "float17")]
    pub tol: f64,
    #[serde(serialize_with = "float17")]
    pub scale: f64,
}

impl ReportFile {
    pub fn new(report: &VnReport, inputs: Vec<InputDigest>) -> Self {
        ReportFile {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            inputs,
            lhs: report.lhs,
            rhs_per_mode: report.rhs_per_mode.clone(),
            gap_per_mode: report.gap_per_mode.clone(),
            equality_per_mode: report.equality_per_mode.clone(),
            equality_all_modes: report.equality_all_modes,
            tol: report.tol,
            scale: report.scale,
        }
    }

    pub fn report(&self) -> VnReport {
        VnReport {
            lhs: self.lhs,
            rhs_per_mode: self.rhs_per_mode.clone(),
            gap_per_mode: self.gap_per_mode.clone(),
            equality_per_mode: self.equality_per_mode.clone(),
            equality_all_modes: self.equality_all_modes,
            tol: self.tol,
            scale: self.scale,
        }
    }
}

fn raw17(v: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{v:.16e}")).expect("exponent notation is valid JSON")
}

fn float17<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    raw17(*v).serialize(s)
}

fn floats17<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| raw17(*x)).collect::<Vec<_>>().serialize(s)
}

pub fn report_to_json(r: &ReportFile) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_report(bytes: &[u8], source_name: &str) -> Result<ReportFile> {
    let r: ReportFile = parse(bytes, source_name)?;
    let ndim = r.rhs_per_mode.len();
    if r.gap_per_mode.len() != ndim || r.equality_per_mode.len() != ndim {
        return Err(Error::Validation(format!(
            "{source_name}: per-mode fields disagree in length"
        )));
    }
    Ok(r)
}

pub fn write_report(r: &ReportFile, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), report_to_json(r).as_bytes())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ReportFile> {
    let path = path.as_ref();
    parse_report(&read_bytes(path)?, &path.display().to_string())
}

/// Index of a witness directory. Tensors and factors live in sibling
/// tensor files named here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub dx: String,
    pub dy: String,
    pub factors: Vec<String>,
    pub block_shapes: Vec<Vec<usize>>,
    pub ratios: Vec<f64>,
    /// 1-based images `π_d(k)` per mode.
    pub permutations: Option<Vec<Vec<usize>>>,
    pub seed: Option<u64>,
}

pub const WITNESS_INDEX: &str = "witness.json";

/// Writes `dx.json`, `dy.json`, `w_1.json` … `w_D.json` and `witness.json`
/// into `dir`, returning the paths written.
pub fn write_witness(w: &EqualityWitness, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, t: &DenseTensor| -> Result<()> {
        let path = dir.join(name);
        write_tensor(t, &path)?;
        written.push(path);
        Ok(())
    };
    put("dx.json", &w.dx)?;
    put("dy.json", &w.dy)?;
    let factor_names: Vec<String> = (1..=w.factors_w.len())
        .map(|d| format!("w_{d}.json"))
        .collect();
    for (name, f) in factor_names.iter().zip(&w.factors_w) {
        put(name, &f.to_tensor())?;
    }
    let index = WitnessFile {
        dx: "dx.json".into(),
        dy: "dy.json".into(),
        factors: factor_names,
        block_shapes: w.block_shapes.clone(),
        ratios: w.ratios.clone(),
        permutations: w
            .permutations
            .as_ref()
            .map(|ps| ps.iter().map(|p| p.images().to_vec()).collect()),
        seed: w.seed,
    };
    let mut s = serde_json::to_string_pretty(&index).expect("witness index serializes");
    s.push('\n');
    let path = dir.join(WITNESS_INDEX);
    write_bytes(&path, s.as_bytes())?;
    written.push(path);
    Ok(written)
}

pub fn parse_witness_index(bytes: &[u8], source_name: &str) -> Result<WitnessFile> {
    let w: WitnessFile = parse(bytes, source_name)?;
    if w.ratios.len() != w.block_shapes.len() {
        return Err(Error::Validation(format!(
            "{source_name}: {} ratios for {} blocks",
            w.ratios.len(),
            w.block_shapes.len()
        )));
    }
    for name in [&w.dx, &w.dy].into_iter().chain(&w.factors) {
        let mut parts = Path::new(name).components();
        let plain = matches!(
            (parts.next(), parts.next()),
            (Some(std::path::Component::Normal(_)), None)
        );
        if !plain {
            return Err(Error::Validation(format!(
                "{source_name}: {name:?} must be a file name inside the witness directory"
            )));
        }
    }
    if let Some(perms) = &w.permutations {
        for p in perms {
            Permutation::from_images(p.clone())?;
        }
    }
    Ok(w)
}

pub fn read_witness(dir: impl AsRef<Path>) -> Result<EqualityWitness> {
    let dir = dir.as_ref();
    let index_path = dir.join(WITNESS_INDEX);
    let index = parse_witness_index(&read_bytes(&index_path)?, &index_path.display().to_string())?;
    let factors_w = index
        .factors
        .iter()
        .map(|name| read_matrix(dir.join(name)))
        .collect::<Result<Vec<_>>>()?;
    let permutations = index
        .permutations
        .map(|ps| {
            ps.into_iter()
                .map(Permutation::from_images)
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok(EqualityWitness {
        factors_w,
        dx: read_tensor(dir.join(&index.dx))?,
        dy: read_tensor(dir.join(&index.dy))?,
        block_shapes: index.block_shapes,
        ratios: index.ratios,
        permutations,
        seed: index.seed,
    })
}
