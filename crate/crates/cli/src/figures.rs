//! Figure data: every curve is a [`RunConfig`], recorded verbatim in the
//! metadata sidecar so `sweep --config` reproduces its CSV.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::config::{
    plan, Angle, AxisName, AxisSel, ConfigError, ErrorSpec, FitSpec, GridSpec, GroupSpec,
    RunConfig, SequenceSpec, Space, Values,
};
use crate::run::{execute, CurveFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Wj,
    Grid,
    Chain,
    Xy,
    Heisenberg,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Wj => "wj",
            Self::Grid => "grid",
            Self::Chain => "chain",
            Self::Xy => "xy",
            Self::Heisenberg => "heisenberg",
        }
    }
}

pub const DEFAULT_CHAIN_LENGTHS: [usize; 2] = [2, 3];

/// Error in `X1` and `Y1` for the BB1-WJ curve.
const WJ_EPS_X: f64 = 1e-2;

pub struct Curve {
    pub file: String,
    pub config: RunConfig,
}

pub struct Figure {
    pub id: FigureId,
    pub curves: Vec<Curve>,
    pub notes: Vec<String>,
}

fn controls(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn quarter() -> Angle {
    Angle::parse("pi/4").expect("literal angle")
}

fn curve(file: &str, config: RunConfig) -> Curve {
    let mut config = config;
    config.output = Some(PathBuf::from(format!("{file}.csv")));
    Curve {
        file: format!("{file}.csv"),
        config,
    }
}

fn base(id: &str, sequence: SequenceSpec, errors: ErrorSpec, grid: GridSpec) -> RunConfig {
    RunConfig {
        id: Some(id.to_string()),
        n_qubits: None,
        controls: BTreeMap::new(),
        sequence,
        errors,
        grid,
        fit: FitSpec::Enabled(false),
        space: None,
        output: None,
    }
}

fn one_d(values: Values) -> GridSpec {
    GridSpec {
        eps1: values,
        eps2: None,
    }
}

fn zz_controls() -> BTreeMap<String, String> {
    controls(&[("ZZ", "0.5*ZZ"), ("X", "0.5*XI"), ("Y", "0.5*YI")])
}

fn wj() -> Figure {
    let grid = || one_d(Values::log(1e-5, 1e-1, 33));
    let mut bare = base(
        "uncorrected",
        SequenceSpec::Uncorrected {
            theta: quarter(),
            target: "ZZ".into(),
        },
        ErrorSpec::Groups(vec![GroupSpec::on(&["ZZ"], AxisSel::Eps1)]),
        grid(),
    );
    bare.controls = zz_controls();
    bare.fit = FitSpec::Enabled(true);
    let mut corrected = base(
        "bb1_wj",
        SequenceSpec::Bb1Wj {
            theta: quarter(),
            target: "ZZ".into(),
            partner: "X".into(),
            third: "Y".into(),
        },
        ErrorSpec::Groups(vec![
            GroupSpec::on(&["ZZ"], AxisSel::Eps1),
            GroupSpec::fixed(&["X", "Y"], WJ_EPS_X),
        ]),
        grid(),
    );
    corrected.controls = zz_controls();
    corrected.fit = FitSpec::Window {
        window: (1e-5, 1e-3),
    };
    Figure {
        id: FigureId::Wj,
        curves: vec![curve("wj_uncorrected", bare), curve("wj_bb1_wj", corrected)],
        notes: vec![
            "eps1 is the ZZ error; X and Y share a fixed error of 1e-2".into(),
            "the higher-order B4-based curve is not produced: its coefficients are not available"
                .into(),
        ],
    }
}

fn grid() -> Figure {
    let axes = || GridSpec {
        eps1: Values::log(1e-3, 1e-1, 9),
        eps2: Some(Values::log(1e-3, 1e-1, 9)),
    };
    let pair = |kind: &str| {
        let sequence = match kind {
            "bb1_w" => SequenceSpec::Bb1W {
                theta: quarter(),
                target: "ZZ".into(),
                partner: "X".into(),
            },
            _ => SequenceSpec::Bb1J {
                theta: quarter(),
                target: "ZZ".into(),
                partner: "X".into(),
            },
        };
        let mut c = base(
            kind,
            sequence,
            ErrorSpec::Groups(vec![
                GroupSpec::on(&["ZZ"], AxisSel::Eps1),
                GroupSpec::on(&["X"], AxisSel::Eps2),
            ]),
            axes(),
        );
        c.controls = controls(&[("ZZ", "0.5*ZZ"), ("X", "0.5*XI")]);
        c
    };
    let mut wj = base(
        "bb1_wj",
        SequenceSpec::Bb1Wj {
            theta: quarter(),
            target: "ZZ".into(),
            partner: "X".into(),
            third: "Y".into(),
        },
        ErrorSpec::Groups(vec![
            GroupSpec::on(&["ZZ"], AxisSel::Eps1),
            GroupSpec::on(&["X", "Y"], AxisSel::Eps2),
        ]),
        axes(),
    );
    wj.controls = zz_controls();
    Figure {
        id: FigureId::Grid,
        curves: vec![
            curve("grid_bb1_w", pair("bb1_w")),
            curve("grid_bb1_j", pair("bb1_j")),
            curve("grid_bb1_wj", wj),
        ],
        notes: vec!["eps1 is the ZZ error, eps2 the X (and Y) error".into()],
    }
}

fn chain(seed: u64, lengths: &[usize]) -> Figure {
    let grid = || one_d(Values::log(1e-4, 1e-1, 13));
    let local = controls(&[("Xn", "0.5*X"), ("Yn", "0.5*Y")]);
    let reference = |id: &str, y_scale: f64| {
        let mut c = base(
            id,
            SequenceSpec::Bb1W {
                theta: quarter(),
                target: "Xn".into(),
                partner: "Yn".into(),
            },
            ErrorSpec::Groups(vec![
                GroupSpec::on(&["Xn"], AxisSel::Eps1),
                GroupSpec::on(&["Yn"], AxisSel::Eps1).scaled(y_scale),
            ]),
            grid(),
        );
        c.controls = local.clone();
        c
    };
    let mut curves = Vec::new();
    for &n in lengths {
        let c = base(
            &format!("wj_chain{n}"),
            SequenceSpec::WjChain {
                theta: quarter(),
                n,
            },
            ErrorSpec::RandomSign {
                seed: Some(seed),
                labels: None,
                correlated: Some(["X1".into(), "Y1".into()]),
            },
            grid(),
        );
        curves.push(curve(&format!("chain_n{n}"), c));
    }
    let mut bare = base(
        "uncorrected",
        SequenceSpec::Uncorrected {
            theta: quarter(),
            target: "Xn".into(),
        },
        ErrorSpec::Groups(vec![GroupSpec::on(&["Xn"], AxisSel::Eps1)]),
        grid(),
    );
    bare.controls = local.clone();
    curves.push(curve("chain_uncorrected", bare));
    curves.push(curve(
        "chain_correlated",
        reference("bb1_w_correlated", 1.0),
    ));
    curves.push(curve(
        "chain_anticorrelated",
        reference("bb1_w_anticorrelated", -1.0),
    ));
    Figure {
        id: FigureId::Chain,
        curves,
        notes: vec![
            "eps1 is the common error magnitude, sampled logarithmically".into(),
            "chain signs are drawn per label from the seed; X1 and Y1 share one draw".into(),
            "reference curves apply BB1-W with Yn; its error equals +/- the Xn error".into(),
        ],
    }
}

fn xy() -> Figure {
    let make = |id: &str, corrected: bool| {
        let mut c = base(
            id,
            SequenceSpec::P3 {
                theta: quarter(),
                corrected,
            },
            ErrorSpec::Groups(vec![GroupSpec::on(&["A"], AxisSel::Eps1)]),
            one_d(Values::log(1e-3, 1e-1, 9)),
        );
        c.fit = FitSpec::Enabled(true);
        c
    };
    Figure {
        id: FigureId::Xy,
        curves: vec![
            curve("xy_p3", make("p3", false)),
            curve("xy_p3_bb1", make("p3_bb1", true)),
        ],
        notes: vec!["infidelity on the code space; all XY couplings share one error".into()],
    }
}

fn heisenberg() -> Figure {
    let make = |id: &str, corrected: bool, space: Space| {
        let mut c = base(
            id,
            SequenceSpec::Heisenberg {
                theta: quarter(),
                axis: AxisName::Z,
                corrected,
            },
            ErrorSpec::Groups(vec![GroupSpec::on(&["E"], AxisSel::Eps1)]),
            one_d(Values::log(1e-4, 1e-1, 13)),
        );
        c.space = Some(space);
        c.fit = FitSpec::Window {
            window: (1e-4, 1e-2),
        };
        c
    };
    Figure {
        id: FigureId::Heisenberg,
        curves: vec![
            curve(
                "heisenberg_code",
                make("uncorrected_code", false, Space::Code),
            ),
            curve("heisenberg_code_bb1", make("bb1_w_code", true, Space::Code)),
            curve(
                "heisenberg_full",
                make("uncorrected_full", false, Space::Full),
            ),
            curve("heisenberg_full_bb1", make("bb1_w_full", true, Space::Full)),
        ],
        notes: vec!["code = S=1/2, m_z=1/2 doublet; full = all three-spin states".into()],
    }
}

pub fn figure(id: FigureId, seed: u64, chain_lengths: &[usize]) -> Figure {
    match id {
        FigureId::Wj => wj(),
        FigureId::Grid => grid(),
        FigureId::Chain => chain(seed, chain_lengths),
        FigureId::Xy => xy(),
        FigureId::Heisenberg => heisenberg(),
    }
}

#[derive(Serialize)]
struct CurveMeta<'a> {
    file: &'a str,
    rows: usize,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    fits: Vec<CurveFit>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    figure: &'static str,
    command: String,
    seed: u64,
    version: &'static str,
    csv_header: &'static str,
    notes: &'a [String],
    curves: Vec<CurveMeta<'a>>,
}

#[derive(Debug)]
pub enum FigureError {
    Config(ConfigError),
    Compute(multipulse::Error),
    Io(PathBuf, std::io::Error),
}

impl std::fmt::Display for FigureError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "{e}"),
            Self::Compute(e) => write!(f, "{e}"),
            Self::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

/// Writes one CSV per curve plus `<id>.json`; returns summary lines.
pub fn write_figure(
    fig: &Figure,
    seed: u64,
    command: String,
    out: &Path,
) -> Result<Vec<String>, FigureError> {
    fs::create_dir_all(out).map_err(|e| FigureError::Io(out.to_path_buf(), e))?;
    let mut lines = Vec::new();
    let mut metas = Vec::new();
    for c in &fig.curves {
        let p = plan(&c.config, seed).map_err(FigureError::Config)?;
        let outcome = execute(&p).map_err(FigureError::Compute)?;
        let path = out.join(&c.file);
        fs::write(&path, outcome.result.to_csv()).map_err(|e| FigureError::Io(path.clone(), e))?;
        lines.push(format!(
            "wrote {} ({} rows)",
            c.file,
            outcome.result.rows.len()
        ));
        lines.extend(outcome.fits.iter().map(ToString::to_string));
        metas.push(CurveMeta {
            file: &c.file,
            rows: outcome.result.rows.len(),
            config: &c.config,
            fits: outcome.fits,
        });
    }
    let sidecar = Sidecar {
        figure: fig.id.name(),
        command,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        csv_header: multipulse::analysis::CSV_HEADER,
        notes: &fig.notes,
        curves: metas,
    };
    let path = out.join(format!("{}.json", fig.id.name()));
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| FigureError::Io(path.clone(), e))?;
    lines.push(format!("wrote {}.json", fig.id.name()));
    Ok(lines)
}
