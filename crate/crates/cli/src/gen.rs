use std::path::PathBuf;

use clap::{Args, ValueEnum};
use proxkit::problems::{gen, GenParams};

use crate::failure::{CmdResult, Failure};
use crate::output::write_file;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GenKind {
    Lasso,
    #[value(name = "box_qp", alias = "box-qp")]
    BoxQp,
    #[value(name = "huber", alias = "huber_denoise")]
    Huber,
    Control,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Problem family.
    pub kind: GenKind,
    /// Number of unknowns.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Rows of `A` (lasso) or `S` (control); defaults to `n`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Regularization weight.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Huber smoothing parameter.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Lower control bound.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub lower: f64,
    /// Upper control bound.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub upper: f64,
    /// Output file; the JSON goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl GenArgs {
    fn params(&self) -> GenParams {
        let m = self.m.unwrap_or(self.n);
        match self.kind {
            GenKind::Lasso => GenParams::Lasso {
                n: self.n,
                m,
                alpha: self.alpha,
            },
            GenKind::BoxQp => GenParams::BoxQp { n: self.n },
            GenKind::Huber => GenParams::HuberDenoise {
                n: self.n,
                gamma: self.gamma,
                alpha: self.alpha,
            },
            GenKind::Control => GenParams::Control {
                n: self.n,
                m,
                alpha: self.alpha,
                lower: self.lower,
                upper: self.upper,
            },
        }
    }
}

pub fn cmd_gen(args: &GenArgs, seed: u64) -> CmdResult {
    let spec = gen(&args.params(), seed).map_err(Failure::config)?;
    let json = spec.to_json().map_err(Failure::config)?;
    let (m, n) = spec.dims();
    let cond = spec.condition_estimate().map_err(|e| Failure::Runtime(e.into()))?;
    let summary = format!(
        "{}: n = {n}, m = {m}, seed = {seed}, condition estimate {cond:.6e}",
        spec.kind_name()
    );
    match &args.out {
        Some(path) => {
            write_file(path, &(json + "\n"))?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            println!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}
