//! The flat, sectioned key-value experiment configuration format.
//!
//! A config is plain text with `[section]` headers, `key = value` lines, and
//! `#` comments. Recognized sections: `[space]`, `[problem]`, `[solver]`,
//! `[analysis]`. Lists are comma separated; resistor edges use `i-j` pairs.
//! `auto` is accepted where documented and resolved before the run; the
//! resolved values are echoed into the output directory so a run is fully
//! reproducible from its artifacts.
//!
//! ```text
//! [space]
//! # all optional; validated against the problem's model space
//! dimension = 2
//! p = 2
//! r = 2
//! c_p = 1            # number, or `estimate` to sample it
//! g_q = 1
//! estimate_samples = 10000
//!
//! [problem]
//! kind = diagonal          # diagonal | monomial | resistor
//! singular_values = 1,1    # diagonal
//! ground_truth = 0.1,0.1   # optional
//! # m = 1.5                # monomial (plus dimension, design_radius)
//! # boundary_nodes = 3     # resistor (plus interior_nodes, edges, conductances)
//!
//! [solver]
//! mu = auto                # auto = 0.9 x admissible supremum
//! rho_sq = auto            # explicit value required when eps = 0
//! variant = standard       # standard | unshifted
//! schedule = power         # zero | power | geometric | adaptive
//! beta_base = 0.05
//! beta_decay = 2.0         # power exponent, or geometric/adaptive ratio
//! beta_max = 0.4
//! smoothness_c = 0.05      # adaptive only
//! max_iterations = 10000
//! residual_tolerance = 0
//! gamma_tolerance = 1e-8
//! u0 = zero                # zero | comma list
//! allow_mu_override = false
//!
//! [analysis]
//! checks = recursion,envelope,order,product   # default: all applicable
//! burn_in = 0.2
//! seed = 42
//! stability_samples = 500
//! stability_ball_radius = 10.0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::constants;
use crate::problems::{DiagonalLinear, ForwardProblem, Monomial, ResistorNetwork};
use crate::solver::{BetaKind, BetaSchedule, IterationVariant, SolverConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ConstSpec {
    Value(f64),
    Estimate,
}

#[derive(Debug, Clone, Default)]
pub struct SpaceSection {
    pub dimension: Option<usize>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub c_p: Option<ConstSpec>,
    pub g_q: Option<ConstSpec>,
    pub estimate_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSection {
    Diagonal {
        singular_values: Vec<f64>,
        ground_truth: Option<Vec<f64>>,
    },
    Monomial {
        dimension: usize,
        m: f64,
        ground_truth: Option<Vec<f64>>,
        design_radius: Option<f64>,
    },
    Resistor {
        boundary_nodes: usize,
        interior_nodes: usize,
        edges: Vec<(usize, usize)>,
        conductances: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AutoOr {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum U0Spec {
    Zero,
    Coeffs(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SolverSection {
    pub mu: AutoOr,
    pub rho_sq: Option<AutoOr>,
    pub variant: IterationVariant,
    pub schedule_kind: String,
    pub beta_base: Option<f64>,
    pub beta_decay: Option<f64>,
    pub beta_max: Option<f64>,
    pub smoothness_c: Option<f64>,
    pub max_iterations: usize,
    pub residual_tolerance: f64,
    pub gamma_tolerance: f64,
    pub u0: U0Spec,
    pub allow_mu_override: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Recursion,
    Envelope,
    Order,
    Product,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Recursion => "recursion",
            CheckKind::Envelope => "envelope",
            CheckKind::Order => "order",
            CheckKind::Product => "product",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisSection {
    pub checks: Option<Vec<CheckKind>>,
    pub burn_in: f64,
    pub seed: u64,
    pub stability_samples: usize,
    pub stability_ball_radius: Option<f64>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            checks: None,
            burn_in: 0.2,
            seed: 42,
            stability_samples: 500,
            stability_ball_radius: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub space: SpaceSection,
    pub problem: ProblemSection,
    pub solver: SolverSection,
    pub analysis: AnalysisSection,
}

/// A config with every `auto` resolved and the problem constructed.
pub struct ResolvedRun {
    pub problem: Box<dyn ForwardProblem>,
    pub solver: SolverConfig,
    pub analysis: AnalysisSection,
    /// Effective ball radius of the run.
    pub rho_sq: f64,
    /// Canonical echo of the fully resolved configuration.
    pub resolved_text: String,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct RawSection {
    entries: Vec<(String, String, usize)>,
}

impl RawSection {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let pos = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, v, line) = self.entries.remove(pos);
        Some((v, line))
    }

    fn ensure_consumed(&self, section: &str) -> Result<()> {
        if let Some((k, _, line)) = self.entries.first() {
            return Err(Error::Parse {
                line: *line,
                message: format!("unknown key `{k}` in section [{section}]"),
            });
        }
        Ok(())
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, RawSection>> {
    let mut sections: BTreeMap<String, RawSection> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !matches!(name.as_str(), "space" | "problem" | "solver" | "analysis") {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown section [{name}]"),
                });
            }
            sections.entry(name.clone()).or_insert(RawSection {
                entries: Vec::new(),
            });
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let section = current.clone().ok_or(Error::Parse {
            line: line_no,
            message: "key-value line before any [section] header".to_string(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let entries = &mut sections.get_mut(&section).expect("section exists").entries;
        if entries.iter().any(|(k, _, _)| *k == key) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
        entries.push((key, value, line_no));
    }
    Ok(sections)
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, got `{value}`"),
    })
}

fn parse_usize(value: &str, line: usize) -> Result<usize> {
    value.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a nonnegative integer, got `{value}`"),
    })
}

fn parse_bool(value: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Parse {
            line,
            message: format!("expected true/false, got `{value}`"),
        }),
    }
}

fn parse_f64_list(value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|tok| parse_f64(tok.trim(), line))
        .collect()
}

fn parse_edges(value: &str, line: usize) -> Result<Vec<(usize, usize)>> {
    value
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (a, b) = tok.split_once('-').ok_or(Error::Parse {
                line,
                message: format!("expected edge `i-j`, got `{tok}`"),
            })?;
            Ok((parse_usize(a.trim(), line)?, parse_usize(b.trim(), line)?))
        })
        .collect()
}

/// Parse a config text; errors carry the offending line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut sections = split_sections(text)?;

    let space = match sections.remove("space") {
        Some(mut raw) => {
            let parse_const = |entry: Option<(String, usize)>| -> Result<Option<ConstSpec>> {
                match entry {
                    None => Ok(None),
                    Some((v, line)) => {
                        if v == "estimate" {
                            Ok(Some(ConstSpec::Estimate))
                        } else {
                            Ok(Some(ConstSpec::Value(parse_f64(&v, line)?)))
                        }
                    }
                }
            };
            let section = SpaceSection {
                dimension: raw
                    .take("dimension")
                    .map(|(v, l)| parse_usize(&v, l))
                    .transpose()?,
                p: raw.take("p").map(|(v, l)| parse_f64(&v, l)).transpose()?,
                r: raw.take("r").map(|(v, l)| parse_f64(&v, l)).transpose()?,
                c_p: parse_const(raw.take("c_p"))?,
                g_q: parse_const(raw.take("g_q"))?,
                estimate_samples: raw
                    .take("estimate_samples")
                    .map(|(v, l)| parse_usize(&v, l))
                    .transpose()?,
            };
            raw.ensure_consumed("space")?;
            section
        }
        None => SpaceSection::default(),
    };

    let mut raw_problem = sections
        .remove("problem")
        .ok_or_else(|| Error::Config("missing required [problem] section".into()))?;
    let (kind, kind_line) = raw_problem
        .take("kind")
        .ok_or_else(|| Error::Config("[problem] section needs a `kind`".into()))?;
    let problem = match kind.as_str() {
        "diagonal" => {
            let (sv, line) = raw_problem
                .take("singular_values")
                .ok_or_else(|| Error::Config("diagonal problem needs `singular_values`".into()))?;
            ProblemSection::Diagonal {
                singular_values: parse_f64_list(&sv, line)?,
                ground_truth: raw_problem
                    .take("ground_truth")
                    .map(|(v, l)| parse_f64_list(&v, l))
                    .transpose()?,
            }
        }
        "monomial" => {
            let (dim, dl) = raw_problem
                .take("dimension")
                .ok_or_else(|| Error::Config("monomial problem needs `dimension`".into()))?;
            let (m, ml) = raw_problem
                .take("m")
                .ok_or_else(|| Error::Config("monomial problem needs `m`".into()))?;
            ProblemSection::Monomial {
                dimension: parse_usize(&dim, dl)?,
                m: parse_f64(&m, ml)?,
                ground_truth: raw_problem
                    .take("ground_truth")
                    .map(|(v, l)| parse_f64_list(&v, l))
                    .transpose()?,
                design_radius: raw_problem
                    .take("design_radius")
                    .map(|(v, l)| parse_f64(&v, l))
                    .transpose()?,
            }
        }
        "resistor" => {
            let (b, bl) = raw_problem
                .take("boundary_nodes")
                .ok_or_else(|| Error::Config("resistor problem needs `boundary_nodes`".into()))?;
            let (i, il) = raw_problem
                .take("interior_nodes")
                .ok_or_else(|| Error::Config("resistor problem needs `interior_nodes`".into()))?;
            let (e, el) = raw_problem
                .take("edges")
                .ok_or_else(|| Error::Config("resistor problem needs `edges`".into()))?;
            let (c, cl) = raw_problem
                .take("conductances")
                .ok_or_else(|| Error::Config("resistor problem needs `conductances`".into()))?;
            ProblemSection::Resistor {
                boundary_nodes: parse_usize(&b, bl)?,
                interior_nodes: parse_usize(&i, il)?,
                edges: parse_edges(&e, el)?,
                conductances: parse_f64_list(&c, cl)?,
            }
        }
        other => {
            return Err(Error::Parse {
                line: kind_line,
                message: format!("unknown problem kind `{other}` (diagonal | monomial | resistor)"),
            })
        }
    };
    raw_problem.ensure_consumed("problem")?;

    let mut raw_solver = sections
        .remove("solver")
        .ok_or_else(|| Error::Config("missing required [solver] section".into()))?;
    let mu = match raw_solver.take("mu") {
        None => AutoOr::Auto,
        Some((v, line)) => {
            if v == "auto" {
                AutoOr::Auto
            } else {
                AutoOr::Value(parse_f64(&v, line)?)
            }
        }
    };
    let rho_sq = match raw_solver.take("rho_sq") {
        None => None,
        Some((v, line)) => Some(if v == "auto" {
            AutoOr::Auto
        } else {
            AutoOr::Value(parse_f64(&v, line)?)
        }),
    };
    let variant = match raw_solver.take("variant") {
        None => IterationVariant::Standard,
        Some((v, line)) => match v.as_str() {
            "standard" => IterationVariant::Standard,
            "unshifted" => IterationVariant::Unshifted,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown variant `{other}` (standard | unshifted)"),
                })
            }
        },
    };
    let schedule_kind = match raw_solver.take("schedule") {
        None => "zero".to_string(),
        Some((v, _)) => v,
    };
    let u0 = match raw_solver.take("u0") {
        None => U0Spec::Zero,
        Some((v, line)) => {
            if v == "zero" {
                U0Spec::Zero
            } else {
                U0Spec::Coeffs(parse_f64_list(&v, line)?)
            }
        }
    };
    let solver = SolverSection {
        mu,
        rho_sq,
        variant,
        schedule_kind,
        beta_base: raw_solver
            .take("beta_base")
            .map(|(v, l)| parse_f64(&v, l))
            .transpose()?,
        beta_decay: raw_solver
            .take("beta_decay")
            .map(|(v, l)| parse_f64(&v, l))
            .transpose()?,
        beta_max: raw_solver
            .take("beta_max")
            .map(|(v, l)| parse_f64(&v, l))
            .transpose()?,
        smoothness_c: raw_solver
            .take("smoothness_c")
            .map(|(v, l)| parse_f64(&v, l))
            .transpose()?,
        max_iterations: raw_solver
            .take("max_iterations")
            .map(|(v, l)| parse_usize(&v, l))
            .transpose()?
            .unwrap_or(10_000),
        residual_tolerance: raw_solver
            .take("residual_tolerance")
            .map(|(v, l)| parse_f64(&v, l))
            .transpose()?
            .unwrap_or(0.0),
        gamma_tolerance: raw_solver
            .take("gamma_tolerance")
            .map(|(v, l)| parse_f64(&v, l))
            .transpose()?
            .unwrap_or(0.0),
        u0,
        allow_mu_override: raw_solver
            .take("allow_mu_override")
            .map(|(v, l)| parse_bool(&v, l))
            .transpose()?
            .unwrap_or(false),
    };
    raw_solver.ensure_consumed("solver")?;

    let analysis = match sections.remove("analysis") {
        Some(mut raw) => {
            let checks = match raw.take("checks") {
                None => None,
                Some((v, line)) => Some(
                    v.split(',')
                        .map(|tok| match tok.trim() {
                            "recursion" => Ok(CheckKind::Recursion),
                            "envelope" => Ok(CheckKind::Envelope),
                            "order" => Ok(CheckKind::Order),
                            "product" => Ok(CheckKind::Product),
                            other => Err(Error::Parse {
                                line,
                                message: format!("unknown check `{other}`"),
                            }),
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
            };
            let section = AnalysisSection {
                checks,
                burn_in: raw
                    .take("burn_in")
                    .map(|(v, l)| parse_f64(&v, l))
                    .transpose()?
                    .unwrap_or(0.2),
                seed: raw
                    .take("seed")
                    .map(|(v, l)| parse_usize(&v, l))
                    .transpose()?
                    .unwrap_or(42) as u64,
                stability_samples: raw
                    .take("stability_samples")
                    .map(|(v, l)| parse_usize(&v, l))
                    .transpose()?
                    .unwrap_or(500),
                stability_ball_radius: raw
                    .take("stability_ball_radius")
                    .map(|(v, l)| parse_f64(&v, l))
                    .transpose()?,
            };
            raw.ensure_consumed("analysis")?;
            section
        }
        None => AnalysisSection::default(),
    };

    Ok(ExperimentConfig {
        space,
        problem,
        solver,
        analysis,
    })
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

impl ExperimentConfig {
    fn domain_dimension(&self) -> usize {
        match &self.problem {
            ProblemSection::Diagonal {
                singular_values, ..
            } => singular_values.len(),
            ProblemSection::Monomial { dimension, .. } => *dimension,
            ProblemSection::Resistor { edges, .. } => edges.len(),
        }
    }

    fn build_problem(
        &self,
        domain_constants: Option<(f64, f64)>,
    ) -> Result<Box<dyn ForwardProblem>> {
        Ok(match &self.problem {
            ProblemSection::Diagonal {
                singular_values,
                ground_truth,
            } => {
                let truth = ground_truth
                    .clone()
                    .unwrap_or_else(|| vec![0.1; singular_values.len()]);
                Box::new(DiagonalLinear::with_space_constants(
                    singular_values.clone(),
                    truth,
                    domain_constants,
                )?)
            }
            ProblemSection::Monomial {
                dimension,
                m,
                ground_truth,
                design_radius,
            } => Box::new(Monomial::with_space_constants(
                *dimension,
                *m,
                ground_truth.clone(),
                *design_radius,
                domain_constants,
            )?),
            ProblemSection::Resistor {
                boundary_nodes,
                interior_nodes,
                edges,
                conductances,
            } => Box::new(ResistorNetwork::with_space_constants(
                *boundary_nodes,
                *interior_nodes,
                edges.clone(),
                conductances.clone(),
                domain_constants,
            )?),
        })
    }

    /// Build just the problem (with space constants resolved), without
    /// resolving the solver section. Used by `check-constants`/`estimate`.
    pub fn resolve_problem(&self, seed_override: Option<u64>) -> Result<Box<dyn ForwardProblem>> {
        let seed = seed_override.unwrap_or(self.analysis.seed);
        let dimension = self.domain_dimension();

        // Space constants: explicit values, `estimate`, or the problem's own.
        let needs_estimate = matches!(self.space.c_p, Some(ConstSpec::Estimate))
            || matches!(self.space.g_q, Some(ConstSpec::Estimate));
        let estimated = if needs_estimate {
            let p = self.space.p.unwrap_or(2.0);
            let r = self.space.r.unwrap_or(p);
            let provisional = crate::geometry::SpaceGeometry::new(dimension, p, r, None, 1.0, 1.0)?;
            Some(crate::geometry::estimate_convexity_constants(
                &provisional,
                self.space.estimate_samples.unwrap_or(10_000),
                seed,
            )?)
        } else {
            None
        };
        let resolve_const = |spec: &Option<ConstSpec>, estimated_value: Option<f64>| match spec {
            Some(ConstSpec::Value(v)) => Some(*v),
            Some(ConstSpec::Estimate) => estimated_value,
            None => None,
        };
        let c_p = resolve_const(&self.space.c_p, estimated.map(|e| e.0));
        let g_q = resolve_const(&self.space.g_q, estimated.map(|e| e.1));
        let domain_constants = match (c_p, g_q) {
            (None, None) => None,
            (cp, gq) => Some((cp.unwrap_or(1.0), gq.unwrap_or(1.0))),
        };
        self.build_problem(domain_constants)
    }

    /// Resolve every `auto`, estimate space constants when asked, build the
    /// problem and the solver configuration.
    pub fn resolve(&self, seed_override: Option<u64>) -> Result<ResolvedRun> {
        let seed = seed_override.unwrap_or(self.analysis.seed);
        let problem = self.resolve_problem(seed_override)?;
        let space = problem.domain_space().clone();

        // Validate the [space] section against what the problem fixed.
        if let Some(dim) = self.space.dimension {
            if dim != space.dimension() {
                return Err(Error::Config(format!(
                    "[space] dimension {dim} does not match the problem's model space ({})",
                    space.dimension()
                )));
            }
        }
        if let Some(p) = self.space.p {
            if (p - space.p()).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "[space] p = {p} does not match the problem's model space (p = {})",
                    space.p()
                )));
            }
        }
        if let Some(r) = self.space.r {
            if (r - space.r()).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "[space] r = {r} does not match the problem's model space (r = {})",
                    space.r()
                )));
            }
        }

        let consts = problem.constants();
        let mu = match self.solver.mu {
            AutoOr::Value(v) => v,
            AutoOr::Auto => {
                let bound = if consts.stability_eps == 0.0 {
                    constants::mu_max_eps0(&space, consts)?
                } else {
                    constants::mu_max(&space, consts)
                };
                0.9 * bound
            }
        };
        let rho_sq = match self.solver.rho_sq {
            None | Some(AutoOr::Auto) => None,
            Some(AutoOr::Value(v)) => Some(v),
        };

        // Emitted betas must stay within min(admissibility bound, beta_max, 1)
        // whenever the bound exists (it needs C_p > p).
        let mut schedule = self.build_schedule()?;
        if let Ok(bound) = constants::beta_admissible_max(&space) {
            schedule = schedule.clamp_beta_max(bound);
        }
        let u0 = match &self.solver.u0 {
            U0Spec::Zero => space.zero_primal(),
            U0Spec::Coeffs(coeffs) => space
                .primal(coeffs.clone())
                .map_err(|e| Error::Config(format!("u0 does not fit the model space: {e}")))?,
        };

        let solver = SolverConfig {
            mu,
            schedule,
            variant: self.solver.variant,
            max_iterations: self.solver.max_iterations,
            residual_tolerance: self.solver.residual_tolerance,
            gamma_tolerance: self.solver.gamma_tolerance,
            u0,
            rho_sq,
            allow_mu_override: self.solver.allow_mu_override,
            record_iterates: false,
        };

        let rho_eff = crate::solver::effective_rho_sq(problem.as_ref(), solver.rho_sq)?;
        let mut analysis = self.analysis.clone();
        analysis.seed = seed;
        let resolved_text = self.render_resolved(problem.as_ref(), &solver, rho_eff, &analysis);
        Ok(ResolvedRun {
            problem,
            solver,
            analysis,
            rho_sq: rho_eff,
            resolved_text,
        })
    }

    fn build_schedule(&self) -> Result<BetaSchedule> {
        let s = &self.solver;
        let beta_max = s.beta_max.unwrap_or(0.4);
        match s.schedule_kind.as_str() {
            "zero" => Ok(BetaSchedule::zero()),
            "power" => BetaSchedule::power(
                s.beta_base
                    .ok_or_else(|| Error::Config("power schedule needs beta_base".into()))?,
                s.beta_decay.unwrap_or(2.0),
                beta_max,
            ),
            "geometric" => BetaSchedule::geometric(
                s.beta_base
                    .ok_or_else(|| Error::Config("geometric schedule needs beta_base".into()))?,
                s.beta_decay.ok_or_else(|| {
                    Error::Config("geometric schedule needs beta_decay (the ratio)".into())
                })?,
                beta_max,
            ),
            "adaptive" => BetaSchedule::adaptive(
                s.beta_base
                    .ok_or_else(|| Error::Config("adaptive schedule needs beta_base".into()))?,
                s.beta_decay.ok_or_else(|| {
                    Error::Config("adaptive schedule needs beta_decay (the ratio)".into())
                })?,
                s.smoothness_c
                    .ok_or_else(|| Error::Config("adaptive schedule needs smoothness_c".into()))?,
                beta_max,
            ),
            other => Err(Error::Config(format!(
                "unknown schedule `{other}` (zero | power | geometric | adaptive)"
            ))),
        }
    }

    fn render_resolved(
        &self,
        problem: &dyn ForwardProblem,
        solver: &SolverConfig,
        rho_eff: f64,
        analysis: &AnalysisSection,
    ) -> String {
        let space = problem.domain_space();
        let mut out = String::from("# resolved configuration: auto fields substituted\n");
        let _ = writeln!(out, "[space]");
        let _ = writeln!(out, "dimension = {}", space.dimension());
        let _ = writeln!(out, "p = {}", space.p());
        let _ = writeln!(out, "r = {}", space.r());
        let _ = writeln!(out, "c_p = {}", space.c_p());
        let _ = writeln!(out, "g_q = {}", space.g_q());
        let _ = writeln!(out, "[problem]");
        match &self.problem {
            ProblemSection::Diagonal {
                singular_values, ..
            } => {
                let _ = writeln!(out, "kind = diagonal");
                let _ = writeln!(out, "singular_values = {}", join_floats(singular_values));
                let truth = problem
                    .ground_truth()
                    .expect("shipped problems carry truth");
                let _ = writeln!(out, "ground_truth = {}", join_floats(truth.coeffs()));
            }
            ProblemSection::Monomial {
                m, design_radius, ..
            } => {
                let _ = writeln!(out, "kind = monomial");
                let _ = writeln!(out, "dimension = {}", space.dimension());
                let _ = writeln!(out, "m = {m}");
                let truth = problem
                    .ground_truth()
                    .expect("shipped problems carry truth");
                let _ = writeln!(out, "ground_truth = {}", join_floats(truth.coeffs()));
                let _ = writeln!(out, "design_radius = {}", design_radius.unwrap_or(0.3));
            }
            ProblemSection::Resistor {
                boundary_nodes,
                interior_nodes,
                edges,
                conductances,
            } => {
                let _ = writeln!(out, "kind = resistor");
                let _ = writeln!(out, "boundary_nodes = {boundary_nodes}");
                let _ = writeln!(out, "interior_nodes = {interior_nodes}");
                let edges_text: Vec<String> =
                    edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                let _ = writeln!(out, "edges = {}", edges_text.join(","));
                let _ = writeln!(out, "conductances = {}", join_floats(conductances));
            }
        }
        let _ = writeln!(out, "[solver]");
        let _ = writeln!(out, "mu = {}", solver.mu);
        let _ = writeln!(out, "rho_sq = {rho_eff}");
        let _ = writeln!(
            out,
            "variant = {}",
            match solver.variant {
                IterationVariant::Standard => "standard",
                IterationVariant::Unshifted => "unshifted",
            }
        );
        match solver.schedule.kind() {
            BetaKind::Zero => {
                let _ = writeln!(out, "schedule = zero");
            }
            BetaKind::Power { base, exponent } => {
                let _ = writeln!(out, "schedule = power");
                let _ = writeln!(out, "beta_base = {base}");
                let _ = writeln!(out, "beta_decay = {exponent}");
                let _ = writeln!(out, "beta_max = {}", solver.schedule.beta_max());
            }
            BetaKind::Geometric { base, ratio } => {
                let _ = writeln!(out, "schedule = geometric");
                let _ = writeln!(out, "beta_base = {base}");
                let _ = writeln!(out, "beta_decay = {ratio}");
                let _ = writeln!(out, "beta_max = {}", solver.schedule.beta_max());
            }
            BetaKind::Adaptive {
                base,
                ratio,
                smoothness_c,
            } => {
                let _ = writeln!(out, "schedule = adaptive");
                let _ = writeln!(out, "beta_base = {base}");
                let _ = writeln!(out, "beta_decay = {ratio}");
                let _ = writeln!(out, "smoothness_c = {smoothness_c}");
                let _ = writeln!(out, "beta_max = {}", solver.schedule.beta_max());
            }
        }
        let _ = writeln!(out, "max_iterations = {}", solver.max_iterations);
        let _ = writeln!(out, "residual_tolerance = {}", solver.residual_tolerance);
        let _ = writeln!(out, "gamma_tolerance = {}", solver.gamma_tolerance);
        let _ = writeln!(out, "u0 = {}", join_floats(solver.u0.coeffs()));
        let _ = writeln!(out, "allow_mu_override = {}", solver.allow_mu_override);
        let _ = writeln!(out, "[analysis]");
        if let Some(checks) = &analysis.checks {
            let names: Vec<&str> = checks.iter().map(|c| c.as_str()).collect();
            let _ = writeln!(out, "checks = {}", names.join(","));
        }
        let _ = writeln!(out, "burn_in = {}", analysis.burn_in);
        let _ = writeln!(out, "seed = {}", analysis.seed);
        let _ = writeln!(out, "stability_samples = {}", analysis.stability_samples);
        if let Some(radius) = analysis.stability_ball_radius {
            let _ = writeln!(out, "stability_ball_radius = {radius}");
        }
        out
    }
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// The example configurations shipped with the crate (also used by the
/// `verify` subcommand and the test suite).
pub mod shipped {
    pub const DIAG_HILBERT: &str = include_str!("../configs/diag_hilbert.cfg");
    pub const DIAG_ADAPTIVE: &str = include_str!("../configs/diag_adaptive.cfg");
    pub const MONOMIAL_M15: &str = include_str!("../configs/monomial_m15.cfg");
    pub const MONOMIAL_M15_ADAPTIVE: &str = include_str!("../configs/monomial_m15_adaptive.cfg");
    pub const MONOMIAL_M2_EPS0: &str = include_str!("../configs/monomial_m2_eps0.cfg");
    pub const RESISTOR_Y: &str = include_str!("../configs/resistor_y.cfg");

    /// `(name, text)` for every shipped config.
    pub fn all() -> Vec<(&'static str, &'static str)> {
        vec![
            ("diag_hilbert", DIAG_HILBERT),
            ("diag_adaptive", DIAG_ADAPTIVE),
            ("monomial_m15", MONOMIAL_M15),
            ("monomial_m15_adaptive", MONOMIAL_M15_ADAPTIVE),
            ("monomial_m2_eps0", MONOMIAL_M2_EPS0),
            ("resistor_y", RESISTOR_Y),
        ]
    }
}
