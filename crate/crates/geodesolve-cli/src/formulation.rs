//! Formulation-specification strings accepted on the command line and in
//! benchmark configs, and the runner that executes one of them against one
//! instance.
//!
//! Assigned instances take the thirteen plain kind names (`quartic`,
//! `system1`, ..., `cycpushpull`) or a composite pipeline name
//! `{sdp|ddp|dualddp}_pca_<kind>`. Unassigned instances take
//! `uquarticcont` or `{umiddp|umidualddp}[_<kind>]`, where the optional
//! suffix picks the refinement kind (default `quartic`).

use geodesolve::formulations::{
    build_dgp, build_udgp_smooth, parse_dgp_formulation, BuildOpts, Cone, DgpKind, UdgpSmoothKind,
};
use geodesolve::instances::Instance;
use geodesolve::metrics::gphsim;
use geodesolve::pipelines::{
    dgp_pipeline, udgp_pipeline, MatrixRelax, PipelineConfig, PipelineError,
};
use geodesolve::smooth_solver::multistart;
use geodesolve::types::{Graph, SolveReport};

#[derive(Debug, Clone)]
pub enum FormulationSpec {
    /// Multistart on a smooth assigned kind.
    Plain(DgpKind, bool),
    /// Matrix relaxation, factorization, PCA, then refinement.
    Pipeline(MatrixRelax, DgpKind, bool),
    /// Multistart on the continuous unassigned reformulation.
    UdgpCont,
    /// Mixed-integer cone reconstruction, then multistart refinement.
    UdgpMilp(Cone, DgpKind, bool),
}

impl FormulationSpec {
    pub fn parse(name: &str) -> Result<FormulationSpec, String> {
        if name == "uquarticcont" {
            return Ok(FormulationSpec::UdgpCont);
        }
        for (prefix, cone) in [("umiddp", Cone::Dd), ("umidualddp", Cone::DualDd)] {
            if let Some(rest) = name.strip_prefix(prefix) {
                if rest.is_empty() {
                    return Ok(FormulationSpec::UdgpMilp(cone, DgpKind::Quartic, false));
                }
                if let Some(kind_name) = rest.strip_prefix('_') {
                    let (kind, cycles) =
                        parse_dgp_formulation(kind_name).map_err(|e| e.to_string())?;
                    return Ok(FormulationSpec::UdgpMilp(cone, kind, cycles));
                }
            }
        }
        for (prefix, relax) in [
            ("sdp_pca_", MatrixRelax::Sdp),
            ("ddp_pca_", MatrixRelax::Dd),
            ("dualddp_pca_", MatrixRelax::DualDd),
        ] {
            if let Some(kind_name) = name.strip_prefix(prefix) {
                let (kind, cycles) = parse_dgp_formulation(kind_name).map_err(|e| e.to_string())?;
                return Ok(FormulationSpec::Pipeline(relax, kind, cycles));
            }
        }
        let (kind, cycles) = parse_dgp_formulation(name).map_err(|e| e.to_string())?;
        Ok(FormulationSpec::Plain(kind, cycles))
    }
}

/// One executed run: the report plus the optional graph similarity versus a
/// reference graph.
pub struct RunOutcome {
    pub report: SolveReport,
    pub gphsim: Option<f64>,
}

/// Executes a formulation specification against an instance. `reference`
/// enables the similarity column for unassigned runs that reconstruct a
/// graph.
pub fn run_formulation(
    spec: &FormulationSpec,
    instance: &Instance,
    cfg: &PipelineConfig,
    reference: Option<&Graph>,
) -> Result<RunOutcome, String> {
    match (spec, instance) {
        (FormulationSpec::Plain(kind, cycles), Instance::Dgp(inst)) => {
            let opts = BuildOpts {
                cycle_constraints: *cycles,
                ..cfg.opts
            };
            let program = build_dgp(*kind, inst, &opts);
            let report = multistart(&program, &cfg.solver).map_err(|e| e.to_string())?;
            Ok(RunOutcome {
                report,
                gphsim: None,
            })
        }
        (FormulationSpec::Pipeline(relax, kind, cycles), Instance::Dgp(inst)) => {
            let mut cfg = cfg.clone();
            cfg.opts.cycle_constraints = *cycles;
            let out = dgp_pipeline(inst, *relax, *kind, &cfg).map_err(stringify)?;
            Ok(RunOutcome {
                report: out.report,
                gphsim: None,
            })
        }
        (FormulationSpec::UdgpCont, Instance::Udgp(inst)) => {
            let program = build_udgp_smooth(UdgpSmoothKind::UQuarticCont, inst, &cfg.opts)
                .map_err(|e| e.to_string())?;
            let report = multistart(&program, &cfg.solver).map_err(|e| e.to_string())?;
            let similarity = match (&report.assignment, reference) {
                (Some(a), Some(r)) => geodesolve::types::reconstruct_graph(inst, a)
                    .ok()
                    .map(|g| gphsim(&g, r)),
                _ => None,
            };
            Ok(RunOutcome {
                report,
                gphsim: similarity,
            })
        }
        (FormulationSpec::UdgpMilp(cone, kind, cycles), Instance::Udgp(inst)) => {
            let mut cfg = cfg.clone();
            cfg.opts.cycle_constraints = *cycles;
            let out = udgp_pipeline(inst, *cone, *kind, &cfg, reference).map_err(stringify)?;
            Ok(RunOutcome {
                report: out.report,
                gphsim: out.gphsim,
            })
        }
        (FormulationSpec::Plain(..) | FormulationSpec::Pipeline(..), Instance::Udgp(_)) => {
            Err("assigned formulation applied to an unassigned instance".into())
        }
        (FormulationSpec::UdgpCont | FormulationSpec::UdgpMilp(..), Instance::Dgp(_)) => {
            Err("unassigned formulation applied to an assigned instance".into())
        }
    }
}

fn stringify(e: PipelineError) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_name_families() {
        assert!(matches!(
            FormulationSpec::parse("quartic"),
            Ok(FormulationSpec::Plain(DgpKind::Quartic, false))
        ));
        assert!(matches!(
            FormulationSpec::parse("cycsys1"),
            Ok(FormulationSpec::Plain(DgpKind::CycSystem1, true))
        ));
        assert!(matches!(
            FormulationSpec::parse("sdp_pca_system2"),
            Ok(FormulationSpec::Pipeline(
                MatrixRelax::Sdp,
                DgpKind::System2,
                false
            ))
        ));
        assert!(matches!(
            FormulationSpec::parse("dualddp_pca_cyclesimple"),
            Ok(FormulationSpec::Pipeline(
                MatrixRelax::DualDd,
                DgpKind::CycleSimple,
                false
            ))
        ));
        assert!(matches!(
            FormulationSpec::parse("umidualddp"),
            Ok(FormulationSpec::UdgpMilp(
                Cone::DualDd,
                DgpKind::Quartic,
                false
            ))
        ));
        assert!(matches!(
            FormulationSpec::parse("umiddp_system2"),
            Ok(FormulationSpec::UdgpMilp(Cone::Dd, DgpKind::System2, false))
        ));
        assert!(matches!(
            FormulationSpec::parse("uquarticcont"),
            Ok(FormulationSpec::UdgpCont)
        ));
        assert!(FormulationSpec::parse("bogus").is_err());
    }
}
