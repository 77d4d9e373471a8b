//! `validate-fem`: run the finite-element validation battery.
//!
//! Each check prints one `PASS`/`FAIL` line with the measured value, the
//! expectation, and the tolerance. Any failure makes the command exit with
//! the numeric error code.

use checkerboard::fem::{FemEvaluator, HalfModelMesh};
use checkerboard::grid::Grid;
use checkerboard::microstructure::Microstructure;
use clap::Args;

use crate::config::{pick, resolve_grid, FileConfig};
use crate::error::{numeric_error, CliError};

/// Prescribed top-edge displacement for the direct solves; any positive
/// value works because every checked identity is displacement-invariant.
const APPLIED_DISPLACEMENT: f64 = 0.01;

#[derive(Debug, Args)]
pub struct ValidateFemArgs {
    /// Composite grid to validate on (4x2, 8x4, or 16x8).
    #[arg(long)]
    grid: Option<Grid>,
    /// Number of random microstructures for the sampled checks.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for the sampled microstructures.
    #[arg(long)]
    seed: Option<u64>,
    /// Scale one stiffness entry by (1 + REL) to demonstrate that the
    /// battery catches a broken assembly.
    #[arg(long, hide = true, value_name = "REL")]
    inject_perturbation: Option<f64>,
}

struct Battery {
    failures: usize,
    total: usize,
}

impl Battery {
    /// Relative-error check against a nonzero expectation.
    fn check_rel(&mut self, name: &str, measured: f64, expected: f64, tol: f64) {
        let rel = if measured.is_finite() {
            ((measured - expected) / expected).abs()
        } else {
            f64::INFINITY
        };
        let detail = format!(
            "measured {measured:.15e}, expected {expected:.15e}, rel err {rel:.3e} (tol {tol:.0e})"
        );
        self.report(name, rel <= tol, detail);
    }

    /// Magnitude-bound check for quantities that should vanish.
    fn check_bound(&mut self, name: &str, value: f64, bound: f64) {
        let ok = value.is_finite() && value.abs() <= bound;
        self.report(name, ok, format!("value {value:.3e} (bound {bound:.0e})"));
    }

    fn report(&mut self, name: &str, pass: bool, detail: String) {
        self.total += 1;
        if pass {
            println!("PASS {name}: {detail}");
        } else {
            self.failures += 1;
            println!("FAIL {name}: {detail}");
        }
    }
}

pub fn run(args: ValidateFemArgs, config: &FileConfig) -> Result<(), CliError> {
    let section = config.dataset_section();
    let grid = resolve_grid(args.grid, section.grid.as_deref())?.unwrap_or(Grid::G4x2);
    let samples = pick(args.samples, None, 20).check(|&s| s > 0, "--samples must be positive")?;
    let seed = pick(args.seed, None, 0).value;
    let materials = config.material_pair()?;
    let stiff_e = materials.stiff().youngs_modulus();
    let soft_e = materials.soft().youngs_modulus();

    let perturb = |mut evaluator: FemEvaluator| {
        if let Some(rel) = args.inject_perturbation {
            evaluator.inject_stiffness_perturbation(rel);
        }
        evaluator
    };
    let cracked = perturb(FemEvaluator::with_materials(grid, materials.clone()));
    let uncracked_mesh = HalfModelMesh::with_crack_elements(grid, 0)
        .map_err(|e| numeric_error("uncracked mesh", e))?;
    let uncracked = perturb(FemEvaluator::with_mesh(uncracked_mesh, materials.clone()));
    let scale = 3.7;
    let scaled_materials = materials
        .scaled_modulus(scale)
        .map_err(|e| numeric_error("scaled materials", e))?;
    let scaled = perturb(FemEvaluator::with_materials(grid, scaled_materials));

    let solve = |evaluator: &FemEvaluator, m: &Microstructure| {
        evaluator
            .solve_displacements(m, APPLIED_DISPLACEMENT)
            .map_err(|e| numeric_error("finite-element solve failed", e))
    };
    let evaluate = |evaluator: &FemEvaluator, m: &Microstructure| {
        evaluator
            .evaluate(m)
            .map_err(|e| numeric_error("finite-element evaluation failed", e))
    };

    let mut battery = Battery { failures: 0, total: 0 };

    // A homogeneous uncracked plate under uniaxial extension reproduces its
    // phase modulus exactly.
    let all_stiff = Microstructure::all_stiff(grid);
    let all_soft = Microstructure::all_soft(grid);
    battery.check_rel(
        "uncracked-modulus-stiff",
        evaluate(&uncracked, &all_stiff)?.modulus,
        stiff_e,
        1e-10,
    );
    battery.check_rel(
        "uncracked-modulus-soft",
        evaluate(&uncracked, &all_soft)?.modulus,
        soft_e,
        1e-10,
    );

    // With the crack present, homogeneous plates of the two phases share one
    // geometry, so their apparent moduli keep the phase-modulus ratio.
    let cracked_stiff = evaluate(&cracked, &all_stiff)?.modulus;
    let cracked_soft = evaluate(&cracked, &all_soft)?.modulus;
    battery.check_rel(
        "cracked-phase-modulus-ratio",
        cracked_stiff / cracked_soft,
        stiff_e / soft_e,
        1e-9,
    );

    // Scaling both phase moduli scales the apparent modulus linearly.
    let probe = Microstructure::random_uniform(grid, seed);
    battery.check_rel(
        "modulus-scaling",
        evaluate(&scaled, &probe)?.modulus / (scale * evaluate(&cracked, &probe)?.modulus),
        1.0,
        1e-12,
    );

    // Sampled identities: energy balance, solver residual, and the
    // toughness-strength-modulus relation.
    // NaN must count as a failure, so map it to infinity before max().
    let nan_to_inf = |x: f64| if x.is_nan() { f64::INFINITY } else { x };
    let mut worst_energy = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut worst_identity = 0.0f64;
    for i in 0..samples as u64 {
        let m = Microstructure::random_uniform(grid, seed.wrapping_add(i));
        let solution = solve(&cracked, &m)?;
        let work = solution.reaction_work();
        worst_energy = worst_energy.max(nan_to_inf(((solution.strain_energy() - work) / work).abs()));
        worst_residual = worst_residual.max(nan_to_inf(solution.residual_rel()));
        let props = evaluate(&cracked, &m)?;
        let identity = props.strength * props.strength / (2.0 * props.modulus);
        worst_identity =
            worst_identity.max(nan_to_inf(((props.toughness - identity) / props.toughness).abs()));
    }
    battery.check_bound("energy-balance", worst_energy, 1e-9);
    battery.check_bound("solver-residual", worst_residual, 1e-10);
    battery.check_bound("toughness-identity", worst_identity, 1e-12);

    if battery.failures > 0 {
        Err(CliError::Numeric(format!(
            "{} of {} validation checks failed",
            battery.failures, battery.total
        )))
    } else {
        println!("all {} validation checks passed", battery.total);
        Ok(())
    }
}
