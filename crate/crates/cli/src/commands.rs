use std::fmt::Write as _;

use zeno_ssep::fock::{self, build_annihilator, build_creator, Configuration, OperatorMatrix};
use zeno_ssep::hamiltonian::{build_hamiltonian, free_density_evolution, HamiltonianSpec, PotentialFamily};
use zeno_ssep::io;
use zeno_ssep::measurement::{
    repeated_measurement_distribution, sample_trajectory, transition_matrix, zeno_survival, Distribution, Spectrum,
    TransitionMatrix,
};
use zeno_ssep::ssep::{
    density_profile, empirical_distribution, gillespie_ensemble, heat_equation_reference, master_evolve,
};
use zeno_ssep::zeno::{
    generator_from_double_commutator, semigroup_limit_check, ssep_generator_closed_form, verify_potential_independence,
    zeno_scan, PerturbationSchedule,
};

use crate::output::Artifacts;
use crate::settings::Settings;
use crate::CliError;

pub const GENERATOR_TOL: f64 = 1e-9;
pub const CAR_TOL: f64 = 1e-12;

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn initial_distribution(s: &Settings, n_sites: usize) -> Result<Distribution, CliError> {
    match s.raw("distribution") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("--distribution {path:?}: {e}")))?;
            let q = io::parse_distribution(&text)
                .map_err(|e| CliError::Validation(format!("--distribution {path:?}: {e}")))?;
            if q.n_sites() != n_sites {
                return Err(CliError::Validation(format!(
                    "--distribution {path:?}: has {} sites, expected {n_sites}",
                    q.n_sites()
                )));
            }
            Ok(q)
        }
        None => Ok(Distribution::point(s.init(n_sites)?)),
    }
}

fn transition_triplets(u: &TransitionMatrix, n_sites: usize) -> Result<String, CliError> {
    let mut out = String::from("config_from,config_to,probability\n");
    let configs: Vec<Configuration> = Configuration::all(n_sites)?.collect();
    for from in &configs {
        for to in configs.iter().filter(|to| to.particle_count() == from.particle_count()) {
            let _ = writeln!(out, "{from},{to},{}", io::format_float(u.probability(*to, *from)));
        }
    }
    Ok(out)
}

pub fn car_check(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let identity = OperatorMatrix::identity(n)?;
    let mut csv = String::from("site_n,site_m,mixed_defect,pure_defect\n");
    let mut worst = 0.0f64;
    for i in 1..=n {
        let a_i = build_annihilator(i, n)?;
        for j in 1..=n {
            let a_j = build_annihilator(j, n)?;
            let c_j = build_creator(j, n)?;
            let mut mixed = a_i.anticommutator(&c_j);
            if i == j {
                mixed = &mixed - &identity;
            }
            let mixed = mixed.max_abs();
            let pure = a_i.anticommutator(&a_j).max_abs();
            worst = worst.max(mixed).max(pure);
            let _ = writeln!(csv, "{i},{j},{},{}", io::format_float(mixed), io::format_float(pure));
        }
    }
    artifacts.add("car_check.csv", csv);
    if worst >= CAR_TOL {
        return Err(CliError::Runtime(format!("anticommutation defect {} exceeds {CAR_TOL:e}", sci(worst))));
    }
    Ok(format!("N={n} dim={} max_defect = {} < {CAR_TOL:e}", fock::dimension(n), sci(worst)))
}

pub fn transition(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let t = s.positive("t", None)?;
    let spectrum = Spectrum::new(&build_hamiltonian(&s.spec(n)?))?;
    let u = transition_matrix(&spectrum, t);
    artifacts.add("transition.csv", transition_triplets(&u, n)?);
    Ok(format!("N={n} t={t} stochasticity_defect = {}", sci(u.stochasticity_defect())))
}

pub fn generator(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let x = generator_from_double_commutator(&build_hamiltonian(&s.spec(n)?))?;
    artifacts.add("generator.csv", io::write_generator(&x));
    if n < 3 {
        return Ok(format!("N={n} max_column_sum = {} (no exclusion-process reference below N=3)", sci(x.max_column_sum())));
    }
    let reference = ssep_generator_closed_form(n)?;
    artifacts.add("generator_ssep.csv", io::write_generator(&reference));
    let deviation = x.max_deviation(&reference)?;
    if deviation >= GENERATOR_TOL {
        return Err(CliError::Runtime(format!("max_deviation = {} exceeds {GENERATOR_TOL:e}", sci(deviation))));
    }
    Ok(format!("N={n} max_deviation = {} < {GENERATOR_TOL:e}", sci(deviation)))
}

pub fn independence(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let count: u64 = s.get_or("specs", 5)?;
    let width = s.get_or("w", 5.0)?;
    let base_seed = s.seed()?;
    let lambdas = s.list("lambdas")?.unwrap_or_else(|| vec![0.0, 1.0, -1.5, 2.0]);
    if count == 0 || lambdas.is_empty() {
        return Err(CliError::Validation("--specs and --lambdas must be nonempty".into()));
    }
    let mut specs = Vec::new();
    let mut csv = String::from("seed,lambda,potential\n");
    for i in 0..count {
        let seed = base_seed.wrapping_add(i);
        let potential = PotentialFamily::Uniform { width, seed }.sample(n)?;
        for &lambda in &lambdas {
            let joined: Vec<String> = potential.iter().map(|&v| io::format_float(v)).collect();
            let _ = writeln!(csv, "{seed},{},{}", io::format_float(lambda), joined.join(";"));
            specs.push(HamiltonianSpec::new(potential.clone(), lambda)?);
        }
    }
    let deviation = verify_potential_independence(&specs)?;
    artifacts.add("independence.csv", csv);
    if deviation >= GENERATOR_TOL {
        return Err(CliError::Runtime(format!("max_deviation = {} exceeds {GENERATOR_TOL:e}", sci(deviation))));
    }
    Ok(format!("N={n} hamiltonians={} max_deviation = {} < {GENERATOR_TOL:e}", specs.len(), sci(deviation)))
}

pub fn zeno_scan_cmd(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let tau = s.positive("tau", None)?;
    let ms: Vec<u64> = s.list("m")?.unwrap_or_else(|| vec![4, 8, 16, 32, 64]);
    let q0 = initial_distribution(s, n)?;
    let h = build_hamiltonian(&s.spec(n)?);
    let report = zeno_scan(&h, tau, &q0, &ms)?;
    let limit = generator_from_double_commutator(&h)?.spectral()?.evolve(&q0, tau)?;
    artifacts.add("zeno_scan.csv", io::write_convergence(&report));
    artifacts.add("zeno_limit.csv", io::write_distribution(&limit));
    let mut summary = report.summary.clone();
    for p in &report.points {
        let _ = write!(summary, "\nM={} L={} distance={}", p.m, p.steps, sci(p.distance));
    }
    Ok(summary)
}

pub fn zeno_survival_cmd(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let total = s.positive("total-time", Some(1.0))?;
    let ms: Vec<u64> = s.list("m")?.unwrap_or_else(|| vec![1, 2, 4, 8, 16, 32, 64, 128]);
    let x0 = s.init(n)?;
    let spectrum = Spectrum::new(&build_hamiltonian(&s.spec(n)?))?;
    let mut csv = String::from("M,survival,deficit\n");
    let mut last = 0.0;
    for &m in &ms {
        let p = zeno_survival(&spectrum, total, m, x0)?;
        let _ = writeln!(csv, "{m},{},{}", io::format_float(p), io::format_float(1.0 - p));
        last = p;
    }
    artifacts.add("zeno_survival.csv", csv);
    Ok(format!("N={n} T={total} x0={x0} survival(M={}) = {last:.6}", ms.last().copied().unwrap_or(0)))
}

pub fn lemma_check(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let x = ssep_generator_closed_form(n)?;
    let ks: Vec<u64> = s.list("ks")?.unwrap_or_else(|| vec![10, 100, 1000, 10000]);
    let schedule = match s.get::<f64>("alpha")? {
        Some(alpha) => Some(PerturbationSchedule::new(s.get_or("scale", 1.0)?, alpha, s.seed()?)?),
        None => None,
    };
    let errors = semigroup_limit_check(x.matrix(), schedule, &ks)?;
    let mut csv = String::from("K,error\n");
    for &(k, e) in &errors {
        let _ = writeln!(csv, "{k},{}", io::format_float(e));
    }
    artifacts.add("lemma_check.csv", csv);
    let listed: Vec<String> = errors.iter().map(|&(k, e)| format!("K={k} error={}", sci(e))).collect();
    Ok(listed.join("\n"))
}

pub fn ssep_compare(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let tau = s.positive("tau", None)?;
    let count: u64 = s.get_or("trajectories", 10_000)?;
    if count == 0 {
        return Err(CliError::Validation("--trajectories must be positive".into()));
    }
    let x0 = s.init(n)?;
    let samples = gillespie_ensemble(x0, tau, count, s.seed()?)?;
    let empirical = empirical_distribution(n, &samples)?;
    let master = master_evolve(&ssep_generator_closed_form(n)?, &Distribution::point(x0), tau)?;
    let tv = empirical.total_variation(&master)?;
    artifacts.add("ssep_samples.csv", io::write_samples(&samples));
    artifacts.add("ssep_empirical.csv", io::write_distribution(&empirical));
    artifacts.add("ssep_master.csv", io::write_distribution(&master));
    Ok(format!("N={n} tau={tau} trajectories={count} total_variation = {}", sci(tv)))
}

pub fn density(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let tau = s.positive("tau", None)?;
    let m = s.list::<u64>("m")?.and_then(|ms| ms.last().copied()).unwrap_or(16);
    if m == 0 {
        return Err(CliError::Validation("--m must be positive".into()));
    }
    let x0 = s.init(n)?;
    let q0 = Distribution::point(x0);
    let spectrum = Spectrum::new(&build_hamiltonian(&s.spec(n)?))?;
    let m = m as f64;
    let measured = density_profile(&repeated_measurement_distribution(&spectrum, 1.0 / m, tau * m, &q0)?);
    let ssep = density_profile(&master_evolve(&ssep_generator_closed_form(n)?, &q0, tau)?);
    let heat = heat_equation_reference(&density_profile(&q0), tau)?;
    let free = free_density_evolution(&spectrum, x0, &[tau * m])?.remove(0);
    artifacts.add("density_measured.csv", io::write_density(&measured));
    artifacts.add("density_ssep.csv", io::write_density(&ssep));
    artifacts.add("density_heat.csv", io::write_density(&heat));
    artifacts.add("density_free.csv", io::write_density(&free));
    Ok(format!(
        "N={n} tau={tau} M={m} |measured-ssep| = {} |ssep-heat| = {}",
        sci(measured.max_deviation(&ssep)),
        sci(ssep.max_deviation(&heat))
    ))
}

pub fn trajectory(s: &Settings, artifacts: &mut Artifacts) -> Result<String, CliError> {
    let n = s.n_sites()?;
    let t = s.positive("t", None)?;
    let steps: usize = s.require("steps")?;
    let x0 = s.init(n)?;
    let spectrum = Spectrum::new(&build_hamiltonian(&s.spec(n)?))?;
    let record = sample_trajectory(&transition_matrix(&spectrum, t), steps, x0, s.seed()?)?;
    artifacts.add("trajectory.csv", io::write_record(&record));
    Ok(format!("N={n} t={t} steps={steps} final={}", record.last()))
}
