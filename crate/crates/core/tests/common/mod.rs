//! Random model generation shared by the DSL property tests and the
//! acceptance suite.

use funrep::dsl::{NetDecl, PolicyDecl, StageDecl};
use funrep::{FamilyRule, FiniteDomain, Model, ParamFamily};
use rand::seq::SliceRandom;
use rand::Rng;

/// A valid random model whose domains have at most `max_n` ordinary
/// elements.
pub fn random_model<R: Rng>(rng: &mut R, max_n: usize) -> Model {
    let mut model = Model::new();

    let mut domains = Vec::new();
    for k in 0..rng.gen_range(0..=3) {
        let n = rng.gen_range(1..=max_n);
        let domain = if rng.gen_bool(0.5) {
            FiniteDomain::with_null(format!("M{k}"), n).unwrap()
        } else {
            FiniteDomain::plain(format!("Z{k}"), n).unwrap()
        };
        model.add_domain(domain.clone()).unwrap();
        domains.push(domain);
    }
    if domains.is_empty() {
        return model;
    }

    for k in 0..rng.gen_range(0..=4) {
        let domain = domains.choose(rng).unwrap().clone();
        let name = format!("f{k}");
        let family = loop {
            if let Ok(f) = ParamFamily::new(name.clone(), domain.clone(), random_rule(rng, &domain)) {
                break f;
            }
        };
        model.add_family(family).unwrap();
    }

    let families: Vec<(String, usize)> = model
        .families()
        .iter()
        .map(|(name, f)| (name.clone(), f.size()))
        .collect();
    if families.is_empty() {
        return model;
    }
    for k in 0..rng.gen_range(0..=6) {
        let (family, size) = families.choose(rng).unwrap();
        model.add_fr(&format!("r{k}"), family, rng.gen_range(0..*size)).unwrap();
    }

    let mut by_domain: Vec<Vec<String>> = Vec::new();
    for domain in &domains {
        let frs: Vec<String> = model
            .frs()
            .iter()
            .filter(|(_, decl)| model.family(&decl.family).unwrap().domain() == domain)
            .map(|(name, _)| name.clone())
            .collect();
        if !frs.is_empty() {
            by_domain.push(frs);
        }
    }
    for k in 0..rng.gen_range(0..=3) {
        let Some(frs) = by_domain.choose(rng) else { break };
        let has_null = model.fr(&frs[0]).unwrap().domain().null_index().is_some();
        let stages = (0..rng.gen_range(1..=4))
            .map(|_| random_stage(rng, frs, has_null))
            .collect();
        model.add_net(&format!("n{k}"), NetDecl { stages }).unwrap();
    }
    model
}

fn random_rule<R: Rng>(rng: &mut R, domain: &FiniteDomain) -> FamilyRule {
    let m = domain.base_size() as i64;
    match rng.gen_range(0..7) {
        0 => FamilyRule::AffineMod {
            a: rng.gen_range(1..m.max(2)),
        },
        1 => FamilyRule::MulMod,
        2 => FamilyRule::PolyMod { e: rng.gen_range(2..5) },
        3 => FamilyRule::ThresholdMemory {
            theta: rng.gen_range(0..3),
        },
        4 => FamilyRule::QuantizedNeuron { s: rng.gen_range(1..4) },
        5 => FamilyRule::HybridMemory {
            theta: rng.gen_range(0..3),
            s: rng.gen_range(1..4),
        },
        _ => {
            let n = domain.size();
            FamilyRule::Table {
                matrix: (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect()).collect(),
            }
        }
    }
}

fn random_stage<R: Rng>(rng: &mut R, frs: &[String], has_null: bool) -> StageDecl {
    if rng.gen_bool(0.6) {
        return StageDecl::Single(frs.choose(rng).unwrap().clone());
    }
    let count = rng.gen_range(1..=frs.len());
    let members: Vec<String> = frs.choose_multiple(rng, count).cloned().collect();
    let policy = match rng.gen_range(0..3) {
        0 => PolicyDecl::First,
        1 if has_null => PolicyDecl::Best,
        _ => {
            let mut order = members.clone();
            order.shuffle(rng);
            PolicyDecl::Priority(order)
        }
    };
    StageDecl::Parallel { frs: members, policy }
}
