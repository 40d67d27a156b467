//! The explicit stage-2 family: maps from the height-4 Morse towers to Ω_2 ∪ Ω̃_2.

use crate::error::Result;
use crate::pib::{transport, Interval, Mode, Pib, TplRef};
use crate::report::Check;
use crate::templates::{
    augmented_of, basic_predecessors, canonical, diminished_of, enumerate_basic, extra, missing, modified, Basic,
    Kind, Modification, Side, Template,
};
use crate::towers::{Level, System};

pub const K2: u32 = 2;

/// Range position hit by φ_{ω_j}: B_1 = B_2 = {2}, B_3 = B_4 = {1} (ω_j has cut j - 1).
pub fn b_of_cut(g: u128) -> i128 {
    match g {
        0 | 1 => 2,
        2 | 3 => 1,
        _ => panic!("stage 2 has cuts 0..3"),
    }
}

pub const A2: i128 = 2;

#[derive(Clone, Debug)]
pub struct Stage2Map {
    pub source: Template,
    pub target: Template,
    pub pib: Pib,
}

fn decorate(body: Pib) -> Pib {
    let (dom, ran) = (body.dom.clone(), body.ran.clone());
    Pib::decomposed(Mode::Disjoint, Pib::empty(), body, Pib::empty()).unwrap().with_templates(dom, ran)
}

/// φ_ω: 𝒫_2(bar) → ω for a basic ω.
pub fn phi_basic(bar: bool, w: &Basic) -> Pib {
    let i = Interval::new(0, 4);
    let src = canonical(System::Morse, K2, bar as u8).unwrap();
    let body = Pib::new(i, i, vec![(A2, b_of_cut(w.g))])
        .unwrap()
        .with_templates(Some(TplRef::new(src, 0)), Some(TplRef::new((*w).into(), 0)));
    decorate(body)
}

fn natural_pred(w: &Basic) -> Basic {
    basic_predecessors(w)[0]
}

/// The map into any template of Ω_2 ∪ Ω̃_2 from the matching source tower.
pub fn phi_for(bar: bool, target: &Template) -> Result<Pib> {
    let w = *target.base().expect("stage-2 targets are parametric");
    let reference = match target.kind {
        Kind::Basic => return Ok(phi_basic(bar, &w)),
        Kind::Diminished { side: Side::U, .. } | Kind::Augmented { side: Side::D, .. } => phi_basic(bar, &w),
        Kind::Diminished { side: Side::D, .. } | Kind::Augmented { side: Side::U, .. } => {
            phi_basic(bar, &natural_pred(&w))
        }
        Kind::Missing => {
            let base = phi_basic(bar, &w);
            let i = Interval::new(1, 4);
            let src = modified(System::Morse, K2, bar as u8, Modification::Missing)?;
            let body = Pib::new(i, i, base.pairs)?
                .with_templates(Some(TplRef::new(src, 1)), Some(TplRef::new(target.clone(), 1)));
            return Ok(decorate(body));
        }
        Kind::Extra { .. } => {
            let base = phi_basic(bar, &w);
            let i = Interval::new(0, 5);
            let body = Pib::new(i, i, base.pairs)?.with_templates(None, Some(TplRef::new(target.clone(), 0)));
            return Ok(decorate(body));
        }
        _ => return Err(crate::Error::InvalidTemplate(format!("{target} is not a stage-2 target"))),
    };
    Ok(decorate(transport(&reference, TplRef::new(target.clone(), 0))?))
}

/// Ω_2 (basic, diminished, augmented) followed by Ω̃_2 (missing, extra).
pub fn omega2() -> (Vec<Template>, Vec<Template>) {
    let mut main = vec![];
    let mut modified = vec![];
    for w in enumerate_basic(System::Odometer, K2) {
        main.push(w.into());
        main.extend(diminished_of(&w));
        main.extend(augmented_of(&w));
        modified.push(missing(&w).unwrap());
        modified.push(extra(&w, None).unwrap());
    }
    (main, modified)
}

pub fn build_stage2() -> Vec<Stage2Map> {
    let (main, modi) = omega2();
    let mut out = vec![];
    for bar in [false, true] {
        for t in main.iter().chain(&modi) {
            let pib = phi_for(bar, t).expect("stage-2 map defined");
            let sources: Vec<Template> = match t.kind {
                Kind::Missing => vec![modified(System::Morse, K2, bar as u8, Modification::Missing).unwrap()],
                Kind::Extra { .. } => [false, true]
                    .iter()
                    .map(|&j| modified(System::Morse, K2, bar as u8, Modification::Extra(Some(j))).unwrap())
                    .collect(),
                _ => vec![canonical(System::Morse, K2, bar as u8).unwrap()],
            };
            for s in sources {
                let mut p = pib.clone();
                let origin = if t.kind == Kind::Missing { 1 } else { 0 };
                p.dom = Some(TplRef::new(s.clone(), origin));
                out.push(Stage2Map { source: s, target: t.clone(), pib: p });
            }
        }
    }
    out
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, bad: impl Fn(&T) -> Option<String>) -> (u64, Option<String>) {
    let mut n = 0;
    let mut fail = None;
    for it in items {
        n += 1;
        if fail.is_none() {
            fail = bad(&it);
        }
    }
    (n, fail)
}

/// Exhaustive stage-2 checks.
pub fn verify_stage2() -> Vec<Check> {
    let fam = build_stage2();
    let basics: Vec<Basic> = enumerate_basic(System::Odometer, K2).collect();
    let mut out = vec![];

    let (n, f) = first_failure(basics.iter(), |w| {
        let p = phi_basic(false, w);
        let want = [2i128, 2, 1, 1][w.g as usize];
        (p.i != Interval::new(0, 4) || p.a() != vec![2] || p.b() != vec![want])
            .then(|| format!("cut {}: I={:?} A={:?} B={:?}", w.g, p.i, p.a(), p.b()))
    });
    out.push(Check::new("stage2 table (A = {2}, B_1 = B_2 = {2}, B_3 = B_4 = {1})", n, f));

    let in_omega = |t: &Template| !matches!(t.kind, Kind::Missing | Kind::Extra { .. });
    let (n, f) = first_failure(fam.iter().filter(|m| in_omega(&m.target)), |m| {
        let a = m.pib.a();
        (a.contains(&0) || a.contains(&3)).then(|| format!("{} has bottom or top in its domain", m.target))
    });
    out.push(Check::new("no bottom or top of the source in a domain", n, f));

    let (n, f) = first_failure(fam.iter().filter(|m| m.target.kind == Kind::Basic), |m| {
        let g = m.target.global_cut().unwrap() as i128;
        m.pib.b().contains(&g).then(|| format!("global cut of {} is in the range", m.target))
    });
    out.push(Check::new("global cut not in the range", n, f));

    let (n, f) = first_failure([false, true], |&bar| {
        let imgs: Vec<Option<Level>> = basics
            .iter()
            .map(|w| {
                let p = phi_basic(bar, w);
                p.image(A2).and_then(|b| p.ran.as_ref().unwrap().level(b)).map(|l| l.project(0).unwrap())
            })
            .collect();
        (imgs.iter().any(|x| x.is_none()) || imgs.windows(2).any(|w| w[0] != w[1]))
            .then(|| format!("good level of tower {bar} has images {imgs:?}"))
    });
    out.push(Check::new("good set: π∘ζ∘φ independent of ω", n, f));

    let (n, f) = first_failure(fam.iter(), |m| {
        let reference = match m.target.kind {
            Kind::Diminished { side: Side::U, .. } | Kind::Augmented { side: Side::D, .. } => {
                phi_basic(false, m.target.base().unwrap())
            }
            Kind::Diminished { side: Side::D, .. } | Kind::Augmented { side: Side::U, .. } => {
                phi_basic(false, &natural_pred(m.target.base().unwrap()))
            }
            _ => return None,
        };
        (!m.pib.matches(&reference).unwrap()).then(|| format!("{} does not match its reference", m.target))
    });
    out.push(Check::new("diminished/augmented maps match their references", n, f));

    let (n, f) = first_failure(basics.iter(), |w| {
        let wp = natural_pred(w);
        let lhs = phi_for(false, &crate::templates::diminished(w, Side::D, None).unwrap()).unwrap();
        let rhs = phi_for(false, &crate::templates::diminished(&wp, Side::U, None).unwrap()).unwrap();
        (!lhs.matches(&rhs).unwrap()).then(|| format!("cut {}", w.g))
    });
    out.push(Check::new("φ_{ω^-(d)} matches φ_{ω_p^-(u)}", n, f));

    let (n, f) = first_failure(basics.iter(), |w| {
        let wp = natural_pred(w);
        let lhs = phi_for(false, &crate::templates::augmented(w, Side::U, None).unwrap()).unwrap();
        let rhs = phi_for(false, &crate::templates::augmented(&wp, Side::D, None).unwrap()).unwrap();
        (!lhs.matches(&rhs).unwrap()).then(|| format!("cut {}", w.g))
    });
    out.push(Check::new("φ_{ω^+(u)} matches φ_{ω_p^+(d)}", n, f));

    let (n, f) = first_failure(basics.iter(), |w| {
        (!phi_basic(false, w).equivalent(&phi_basic(true, w))).then(|| format!("cut {}", w.g))
    });
    out.push(Check::new("φ_ω(0) equivalent to φ_ω(1)", n, f));

    let (n, f) = first_failure(fam.iter(), |m| {
        let want = match m.target.kind {
            Kind::Missing => Interval::new(1, 4),
            Kind::Extra { .. } => Interval::new(0, 5),
            _ => Interval::new(0, 4),
        };
        let ok = m.pib.i == want
            && m.pib.j == want
            && m.pib.ran.as_ref().unwrap().tpl.len() as i128 == want.len()
            && m.pib.decomposition_consistent().unwrap();
        (!ok).then(|| format!("{} has intervals {:?}", m.target, m.pib.i))
    });
    out.push(Check::new("interval sizes and trivial notes", n, f));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_stage2_checks_pass() {
        for c in verify_stage2() {
            assert!(c.passed, "{}: {:?}", c.name, c.counterexample);
        }
    }

    #[test]
    fn omega3_example() {
        let w3 = Basic::odometer(K2, 2);
        let p = phi_basic(false, &w3);
        let b = p.image(A2).unwrap();
        assert_eq!(p.ran.as_ref().unwrap().level(b), Some(Level::v(2, 3)));
        assert_eq!(p.dom.as_ref().unwrap().level(A2), Some(Level::u(2, 2)));
    }
}
