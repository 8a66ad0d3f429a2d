//! A minimal injective resolution `F2 -> I_0 -> I_1 -> ...` by free
//! A(1)-modules on generators `e_{s,k}` in degree `k`.

use crate::algebra::Word;
use crate::f2linalg;
use crate::module::{direct_sum_all, suspend, A1Module, Element, GradedMap, GradedSpace, ModuleError};

/// Degrees `k` of the generators `e_{s,k}` of `I_s`.
pub fn injective_generators(s: u32) -> Vec<i32> {
    let si = s as i32;
    let jmax = match s % 4 {
        0 => si / 2,
        1 | 3 => (si - 1) / 2,
        _ => (si - 2) / 2,
    };
    let mut ks: Vec<i32> = (0..=jmax).map(|j| -si - 4 * j - 6).collect();
    match s % 4 {
        1 => ks.push(-5 - 3 * si),
        2 => ks.push(-4 - 3 * si),
        _ => {}
    }
    ks
}

#[derive(Clone, Debug)]
pub struct InjectiveStage {
    pub s: u32,
    pub module: A1Module,
    /// `(k, e_{s,k})`.
    pub generators: Vec<(i32, Element)>,
    /// `f_s : I_{s-1} -> I_s`, or the augmentation `F2 -> I_0` when `s = 0`.
    pub map: GradedMap,
}

#[derive(Clone, Debug)]
pub struct InjectiveResolution {
    pub f2: A1Module,
    pub stages: Vec<InjectiveStage>,
}

fn free_on(s: u32, ks: &[i32]) -> (A1Module, Vec<(i32, Element)>) {
    let parts: Vec<A1Module> = ks
        .iter()
        .map(|&k| {
            let f = A1Module::free();
            let labels = f.space().degrees().map(|d| f.labels(d).iter().map(|w| format!("{w}·e{s},{k}")).collect()).collect();
            let relabelled = A1Module::new(
                GradedSpace::new(f.lo(), labels),
                |d| f.sq(crate::algebra::Sq::Sq1, d).into_owned(),
                |d| f.sq(crate::algebra::Sq::Sq2, d).into_owned(),
                None,
            )
            .unwrap();
            suspend(&relabelled, k)
        })
        .collect();
    let m = direct_sum_all(&parts);
    let gens = ks.iter().map(|&k| (k, m.element(&format!("1·e{s},{k}")).unwrap())).collect();
    (m, gens)
}

impl InjectiveStage {
    pub fn generator(&self, k: i32) -> Option<&Element> {
        self.generators.iter().find(|(d, _)| *d == k).map(|(_, e)| e)
    }

    /// `r_s = Sq2Sq1Sq2 e_{s,-s-6}`.
    pub fn r(&self) -> Element {
        let e = self.generator(-(self.s as i32) - 6).expect("bottom generator");
        self.module.act_word(Word::SQ2SQ1SQ2, e)
    }

    /// `t_s = Sq1 r_s`.
    pub fn t(&self) -> Element {
        self.module.act(crate::algebra::Sq::Sq1, &self.r())
    }
}

pub fn build_injective(max_s: u32) -> Result<InjectiveResolution, ModuleError> {
    let f2 = A1Module::f2();
    let mut stages: Vec<InjectiveStage> = Vec::new();
    for s in 0..=max_s {
        let (module, generators) = free_on(s, &injective_generators(s));
        let map = if s == 0 {
            let e = &generators[0].1;
            let t0 = module.act_word(Word::TOP, e);
            f2.map_from_generators(&module, 0, &[(f2.basis_element(0, 0), t0)])?
        } else {
            let prev: &InjectiveStage = &stages[s as usize - 1];
            let mut images = Vec::new();
            for (k, e) in &prev.generators {
                let mut v = module.zero_element(*k);
                for (w, offset) in [(Word::SQ1, 1), (Word::SQ2, 2), (Word::SQ2SQ1, 3), (Word::SQ2SQ1SQ2, 5)] {
                    if let Some((_, g)) = generators.iter().find(|(d, _)| *d == k - offset) {
                        v = v.add(&module.act_word(w, g));
                    }
                }
                images.push((e.clone(), v));
            }
            prev.module.map_from_generators(&module, 0, &images)?
        };
        stages.push(InjectiveStage { s, module, generators, map });
    }
    Ok(InjectiveResolution { f2, stages })
}

impl InjectiveResolution {
    /// `f_{s+1} ∘ f_s = 0`, including the augmentation.
    pub fn is_complex(&self) -> bool {
        self.stages.windows(2).all(|w| w[0].map.then(&w[1].map).is_zero())
    }

    /// Stages `s < max_s` at which `ker f_{s+1} ≠ im f_s`.
    pub fn exactness_failures(&self) -> Vec<(u32, i32)> {
        let mut out = Vec::new();
        for w in self.stages.windows(2) {
            let (here, next) = (&w[0], &w[1]);
            for k in here.module.space().degrees() {
                let ker = next.map.kernel(k);
                let im = f2linalg::image(&here.map.block(k));
                if ker != im {
                    out.push((here.s, k));
                }
            }
        }
        out
    }
}
