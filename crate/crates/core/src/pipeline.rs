//! End-to-end run: split off the Coxeter part, pick a subgroup `H` avoiding
//! CoxObs, recheck conspiciality of `Pi- = Rot . H`, build the graph
//! product and verify the embedding on ball samples.

use serde::Serialize;

use crate::action::{
    compute_coxobs, compute_obs, decompose, find_conspicial_subgroup, ObstructionSetSummary,
};
use crate::cayley::CayleyBall;
use crate::embedding::{build_target, verify_embedding, EmbeddingReport, PiMinus};
use crate::error::Result;
use crate::hyperplanes::Hyperplanes;
use crate::presentation::VertexType;

/// Upper bound on the product pairs checked by `verify_embedding`.
pub const DEFAULT_PRODUCT_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub psi: Vec<String>,
    pub coxeter_order: usize,
    pub coxobs: Vec<String>,
    pub subgroup: Vec<String>,
    pub index: usize,
    pub obs: ObstructionSetSummary,
    pub target: serde_json::Value,
    pub target_presentation: String,
    /// Type C vertex groups whose order is not 2.
    pub bad_coxeter_vertices: Vec<usize>,
    pub self_transverse: Vec<usize>,
    pub embedding: EmbeddingReport,
}

impl PipelineReport {
    /// No determined failure anywhere.
    pub fn passed(&self) -> bool {
        self.obs.members.is_empty()
            && self.bad_coxeter_vertices.is_empty()
            && self.self_transverse.is_empty()
            && self.embedding.passed()
    }

    pub fn undetermined(&self) -> usize {
        self.obs.undetermined + self.embedding.undetermined
    }
}

pub fn run_pipeline(ball: &CayleyBall, hyps: &Hyperplanes, max_products: usize, seed: u64) -> Result<PipelineReport> {
    let spec = ball.spec();
    let dec = decompose(ball, hyps)?;
    let coxobs = compute_coxobs(&dec)?;
    let h = find_conspicial_subgroup(&dec, &coxobs)?;
    let pim = PiMinus::new(&dec, h)?;
    let show = |w: &crate::Word| w.display(spec).to_string();
    let elements: Vec<_> = pim
        .trusted_elements(ball)?
        .into_iter()
        .filter(|g| !g.is_empty())
        .collect();
    let obs = compute_obs(ball, hyps, &elements)?;
    let target = build_target(ball, hyps, &pim)?;
    let bad_coxeter_vertices = target
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VertexType::C && v.order() != 2)
        .map(|(i, _)| i)
        .collect();
    let mut sample = vec![crate::Word::identity()];
    sample.extend(elements.iter().cloned());
    let embedding = verify_embedding(ball, hyps, &pim, &target, &sample, max_products, seed)?;
    Ok(PipelineReport {
        psi: dec.psi.iter().map(|&v| spec.vertex_name(v).to_string()).collect(),
        coxeter_order: pim.coxeter.order(),
        coxobs: coxobs
            .vertices()
            .into_iter()
            .map(|x| show(&pim.coxeter.word_in_gamma(x)))
            .collect(),
        subgroup: pim.h.iter().map(|&x| show(&pim.coxeter.word_in_gamma(x))).collect(),
        index: pim.index(),
        obs: ObstructionSetSummary::new(&obs, ball),
        target: target.to_json(ball),
        target_presentation: target.to_spec()?.to_text(),
        bad_coxeter_vertices,
        self_transverse: target.self_transverse.clone(),
        embedding,
    })
}
