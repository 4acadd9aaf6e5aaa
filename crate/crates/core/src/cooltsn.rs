//! Mixed real/synthetic training math: segmental consensus, the two-head
//! softmax cross-entropy loss with its gradient, and mini-batch layout.
//!
//! The consensus vector is laid out as the real-dataset logits followed by
//! the synthetic-dataset logits. A sample only trains the head of its own
//! source; the other head's coordinates get zero loss and zero gradient.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BLOCK_SIZE: usize = 32;
pub const REAL_PER_BLOCK: usize = 22;
pub const SYNTHETIC_PER_BLOCK: usize = 10;
pub const BLOCKS_PER_BATCH: usize = 8;
pub const DEFAULT_SEGMENTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Real,
    Virtual,
}

impl std::str::FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "real" => Ok(Source::Real),
            "virtual" | "synthetic" => Ok(Source::Virtual),
            _ => Err(format!("unknown source '{s}'")),
        }
    }
}

/// Sizes of the two class sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSpace {
    pub real: usize,
    pub virtual_: usize,
}

impl ClassSpace {
    pub fn new(real: usize, virtual_: usize) -> Self {
        Self { real, virtual_ }
    }

    pub fn total(&self) -> usize {
        self.real + self.virtual_
    }

    /// Coordinate range of the head for `source`.
    pub fn head(&self, source: Source) -> std::ops::Range<usize> {
        match source {
            Source::Real => 0..self.real,
            Source::Virtual => self.real..self.total(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadWeights {
    pub real: f64,
    pub virtual_: f64,
}

impl HeadWeights {
    pub fn get(&self, source: Source) -> f64 {
        match source {
            Source::Real => self.real,
            Source::Virtual => self.virtual_,
        }
    }
}

impl Default for HeadWeights {
    /// The mini-batch proportions.
    fn default() -> Self {
        Self {
            real: REAL_PER_BLOCK as f64 / BLOCK_SIZE as f64,
            virtual_: SYNTHETIC_PER_BLOCK as f64 / BLOCK_SIZE as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossInput {
    pub consensus: Vec<f64>,
    /// Class index within the class set of `source`.
    pub label: usize,
    pub source: Source,
    pub classes: ClassSpace,
    pub weights: HeadWeights,
}

/// Average of the `K` snippet score vectors.
pub fn segmental_consensus(scores: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = scores
        .first()
        .ok_or_else(|| Error::ParameterDomain("consensus needs at least one snippet".into()))?;
    let n = first.len();
    let mut g = vec![0.0; n];
    for (k, s) in scores.iter().enumerate() {
        if s.len() != n {
            return Err(Error::ParameterDomain(format!(
                "snippet {k} has {} scores, expected {n}",
                s.len()
            )));
        }
        if let Some(x) = s.iter().find(|x| !x.is_finite()) {
            return Err(Error::ParameterDomain(format!("snippet {k} has non-finite score {x}")));
        }
        for (gi, si) in g.iter_mut().zip(s) {
            *gi += si;
        }
    }
    let k = scores.len() as f64;
    g.iter_mut().for_each(|x| *x /= k);
    Ok(g)
}

fn check(input: &LossInput) -> Result<std::ops::Range<usize>> {
    if input.consensus.len() != input.classes.total() {
        return Err(Error::ParameterDomain(format!(
            "consensus has {} entries, class space has {}",
            input.consensus.len(),
            input.classes.total()
        )));
    }
    let head = input.classes.head(input.source);
    if input.label >= head.len() {
        return Err(Error::LabelOutOfRange {
            label: input.label,
            size: head.len(),
        });
    }
    Ok(head)
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `w_z * (logsumexp(G over C_z) - G_y)`.
pub fn multitask_loss(input: &LossInput) -> Result<f64> {
    let head = check(input)?;
    let logits = &input.consensus[head.clone()];
    let w = input.weights.get(input.source);
    Ok(w * (log_sum_exp(logits) - logits[input.label]))
}

/// `w_z * (softmax(G over C_z) - y)` on the active head, zero elsewhere.
pub fn multitask_loss_gradient(input: &LossInput) -> Result<Vec<f64>> {
    let head = check(input)?;
    let logits = &input.consensus[head.clone()];
    let w = input.weights.get(input.source);
    let lse = log_sum_exp(logits);
    let mut grad = vec![0.0; input.consensus.len()];
    for (i, &g) in logits.iter().enumerate() {
        let y = if i == input.label { 1.0 } else { 0.0 };
        grad[head.start + i] = w * ((g - lse).exp() - y);
    }
    Ok(grad)
}

/// Indices into the real and synthetic pools, block by block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiniBatchBlock {
    pub real: Vec<usize>,
    pub synthetic: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiniBatchPlan {
    pub blocks: Vec<MiniBatchBlock>,
}

impl MiniBatchPlan {
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.real.len() + b.synthetic.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn draw_without_replacement<R: Rng + ?Sized>(rng: &mut R, pool: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pool).collect();
    for i in 0..k {
        let j = rng.random_range(i..pool);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Eight blocks of 22 real and 10 synthetic samples, no sample repeated
/// within the batch.
pub fn build_minibatch_plan<R: Rng + ?Sized>(
    rng: &mut R,
    real_pool: usize,
    synthetic_pool: usize,
) -> Result<MiniBatchPlan> {
    let need_real = REAL_PER_BLOCK * BLOCKS_PER_BATCH;
    let need_syn = SYNTHETIC_PER_BLOCK * BLOCKS_PER_BATCH;
    if real_pool < need_real {
        return Err(Error::InsufficientPool {
            pool: "real",
            needed: need_real,
            available: real_pool,
        });
    }
    if synthetic_pool < need_syn {
        return Err(Error::InsufficientPool {
            pool: "synthetic",
            needed: need_syn,
            available: synthetic_pool,
        });
    }
    let real = draw_without_replacement(rng, real_pool, need_real);
    let synthetic = draw_without_replacement(rng, synthetic_pool, need_syn);
    let blocks = real
        .chunks(REAL_PER_BLOCK)
        .zip(synthetic.chunks(SYNTHETIC_PER_BLOCK))
        .map(|(r, s)| MiniBatchBlock {
            real: r.to_vec(),
            synthetic: s.to_vec(),
        })
        .collect();
    Ok(MiniBatchPlan { blocks })
}

/// One snippet row of a score file: `sample,source,label,snippet,s0,s1,...`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnippetRow {
    pub sample: String,
    pub source: Source,
    pub label: usize,
    pub snippet: usize,
    pub scores: Vec<f64>,
}

pub fn read_snippet_csv<R: Read>(input: R) -> Result<Vec<SnippetRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedField(e.to_string()))?;
        let field = |i: usize| {
            record
                .get(i)
                .ok_or_else(|| Error::MalformedField(format!("row {}: missing column {i}", line + 1)))
        };
        let bad = |what: &str| Error::MalformedField(format!("row {}: bad {what}", line + 1));
        rows.push(SnippetRow {
            sample: field(0)?.to_owned(),
            source: field(1)?.parse().map_err(|_| bad("source"))?,
            label: field(2)?.parse().map_err(|_| bad("label"))?,
            snippet: field(3)?.parse().map_err(|_| bad("snippet"))?,
            scores: record
                .iter()
                .skip(4)
                .map(|s| s.parse::<f64>().map_err(|_| bad("score")))
                .collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleLoss {
    pub sample: String,
    pub source: Source,
    pub label: usize,
    pub loss: f64,
    pub gradient: Vec<f64>,
}

/// Group snippet rows by sample (in first-seen order), take the consensus
/// and evaluate loss and gradient.
pub fn evaluate_rows(rows: &[SnippetRow], classes: ClassSpace, weights: HeadWeights) -> Result<Vec<SampleLoss>> {
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.sample.as_str()) {
            order.push(&r.sample);
        }
    }
    order
        .into_iter()
        .map(|sample| {
            let group: Vec<&SnippetRow> = rows.iter().filter(|r| r.sample == sample).collect();
            let head = group[0];
            if group.iter().any(|r| r.source != head.source || r.label != head.label) {
                return Err(Error::MalformedField(format!(
                    "sample '{sample}' mixes sources or labels"
                )));
            }
            let scores: Vec<Vec<f64>> = group.iter().map(|r| r.scores.clone()).collect();
            let input = LossInput {
                consensus: segmental_consensus(&scores)?,
                label: head.label,
                source: head.source,
                classes,
                weights,
            };
            Ok(SampleLoss {
                sample: sample.to_owned(),
                source: head.source,
                label: head.label,
                loss: multitask_loss(&input)?,
                gradient: multitask_loss_gradient(&input)?,
            })
        })
        .collect()
}

pub fn write_loss_csv<W: Write>(losses: &[SampleLoss], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let width = losses.first().map_or(0, |l| l.gradient.len());
    let mut header = vec!["sample".to_owned(), "source".into(), "label".into(), "loss".into()];
    header.extend((0..width).map(|i| format!("d{i}")));
    let io = |e: csv::Error| Error::MalformedField(e.to_string());
    w.write_record(&header).map_err(io)?;
    for l in losses {
        let source = match l.source {
            Source::Real => "real",
            Source::Virtual => "virtual",
        };
        let mut rec = vec![l.sample.clone(), source.into(), l.label.to_string(), l.loss.to_string()];
        rec.extend(l.gradient.iter().map(|g| g.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::MalformedField(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedPath;

    fn input(consensus: Vec<f64>, label: usize, source: Source, classes: ClassSpace) -> LossInput {
        LossInput {
            consensus,
            label,
            source,
            classes,
            weights: HeadWeights {
                real: 1.0,
                virtual_: 1.0,
            },
        }
    }

    #[test]
    fn consensus_examples() {
        let g = segmental_consensus(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(g, vec![1.0, 1.0]);
        let v = vec![0.3, -1.2, 4.0];
        assert_eq!(segmental_consensus(&[v.clone(), v.clone(), v.clone()]).unwrap(), v);
        assert!(segmental_consensus(&[]).is_err());
    }

    #[test]
    fn uniform_logits_give_log_n() {
        let c = ClassSpace::new(101, 35);
        let l = multitask_loss(&input(vec![0.7; 136], 4, Source::Real, c)).unwrap();
        assert!((l - 101f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn other_head_is_untouched() {
        let c = ClassSpace::new(3, 2);
        let x = input(vec![0.1, 5.0, -2.0, 0.4, 0.9], 1, Source::Virtual, c);
        let g = multitask_loss_gradient(&x).unwrap();
        assert_eq!(&g[..3], &[0.0, 0.0, 0.0]);
        assert!((g[3] + g[4]).abs() < 1e-15);
        // changing the real head does not move the loss
        let mut y = x.clone();
        y.consensus[0] = 100.0;
        assert_eq!(multitask_loss(&x).unwrap(), multitask_loss(&y).unwrap());
    }

    #[test]
    fn loss_decreases_with_margin() {
        let c = ClassSpace::new(4, 1);
        let mut g = vec![0.0; 5];
        g[2] = 5.0;
        let l5 = multitask_loss(&input(g.clone(), 2, Source::Real, c)).unwrap();
        g[2] = 10.0;
        let l10 = multitask_loss(&input(g.clone(), 2, Source::Real, c)).unwrap();
        assert!(l10 < l5 && l10 > 0.0);
        g[2] = 1000.0;
        assert_eq!(multitask_loss(&input(g, 2, Source::Real, c)).unwrap(), 0.0);
    }

    #[test]
    fn label_out_of_range() {
        let c = ClassSpace::new(3, 2);
        let err = multitask_loss(&input(vec![0.0; 5], 2, Source::Virtual, c)).unwrap_err();
        assert!(matches!(err, Error::LabelOutOfRange { label: 2, size: 2 }));
    }

    #[test]
    fn minibatch_exact_pools_use_everything() {
        let mut rng = SeedPath::root(1).stream();
        let plan = build_minibatch_plan(&mut rng, 176, 80).unwrap();
        assert_eq!(plan.blocks.len(), 8);
        let mut real: Vec<usize> = plan.blocks.iter().flat_map(|b| b.real.clone()).collect();
        let mut syn: Vec<usize> = plan.blocks.iter().flat_map(|b| b.synthetic.clone()).collect();
        real.sort();
        syn.sort();
        assert_eq!(real, (0..176).collect::<Vec<_>>());
        assert_eq!(syn, (0..80).collect::<Vec<_>>());
        assert!(matches!(
            build_minibatch_plan(&mut rng, 100, 80),
            Err(Error::InsufficientPool {
                needed: 176,
                available: 100,
                ..
            })
        ));
    }

    #[test]
    fn csv_round() {
        let text = "sample,source,label,snippet,s0,s1,s2\n\
                    a,real,0,0,1,0,0\na,real,0,1,0,1,0\na,real,0,2,2,2,0\n\
                    b,virtual,0,0,0,0,3\n";
        let rows = read_snippet_csv(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 4);
        let losses = evaluate_rows(&rows, ClassSpace::new(2, 1), HeadWeights::default()).unwrap();
        assert_eq!(losses.len(), 2);
        assert!((losses[0].loss - 22.0 / 32.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(losses[1].loss, 0.0);
        let mut out = Vec::new();
        write_loss_csv(&losses, &mut out).unwrap();
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with("sample,source,label,loss,d0,d1,d2\n"));
    }
}
