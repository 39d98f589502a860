//! Normalized mutual information between community assignments.

use crate::{Error, Result};
use std::collections::HashMap;

/// NMI with arithmetic normalization, 2·I(A;B) / (H(A) + H(B)).
///
/// Assignments are positional over the same node set. A partition
/// with a single community has zero entropy; if only one side is
/// trivial the mutual information is zero and so is the score. When
/// both are trivial the 0/0 form is defined as 0.
pub fn nmi(a: &[u32], b: &[u32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let n = a.len() as f64;
    let ka = dense_count(a);
    let kb = dense_count(b);
    let mut joint = vec![0.0f64; ka * kb];
    let mut pa = vec![0.0f64; ka];
    let mut pb = vec![0.0f64; kb];
    for (&ca, &cb) in a.iter().zip(b) {
        joint[ca as usize * kb + cb as usize] += 1.0;
        pa[ca as usize] += 1.0;
        pb[cb as usize] += 1.0;
    }
    let h = |p: &[f64]| -> f64 {
        p.iter()
            .filter(|&&c| c > 0.0)
            .map(|&c| {
                let q = c / n;
                -q * q.ln()
            })
            .sum()
    };
    let (ha, hb) = (h(&pa), h(&pb));
    if ha == 0.0 && hb == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for ca in 0..ka {
        for cb in 0..kb {
            let c = joint[ca * kb + cb];
            if c > 0.0 {
                let p = c / n;
                mi += p * (p / (pa[ca] / n * (pb[cb] / n))).ln();
            }
        }
    }
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

fn dense_count(labels: &[u32]) -> usize {
    labels.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

/// NMI between partitions of two graphs that may cover different node
/// sets: restrict both to the keys they share and report how many
/// nodes that intersection has. Errors when it is empty.
pub fn nmi_aligned(
    keys_a: &[String],
    part_a: &[u32],
    keys_b: &[String],
    part_b: &[u32],
) -> Result<(f64, usize)> {
    let index_b: HashMap<&str, usize> = keys_b
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i))
        .collect();
    let mut la = Vec::new();
    let mut lb = Vec::new();
    for (i, key) in keys_a.iter().enumerate() {
        if let Some(&j) = index_b.get(key.as_str()) {
            la.push(part_a[i]);
            lb.push(part_b[j]);
        }
    }
    if la.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let shared = la.len();
    Ok((nmi(&la, &lb)?, shared))
}
