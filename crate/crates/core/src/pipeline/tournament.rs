use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentInput {
    pub list: Vec<Vec<f64>>,
    /// Clean samples from `N(μ, I)`.
    pub trusted: Vec<Vec<f64>>,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentOutcome {
    pub winner: Vec<f64>,
    pub index: usize,
    /// False when every candidate lost some test and the most-winning one was returned.
    pub undefeated: bool,
    pub wins: Vec<usize>,
    pub losses: Vec<usize>,
    /// Pairs `(i, j)` that were compared.
    pub tests: Vec<(usize, usize)>,
    pub seed: u64,
}

/// `⌈64 ln(L/δ) / ε²⌉`.
pub fn trusted_sample_size(list_len: usize, eps: f64, delta: f64) -> usize {
    (64.0 * (list_len as f64 / delta).ln().max(0.0) / (eps * eps)).ceil() as usize
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).find(|(x, y)| x != y).is_some_and(|(x, y)| x < y)
}

/// Pairwise sign tests on the trusted samples between candidates at least
/// `4ε` apart; returns a candidate that lost no test when one exists.
pub fn tournament(input: &TournamentInput, seed: u64) -> Result<TournamentOutcome> {
    let l = input.list.len();
    if l == 0 || input.trusted.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(input.eps > 0.0) {
        return Err(Error::InvalidParam(format!("eps must be positive, got {}", input.eps)));
    }
    let d = input.list[0].len();
    if let Some(p) = input.list.iter().chain(&input.trusted).find(|p| p.len() != d) {
        return Err(Error::DimMismatch { expected: d, actual: p.len() });
    }
    let m = input.trusted.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| input.trusted.iter().map(|x| x[j]).sum::<f64>() / m).collect();
    let mut wins = vec![0usize; l];
    let mut losses = vec![0usize; l];
    let mut tests = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            let (a, b) = (&input.list[i], &input.list[j]);
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let gap = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gap < 4.0 * input.eps {
                continue;
            }
            tests.push((i, j));
            // Mean of Y_k = ⟨X_k − (a+b)/2, (a−b)/‖a−b‖⟩.
            let y: f64 = mean
                .iter()
                .zip(a.iter().zip(b))
                .zip(&diff)
                .map(|((x, (p, q)), u)| (x - 0.5 * (p + q)) * u / gap)
                .sum();
            let i_wins = if y == 0.0 { lex_less(a, b) } else { y > 0.0 };
            let (w, lo) = if i_wins { (i, j) } else { (j, i) };
            wins[w] += 1;
            losses[lo] += 1;
        }
    }
    let (index, undefeated) = match (0..l).find(|&i| losses[i] == 0) {
        Some(i) => (i, true),
        None => {
            let best = (0..l).fold(0, |b, i| if wins[i] > wins[b] { i } else { b });
            (best, false)
        }
    };
    Ok(TournamentOutcome { winner: input.list[index].clone(), index, undefeated, wins, losses, tests, seed })
}
