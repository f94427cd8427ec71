//! Minimal arena-based reverse-mode differentiation over scalars.
//!
//! Every node stores its value and the local partials with respect to its
//! parents; [`Tape::backward`] sweeps the arena once in reverse.

use crate::relgraph::ZERO_NORM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Default)]
pub struct Tape {
    values: Vec<f64>,
    spans: Vec<(u32, u32)>,
    parents: Vec<Var>,
    partials: Vec<f64>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, v: Var) -> f64 {
        self.values[v.0]
    }

    pub fn values_of(&self, vs: &[Var]) -> Vec<f64> {
        vs.iter().map(|&v| self.values[v.0]).collect()
    }

    /// Input or constant.
    pub fn leaf(&mut self, value: f64) -> Var {
        self.node(value, std::iter::empty())
    }

    pub fn leaves(&mut self, values: &[f64]) -> Vec<Var> {
        values.iter().map(|&v| self.leaf(v)).collect()
    }

    /// Node with the given value and `(parent, ∂value/∂parent)` pairs.
    pub fn node(&mut self, value: f64, parents: impl IntoIterator<Item = (Var, f64)>) -> Var {
        let start = self.parents.len();
        for (p, d) in parents {
            debug_assert!(p.0 < self.values.len());
            self.parents.push(p);
            self.partials.push(d);
        }
        self.spans.push((start as u32, self.parents.len() as u32));
        self.values.push(value);
        Var(self.values.len() - 1)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.node(self.value(a) + self.value(b), [(a, 1.0), (b, 1.0)])
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.node(self.value(a) - self.value(b), [(a, 1.0), (b, -1.0)])
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (x, y) = (self.value(a), self.value(b));
        self.node(x * y, [(a, y), (b, x)])
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        self.node(c * self.value(a), [(a, c)])
    }

    /// `Σ cᵢ·vᵢ`.
    pub fn linear(&mut self, terms: &[(Var, f64)]) -> Var {
        let value = terms.iter().map(|&(v, c)| c * self.value(v)).sum();
        self.node(value, terms.iter().copied())
    }

    pub fn mean(&mut self, vs: &[Var]) -> Var {
        let c = 1.0 / vs.len() as f64;
        let terms: Vec<(Var, f64)> = vs.iter().map(|&v| (v, c)).collect();
        self.linear(&terms)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let s = sigmoid(self.value(a));
        self.node(s, [(a, s * (1.0 - s))])
    }

    pub fn softmax(&mut self, xs: &[Var]) -> Vec<Var> {
        let max = xs.iter().map(|&v| self.value(v)).fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = xs.iter().map(|&v| (self.value(v) - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let ys: Vec<f64> = exps.iter().map(|e| e / sum).collect();
        (0..xs.len())
            .map(|i| {
                let parents: Vec<(Var, f64)> = xs
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| (x, ys[i] * (if i == j { 1.0 } else { 0.0 } - ys[j])))
                    .collect();
                self.node(ys[i], parents)
            })
            .collect()
    }

    /// Cosine similarity of two variable vectors; zero (with zero partials)
    /// when either norm is below [`ZERO_NORM`].
    pub fn cosine(&mut self, a: &[Var], b: &[Var]) -> Var {
        debug_assert_eq!(a.len(), b.len());
        let av = self.values_of(a);
        let bv = self.values_of(b);
        let (c, da, db) = cosine_with_partials(&av, &bv);
        let parents: Vec<(Var, f64)> = a.iter().copied().zip(da).chain(b.iter().copied().zip(db)).collect();
        self.node(c, parents)
    }

    /// Adjoints `∂output/∂v` for every node on the tape.
    pub fn backward(&self, output: Var) -> Vec<f64> {
        let mut adj = vec![0.0; self.values.len()];
        adj[output.0] = 1.0;
        for i in (0..=output.0).rev() {
            let g = adj[i];
            if g == 0.0 {
                continue;
            }
            let (s, e) = self.spans[i];
            for k in s as usize..e as usize {
                adj[self.parents[k].0] += g * self.partials[k];
            }
        }
        adj
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Cosine and its gradients with respect to both arguments.
pub(crate) fn cosine_with_partials(a: &[f64], b: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let (la, lb) = (na.sqrt(), nb.sqrt());
    if la < ZERO_NORM || lb < ZERO_NORM {
        return (0.0, vec![0.0; a.len()], vec![0.0; b.len()]);
    }
    let c = dot / (la * lb);
    let da = a.iter().zip(b).map(|(x, y)| y / (la * lb) - c * x / na).collect();
    let db = a.iter().zip(b).map(|(x, y)| x / (la * lb) - c * y / nb).collect();
    (c, da, db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn numeric(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize) -> f64 {
        let h = 1e-6;
        let (mut p, mut m) = (x.to_vec(), x.to_vec());
        p[i] += h;
        m[i] -= h;
        (f(&p) - f(&m)) / (2.0 * h)
    }

    #[test]
    fn arithmetic_gradients() {
        let mut t = Tape::new();
        let (a, b) = (t.leaf(2.0), t.leaf(-3.0));
        let p = t.mul(a, b);
        let s = t.sub(p, a);
        let q = t.scale(s, 0.5);
        let out = t.add(q, b);
        // out = 0.5·(ab − a) + b
        assert_eq!(t.value(out), 0.5 * (-6.0 - 2.0) - 3.0);
        let g = t.backward(out);
        assert_eq!(g[a.index()], 0.5 * (-3.0 - 1.0));
        assert_eq!(g[b.index()], 0.5 * 2.0 + 1.0);
    }

    #[test]
    fn zero_norm_cosine_is_flat() {
        let mut t = Tape::new();
        let a = t.leaves(&[0.0, 0.0]);
        let b = t.leaves(&[1.0, 2.0]);
        let c = t.cosine(&a, &b);
        assert_eq!(t.value(c), 0.0);
        assert!(t.backward(c).iter().enumerate().all(|(i, &g)| i == c.index() || g == 0.0));
    }

    proptest! {
        #[test]
        fn cosine_matches_finite_differences(x in proptest::collection::vec(-2.0f64..2.0, 6)) {
            prop_assume!(x[..3].iter().map(|v| v * v).sum::<f64>() > 0.1 && x[3..].iter().map(|v| v * v).sum::<f64>() > 0.1);
            let mut t = Tape::new();
            let vars = t.leaves(&x);
            let c = t.cosine(&vars[..3], &vars[3..]);
            let g = t.backward(c);
            let f = |v: &[f64]| crate::relgraph::cosine_similarity(&v[..3], &v[3..]).unwrap();
            for i in 0..6 {
                prop_assert!((g[vars[i].index()] - numeric(&f, &x, i)).abs() < 1e-6);
            }
        }

        #[test]
        fn softmax_and_sigmoid_match_finite_differences(x in proptest::collection::vec(-3.0f64..3.0, 7), pick in 0usize..7) {
            let mut t = Tape::new();
            let vars = t.leaves(&x);
            let ys = t.softmax(&vars);
            let s = t.sigmoid(ys[pick]);
            let total: f64 = ys.iter().map(|&y| t.value(y)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let g = t.backward(s);
            let f = |v: &[f64]| {
                let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = v.iter().map(|u| (u - m).exp()).sum();
                sigmoid((v[pick] - m).exp() / z)
            };
            for i in 0..7 {
                prop_assert!((g[vars[i].index()] - numeric(&f, &x, i)).abs() < 1e-7);
            }
        }
    }
}
