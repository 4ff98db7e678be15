use crate::network::BayesianNetwork;

/// A table over a sorted set of variables, last variable fastest.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factor {
    pub vars: Vec<usize>,
    pub cards: Vec<usize>,
    pub values: Vec<f64>,
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * cards[i + 1];
    }
    out
}

/// Advances a mixed-radix counter (last position fastest); false on wrap.
#[inline]
fn advance(counter: &mut [usize], cards: &[usize]) -> bool {
    for pos in (0..counter.len()).rev() {
        counter[pos] += 1;
        if counter[pos] < cards[pos] {
            return true;
        }
        counter[pos] = 0;
    }
    false
}

impl Factor {
    pub fn scalar(value: f64) -> Self {
        Factor {
            vars: Vec::new(),
            cards: Vec::new(),
            values: vec![value],
        }
    }

    /// The CPT of `var` as a factor, restricted to the evidence in `observed`.
    pub fn from_cpt(bn: &BayesianNetwork, var: usize, observed: &[Option<usize>]) -> Self {
        let parents = bn.dag().parents(var);
        let cpt = bn.cpt(var);
        let mut vars: Vec<usize> = parents
            .iter()
            .copied()
            .chain(std::iter::once(var))
            .filter(|&v| observed[v].is_none())
            .collect();
        vars.sort_unstable();
        let cards: Vec<usize> = vars.iter().map(|&v| bn.schema().cardinality(v)).collect();
        let size: usize = cards.iter().product();

        let mut full: Vec<usize> = observed.iter().map(|o| o.unwrap_or(0)).collect();
        let mut counter = vec![0; vars.len()];
        let mut values = Vec::with_capacity(size);
        loop {
            for (&v, &l) in vars.iter().zip(&counter) {
                full[v] = l;
            }
            let row = cpt.row_index_unchecked(parents.iter().map(|&p| full[p]));
            values.push(cpt.probability(row, full[var]));
            if !advance(&mut counter, &cards) {
                break;
            }
        }
        Factor {
            vars,
            cards,
            values,
        }
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let cards: Vec<usize> = vars
            .iter()
            .map(|v| match self.vars.iter().position(|x| x == v) {
                Some(i) => self.cards[i],
                None => other.cards[other.vars.iter().position(|x| x == v).unwrap()],
            })
            .collect();
        // stride of each union variable inside each operand (0 when absent)
        let project = |f: &Factor| -> Vec<usize> {
            let s = strides(&f.cards);
            vars.iter()
                .map(|v| f.vars.iter().position(|x| x == v).map_or(0, |i| s[i]))
                .collect()
        };
        let sa = project(self);
        let sb = project(other);
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut counter = vec![0; vars.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        loop {
            values.push(self.values[ia] * other.values[ib]);
            // odometer step with incremental operand offsets
            let mut pos = vars.len();
            loop {
                if pos == 0 {
                    return Factor {
                        vars,
                        cards,
                        values,
                    };
                }
                pos -= 1;
                counter[pos] += 1;
                ia += sa[pos];
                ib += sb[pos];
                if counter[pos] < cards[pos] {
                    break;
                }
                ia -= sa[pos] * cards[pos];
                ib -= sb[pos] * cards[pos];
                counter[pos] = 0;
            }
        }
    }

    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(i) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let s = strides(&self.cards);
        let card = self.cards[i];
        let inner = s[i];
        let outer = self.values.len() / (card * inner);
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for l in 0..card {
                let base = (o * card + l) * inner;
                for k in 0..inner {
                    values[o * inner + k] += self.values[base + k];
                }
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(i);
        cards.remove(i);
        Factor {
            vars,
            cards,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(vars: &[usize], cards: &[usize], values: &[f64]) -> Factor {
        Factor {
            vars: vars.to_vec(),
            cards: cards.to_vec(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn product_aligns_shared_variables() {
        let a = f(&[0, 1], &[2, 2], &[1.0, 2.0, 3.0, 4.0]);
        let b = f(&[1, 2], &[2, 3], &[1.0, 10.0, 100.0, 2.0, 20.0, 200.0]);
        let p = a.product(&b);
        assert_eq!(p.vars, vec![0, 1, 2]);
        // (x0, x1, x2) -> a[x0,x1] * b[x1,x2]
        for x0 in 0..2 {
            for x1 in 0..2 {
                for x2 in 0..3 {
                    let got = p.values[(x0 * 2 + x1) * 3 + x2];
                    assert_eq!(got, a.values[x0 * 2 + x1] * b.values[x1 * 3 + x2]);
                }
            }
        }
        let s = Factor::scalar(2.0).product(&a);
        assert_eq!(s.values, vec![2.0, 4.0, 6.0, 8.0]);
    }

    #[test]
    fn sum_out_middle_variable() {
        let x = f(
            &[0, 1, 2],
            &[2, 3, 2],
            &(0..12).map(|i| i as f64).collect::<Vec<_>>(),
        );
        let y = x.sum_out(1);
        assert_eq!(y.vars, vec![0, 2]);
        assert_eq!(
            y.values,
            vec![
                0.0 + 2.0 + 4.0,
                1.0 + 3.0 + 5.0,
                6.0 + 8.0 + 10.0,
                7.0 + 9.0 + 11.0
            ]
        );
        assert_eq!(x.sum_out(9), x);
    }
}
