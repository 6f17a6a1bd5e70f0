use std::cmp::Ordering;

/// Dense exponent vector over a context. The all-zero vector is the
/// monomial 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub(crate) Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Weighted degree: sum of `weights[i] * exponent[i]`.
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as u32 * w)
            .sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Indices of variables with a positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }
}

/// Graded reverse lexicographic comparison with variable 0 largest.
pub fn grevlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => {}
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_basics() {
        // x > y > z
        let m = |e: [u16; 3]| e.to_vec();
        assert_eq!(grevlex_cmp(&m([1, 0, 0]), &m([0, 1, 0])), Ordering::Greater);
        // y^2 > x*z in grevlex
        assert_eq!(grevlex_cmp(&m([0, 2, 0]), &m([1, 0, 1])), Ordering::Greater);
        assert_eq!(grevlex_cmp(&m([0, 0, 3]), &m([2, 0, 0])), Ordering::Greater);
        assert_eq!(grevlex_cmp(&m([1, 1, 0]), &m([1, 1, 0])), Ordering::Equal);
    }

    #[test]
    fn divisibility_and_lcm() {
        let a = Monomial(vec![1, 2, 0]);
        let b = Monomial(vec![2, 2, 1]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert_eq!(a.quotient_of(&b), Monomial(vec![1, 0, 1]));
        assert_eq!(a.lcm(&Monomial(vec![0, 3, 1])), Monomial(vec![1, 3, 1]));
        assert!(Monomial(vec![1, 0, 0]).is_coprime(&Monomial(vec![0, 4, 1])));
    }
}
