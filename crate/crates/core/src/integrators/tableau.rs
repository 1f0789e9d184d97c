//! Butcher tableaus of the stiffly accurate DIRK methods and BDF coefficients.

use crate::error::{Error, Result};

const TABLEAU_TOL: f64 = 1e-12;

/// Lower-triangular, stiffly accurate Butcher tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Tableau {
    /// Validates row sums, lower-triangular shape, stiff accuracy and positive diagonal.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let s = b.len();
        if s == 0 || a.len() != s || c.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidParameter(format!(
                "tableau shapes disagree: A has {} rows, b has {}, c has {}",
                a.len(),
                s,
                c.len()
            )));
        }
        if a.iter()
            .flatten()
            .chain(&b)
            .chain(&c)
            .any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite {
                context: "Butcher tableau".into(),
            });
        }
        for (i, row) in a.iter().enumerate() {
            if row[i + 1..].iter().any(|&x| x != 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tableau row {i} has entries above the diagonal"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - c[i]).abs() > TABLEAU_TOL {
                return Err(Error::InvalidParameter(format!(
                    "row {i} sums to {sum}, expected c = {}",
                    c[i]
                )));
            }
            if !(row[i] > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry a[{i}][{i}] = {} must be positive",
                    row[i]
                )));
            }
        }
        if a[s - 1]
            .iter()
            .zip(&b)
            .any(|(x, y)| (x - y).abs() > TABLEAU_TOL)
        {
            return Err(Error::InvalidParameter(
                "tableau is not stiffly accurate: last row of A differs from b".into(),
            ));
        }
        Ok(Self { a, b, c })
    }

    /// One-stage implicit Euler.
    pub fn implicit_euler() -> Self {
        Self::new(vec![vec![1.0]], vec![1.0], vec![1.0]).expect("implicit Euler tableau")
    }

    /// Two-stage L-stable DIRK with `alpha = 1 - sqrt(2)/2`.
    pub fn dirk2() -> Self {
        let alpha = 1.0 - std::f64::consts::SQRT_2 / 2.0;
        Self::new(
            vec![vec![alpha, 0.0], vec![1.0 - alpha, alpha]],
            vec![1.0 - alpha, alpha],
            vec![alpha, 1.0],
        )
        .expect("DIRK2 tableau")
    }

    /// Three-stage third-order DIRK with `gamma = 3/10`, `gamma_2 = 13/3`, `b_2 = -3/710`, `c_2 = 8/3`.
    pub fn dirk3() -> Self {
        Self::dirk3_family(0.3, 13.0 / 3.0, -3.0 / 710.0, 8.0 / 3.0).expect("DIRK3 tableau")
    }

    /// The family with `c_1 = b_3 = gamma` and second-stage diagonal `gamma_2`.
    pub fn dirk3_family(gamma: f64, gamma2: f64, b2: f64, c2: f64) -> Result<Self> {
        let b1 = 1.0 - b2 - gamma;
        Self::new(
            vec![
                vec![gamma, 0.0, 0.0],
                vec![c2 - gamma2, gamma2, 0.0],
                vec![b1, b2, gamma],
            ],
            vec![b1, b2, gamma],
            vec![gamma, c2, 1.0],
        )
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Last weight, the coefficient of the final implicit relaxation.
    pub fn b_last(&self) -> f64 {
        self.b[self.b.len() - 1]
    }

    pub fn abs_weight_sum(&self) -> f64 {
        self.b.iter().map(|x| x.abs()).sum()
    }

    /// `[sum b - 1, sum b c - 1/2, sum b c^2 - 1/3, sum b A c - 1/6]`.
    pub fn order_residuals(&self) -> [f64; 4] {
        let s = self.stages();
        let mut r = [-1.0, -0.5, -1.0 / 3.0, -1.0 / 6.0];
        for i in 0..s {
            r[0] += self.b[i];
            r[1] += self.b[i] * self.c[i];
            r[2] += self.b[i] * self.c[i] * self.c[i];
            for j in 0..s {
                r[3] += self.b[i] * self.a[i][j] * self.c[j];
            }
        }
        r
    }
}

/// `y^{n+1} = sum_k a_k y^{n+1-k} + beta dt g(y^{n+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfCoeffs {
    a: Vec<f64>,
    beta: f64,
}

impl BdfCoeffs {
    pub fn bdf2() -> Self {
        Self {
            a: vec![4.0 / 3.0, -1.0 / 3.0],
            beta: 2.0 / 3.0,
        }
    }

    pub fn bdf3() -> Self {
        Self {
            a: vec![18.0 / 11.0, -9.0 / 11.0, 2.0 / 11.0],
            beta: 6.0 / 11.0,
        }
    }

    /// Steps, equal to the order.
    pub fn steps(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}
