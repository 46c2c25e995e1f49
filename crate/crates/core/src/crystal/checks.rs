use super::FCrystalPresentation;
use crate::matrix::SeriesMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `dF/dt + A F = F phi^*(A)`.
    Horizontality,
    /// `G = G^T`.
    Symmetry,
    /// `F^T G F = p^w phi^*(G)`.
    FrobeniusCompat,
    /// `dG = A^T G + G A`.
    Flatness,
}

impl Relation {
    pub fn name(&self) -> &'static str {
        match self {
            Relation::Horizontality => "horizontality",
            Relation::Symmetry => "symmetry",
            Relation::FrobeniusCompat => "frobenius-compatibility",
            Relation::Flatness => "flatness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckFailure {
    Residual {
        relation: Relation,
        residual: SeriesMatrix,
    },
    NotPerfect {
        det_mod_p: u64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn residual(&mut self, relation: Relation, residual: SeriesMatrix) {
        if !residual.is_zero() {
            self.failures.push(CheckFailure::Residual { relation, residual });
        }
    }
}

/// Evaluates `dF/dt + A F - F phi^*(A)` through degree `M - 1`.
pub fn check_horizontality(c: &FCrystalPresentation) -> CheckReport {
    let mut report = CheckReport::default();
    if c.rank() == 0 {
        return report;
    }
    let top = c.context().truncation();
    let f = c.frobenius();
    let a = c.connection();
    let lhs = &f.derivative() + &(a * f);
    let rhs = f * &a.one_form_pullback();
    report.residual(Relation::Horizontality, (&lhs - &rhs).cut_above(top));
    report
}

/// Symmetry, Frobenius compatibility, flatness and perfectness of the pairing.
pub fn check_pairing_compat(c: &FCrystalPresentation) -> CheckReport {
    let mut report = CheckReport::default();
    if c.rank() == 0 {
        return report;
    }
    let ctx = c.context();
    let top = ctx.truncation();
    let g = c.pairing();
    let f = c.frobenius();
    let a = c.connection();

    report.residual(Relation::Symmetry, g - &g.transpose());

    let pw = ctx.p_pow(c.weight()) as i128;
    let lhs = &(&f.transpose() * g) * f;
    let rhs = g.frobenius_pullback().scale_int(pw);
    report.residual(Relation::FrobeniusCompat, &lhs - &rhs);

    let flat = &(&a.transpose() * g) + &(g * a);
    report.residual(Relation::Flatness, (&g.derivative() - &flat).cut_above(top));

    let det = g.det_mod_p();
    if det == 0 {
        report.failures.push(CheckFailure::NotPerfect { det_mod_p: det });
    }
    report
}
