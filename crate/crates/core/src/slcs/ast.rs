//! Formula trees for the spatial logic: propositions, boolean connectives,
//! the closure modality `C`, and the surrounds operator `S`, plus the derived
//! operators (nearness `N^n`, reachability `T`, reach-through `R`) that
//! rewrite into the core.

use std::fmt;

/// A spatial-logic formula. `Prop`, `Top`, `Not`, `And`, `Close` and
/// `Surround` form the core; everything else desugars into it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Convenience disjunction; `a | b` rewrites to `!(!a & !b)`.
    Or(Box<Formula>, Box<Formula>),
    /// Closure modality: one relation step outward.
    Close(Box<Formula>),
    /// `φ S ψ`: φ-points from which every escape toward a point satisfying
    /// neither φ nor ψ must first cross a ψ-point.
    Surround(Box<Formula>, Box<Formula>),
    /// `N^n φ`: within n relation steps of a φ-point (n ≥ 1).
    Near(u32, Box<Formula>),
    /// `φ T ψ`: φ-points from which a ψ-point is reachable passing only
    /// through φ-points.
    Reach(Box<Formula>, Box<Formula>),
    /// `φ R(ψ) ζ`: φ-points from which a ζ-point is reachable through a
    /// ψ-region that also reaches back to φ.
    ReachThrough(Box<Formula>, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn close(f: Formula) -> Self {
        Formula::Close(Box::new(f))
    }

    pub fn surround(a: Formula, b: Formula) -> Self {
        Formula::Surround(Box::new(a), Box::new(b))
    }

    pub fn near(n: u32, f: Formula) -> Self {
        Formula::Near(n, Box::new(f))
    }

    pub fn reach(a: Formula, b: Formula) -> Self {
        Formula::Reach(Box::new(a), Box::new(b))
    }

    pub fn reach_through(a: Formula, via: Formula, b: Formula) -> Self {
        Formula::ReachThrough(Box::new(a), Box::new(via), Box::new(b))
    }

    /// True if the tree contains only core connectives.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Prop(_) | Formula::Top => true,
            Formula::Not(a) | Formula::Close(a) => a.is_core(),
            Formula::And(a, b) | Formula::Surround(a, b) => a.is_core() && b.is_core(),
            Formula::Or(..) | Formula::Near(..) | Formula::Reach(..) | Formula::ReachThrough(..) => {
                false
            }
        }
    }

    /// Rewrites derived operators into the core form:
    ///
    /// * `a | b`      → `!(!a & !b)`
    /// * `N^n φ`      → n-fold `C`
    /// * `φ T ψ`      → `φ & !((!ψ) S (!(φ | ψ)))` with the disjunction
    ///   itself rewritten
    /// * `φ R(ψ) ζ`  → `φ T ((ψ T ζ) & (ψ T φ))`, then rewritten recursively
    ///
    /// The rewrite is idempotent: core formulas map to themselves.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Prop(_) | Formula::Top => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Close(a) => Formula::close(a.desugar()),
            Formula::Surround(a, b) => Formula::surround(a.desugar(), b.desugar()),
            Formula::Or(a, b) => {
                Formula::not(Formula::and(Formula::not(a.desugar()), Formula::not(b.desugar())))
            }
            Formula::Near(n, a) => {
                let mut out = a.desugar();
                for _ in 0..*n {
                    out = Formula::close(out);
                }
                out
            }
            Formula::Reach(a, b) => {
                let da = a.desugar();
                let db = b.desugar();
                let escape = Formula::not(Formula::or(da.clone(), db.clone())).desugar();
                Formula::and(
                    da,
                    Formula::not(Formula::surround(Formula::not(db), escape)),
                )
            }
            Formula::ReachThrough(a, via, b) => Formula::reach(
                (**a).clone(),
                Formula::and(
                    Formula::reach((**via).clone(), (**b).clone()),
                    Formula::reach((**via).clone(), (**a).clone()),
                ),
            )
            .desugar(),
        }
    }
}

// Binding strength, loosest to tightest. Used by the renderer to emit the
// fewest parentheses that still reparse to the same tree.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Surround(..) | Formula::Reach(..) | Formula::ReachThrough(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Not(..) | Formula::Close(..) | Formula::Near(..) => 3,
        Formula::Prop(_) | Formula::Top => 4,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = level(f) < min;
    if wrap {
        write!(out, "(")?;
    }
    match f {
        Formula::Prop(p) => write!(out, "{p}")?,
        Formula::Top => write!(out, "true")?,
        Formula::Not(a) => {
            write!(out, "!")?;
            write_at(a, 3, out)?;
        }
        Formula::Close(a) => {
            write!(out, "C ")?;
            write_at(a, 3, out)?;
        }
        Formula::Near(n, a) => {
            write!(out, "N{n} ")?;
            write_at(a, 3, out)?;
        }
        Formula::And(a, b) => {
            write_at(a, 2, out)?;
            write!(out, " & ")?;
            write_at(b, 3, out)?;
        }
        Formula::Or(a, b) => {
            write_at(a, 1, out)?;
            write!(out, " | ")?;
            write_at(b, 2, out)?;
        }
        Formula::Surround(a, b) => {
            write_at(a, 1, out)?;
            write!(out, " S ")?;
            write_at(b, 0, out)?;
        }
        Formula::Reach(a, b) => {
            write_at(a, 1, out)?;
            write!(out, " T ")?;
            write_at(b, 0, out)?;
        }
        Formula::ReachThrough(a, via, b) => {
            write_at(a, 1, out)?;
            write!(out, " R(")?;
            write_at(via, 0, out)?;
            write!(out, ") ")?;
            write_at(b, 0, out)?;
        }
    }
    if wrap {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}
