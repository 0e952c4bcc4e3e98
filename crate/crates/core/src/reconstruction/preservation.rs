//! Exhaustive preservation checks of a map on a finite family of tripotents.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factors::{norm, Element};
use crate::tripotent::{is_orthogonal, leq, Tolerance};

use super::oracle::TripotentOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreservationMode {
    /// Assume orthogonality preservation and check it along with order.
    Full,
    /// Check order only, then test what follows.
    OrderOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationClass {
    /// `a <= b` and `Φa <= Φb` disagree.
    Order,
    /// `a ⊥ b` but not `Φa ⊥ Φb`.
    OrthogonalityForward,
    /// `Φa ⊥ Φb` but not `a ⊥ b`.
    OrthogonalityBackward,
    /// `Φ(0) != 0`.
    Zero,
    /// `Φ(e_1 + ... + e_k) != Φ(e_1) + ... + Φ(e_k)` for orthogonal `e_i`.
    Additivity,
}

impl ViolationClass {
    pub fn name(self) -> &'static str {
        match self {
            ViolationClass::Order => "order",
            ViolationClass::OrthogonalityForward => "orthogonality-forward",
            ViolationClass::OrthogonalityBackward => "orthogonality-backward",
            ViolationClass::Zero => "zero",
            ViolationClass::Additivity => "additivity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub class: ViolationClass,
    /// Family indices involved.
    pub indices: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PreservationReport {
    pub violations: Vec<Violation>,
    /// Ordered pairs examined.
    pub pairs: usize,
    /// Pairs with `a <= b` whose images are ordered too.
    pub order_confirmed: usize,
    /// Orthogonal pairs with orthogonal images.
    pub orthogonality_forward_confirmed: usize,
    /// Pairs with orthogonal images that are orthogonal themselves.
    pub orthogonality_backward_confirmed: usize,
    pub additivity_confirmed: usize,
    /// Zero members whose image is zero.
    pub zero_confirmed: usize,
}

impl PreservationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, class: ViolationClass) -> bool {
        self.violations.iter().any(|v| v.class == class)
    }
}

fn find(family: &[Element], x: &Element, tol: Tolerance) -> Option<usize> {
    family.iter().position(|y| tol.accepts(norm(&(y - x)), norm(x).max(norm(y))))
}

fn is_zero(x: &Element, tol: Tolerance) -> bool {
    tol.accepts(norm(x), 1.0)
}

/// Index tuples (pairs and triples) of nonzero, pairwise orthogonal members
/// whose sum is again a member.
pub fn additive_tuples(family: &[Element], tol: Tolerance) -> Result<Vec<Vec<usize>>> {
    let n = family.len();
    let mut orth = alloc::vec![false; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let o = is_orthogonal(&family[a], &family[b], tol)?;
            orth[a * n + b] = o;
            orth[b * n + a] = o;
        }
    }
    let nonzero: Vec<usize> = (0..n).filter(|&k| !is_zero(&family[k], tol)).collect();
    let mut out = Vec::new();
    for (x, &a) in nonzero.iter().enumerate() {
        for (y, &b) in nonzero.iter().enumerate().skip(x + 1) {
            if !orth[a * n + b] {
                continue;
            }
            let ab = &family[a] + &family[b];
            if find(family, &ab, tol).is_some() {
                out.push(alloc::vec![a, b]);
            }
            for &c in &nonzero[y + 1..] {
                if orth[a * n + c] && orth[b * n + c] && find(family, &(&ab + &family[c]), tol).is_some() {
                    out.push(alloc::vec![a, b, c]);
                }
            }
        }
    }
    Ok(out)
}

/// Checks order (both directions) and, in [`PreservationMode::Full`],
/// forward orthogonality over all ordered pairs; then tests backward
/// orthogonality, `Φ(0) = 0` and additivity on `tuples`. Each tuple's sum
/// must be a member of the family.
pub fn check_preservation(
    family: &[Element],
    tuples: &[Vec<usize>],
    phi: &TripotentOracle,
    tol: Tolerance,
    mode: PreservationMode,
) -> Result<PreservationReport> {
    let images: Vec<Element> = family.iter().map(|x| phi.apply(x)).collect::<Result<_>>()?;
    let n = family.len();
    let mut report = PreservationReport::default();
    let push = |r: &mut PreservationReport, class, indices: Vec<usize>, detail: String| {
        r.violations.push(Violation { class, indices, detail });
    };

    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            report.pairs += 1;
            let below = leq(&family[a], &family[b], tol)?;
            let below_img = leq(&images[a], &images[b], tol)?;
            if below != below_img {
                let detail = if below {
                    format!("member {a} <= member {b} but the images are not ordered")
                } else {
                    format!("images of {a} and {b} are ordered but the members are not")
                };
                push(&mut report, ViolationClass::Order, alloc::vec![a, b], detail);
            } else if below {
                report.order_confirmed += 1;
            }
            if a > b {
                continue;
            }
            let orth = is_orthogonal(&family[a], &family[b], tol)?;
            let orth_img = is_orthogonal(&images[a], &images[b], tol)?;
            if orth && mode == PreservationMode::Full {
                if orth_img {
                    report.orthogonality_forward_confirmed += 1;
                } else {
                    let detail = format!("members {a} and {b} are orthogonal, their images are not");
                    push(&mut report, ViolationClass::OrthogonalityForward, alloc::vec![a, b], detail);
                }
            }
            if orth_img {
                if orth {
                    report.orthogonality_backward_confirmed += 1;
                } else {
                    let detail = format!("images of {a} and {b} are orthogonal, the members are not");
                    push(&mut report, ViolationClass::OrthogonalityBackward, alloc::vec![a, b], detail);
                }
            }
        }
    }

    for k in 0..n {
        if is_zero(&family[k], tol) {
            if is_zero(&images[k], tol) {
                report.zero_confirmed += 1;
            } else {
                let detail = format!("Φ(0) has norm {:.3e}", norm(&images[k]));
                push(&mut report, ViolationClass::Zero, alloc::vec![k], detail);
            }
        }
    }

    for t in tuples {
        if t.is_empty() || t.iter().any(|&k| k >= n) {
            return Err(Error::Precondition(format!("tuple {t:?} does not index the family")));
        }
        let mut total = Element::zero(family[0].factor());
        let mut image_total = Element::zero(images[0].factor());
        for &k in t {
            total = &total + &family[k];
            image_total = &image_total + &images[k];
        }
        let Some(s) = find(family, &total, tol) else {
            return Err(Error::Precondition(format!("sum of tuple {t:?} is not in the family")));
        };
        let gap = norm(&(&images[s] - &image_total));
        if tol.accepts(gap, norm(&images[s])) {
            report.additivity_confirmed += 1;
        } else {
            let mut idx = t.clone();
            idx.push(s);
            let detail = format!("Φ of the sum differs from the sum of images by {gap:.3e}");
            push(&mut report, ViolationClass::Additivity, idx, detail);
        }
    }
    Ok(report)
}
