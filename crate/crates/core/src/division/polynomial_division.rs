use crate::poly::Polynomial;

use super::{DivisionError, DivisionOutcome, Quotient};

/// Divides `p` by a homogeneous harmonic `q`, returning `r` with `q r = p`.
///
/// Each homogeneous part of `p` is reduced separately by the leading term of
/// `q` in the graded order. When `q | p`, the leading monomial of every
/// intermediate remainder is a multiple of the leading monomial of `q`, so
/// the first step where that fails proves `q ∤ p`.
pub fn divide_by_harmonic(p: &Polynomial, q: &Polynomial) -> Result<DivisionOutcome, DivisionError> {
    if p.dim() != q.dim() {
        return Err(crate::poly::PolyError::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        }
        .into());
    }
    if q.is_zero() {
        return Err(DivisionError::ZeroDivisor);
    }
    if !q.is_homogeneous() {
        return Err(DivisionError::NotHomogeneous);
    }
    if !q.is_harmonic() {
        return Err(DivisionError::NotHarmonic);
    }

    let (q_lead, q_coeff) = q.leading_term().expect("non-zero divisor");
    let q_deg = q_lead.degree();
    let mut quotient = Polynomial::zero(p.dim());

    if !p.is_zero() {
        for (degree, part) in p.homogeneous_parts()? {
            if degree < q_deg {
                return Err(DivisionError::NotDivisible {
                    degree,
                    monomial: part.leading_term().map(|(i, _)| i.clone()),
                    reason: format!("degree-{degree} part is below the divisor degree {q_deg}"),
                });
            }
            let mut rem = part;
            while let Some((lead, c)) = rem.leading_term() {
                let Some(shift) = lead.checked_sub(q_lead) else {
                    return Err(DivisionError::NotDivisible {
                        degree,
                        monomial: Some(lead.clone()),
                        reason: format!("leading monomial {lead} is not a multiple of {q_lead}"),
                    });
                };
                let t = Polynomial::monomial(shift, c / q_coeff);
                rem = &rem - &(&t * q);
                quotient = &quotient + &t;
            }
        }
    }

    let residual_verified = &(&quotient * q) == p;
    debug_assert!(residual_verified);
    Ok(DivisionOutcome {
        quotient: Quotient::Polynomial(quotient),
        residual_verified,
        certificate: None,
        rotation: None,
    })
}
