//! Canonical generators of the doubled Lee and Bar-Natan theories: cycles
//! carried by a 2-coloured smoothing, one per colouring per sheet.
//!
//! Over Q the tensorands are r = (v_+ + v_-)/2 on orange circles and
//! p = (v_+ - v_-)/2 on pink ones; over F_2 they are a = v_+ + v_- and
//! b = v_-.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{DoubledGenerator, DoubledLayout, Sheet, TheoryError, TheoryTag};
use crate::colouring::{circle_colour, coloured_smoothing, odd_writhe, Colour, TwoColouring};
use crate::cube::resolve;
use crate::diagram::ProjectiveDiagram;
use crate::exactalg::{Rat, Scalar, SparseVec};

/// A canonical chain: a formal combination of generators supported on one
/// coloured smoothing. Coefficients are rational; reduce mod 2 for the
/// Bar-Natan theory (where they are 0/1).
#[derive(Debug, Clone)]
pub struct CanonicalChain {
    pub theory: TheoryTag,
    pub sheet: Sheet,
    pub degree: i64,
    pub terms: Vec<(DoubledGenerator, Rat)>,
}

impl CanonicalChain {
    /// The chain as a coordinate vector at its homological degree.
    pub fn to_vector<T: Scalar>(
        &self,
        layout: &DoubledLayout,
        convert: impl Fn(&Rat) -> T,
    ) -> SparseVec<T> {
        let mut v = SparseVec::new();
        for (g, coeff) in &self.terms {
            debug_assert_eq!(layout.degree_of(g), self.degree);
            let t = convert(coeff);
            if !t.is_zero() {
                v.insert(layout.index_of(g), t);
            }
        }
        v
    }

    /// Scaled to integer coefficients (multiplied by 2^circles), which does
    /// not change the homology class it spans over Q.
    pub fn to_vector_scaled(&self, layout: &DoubledLayout) -> SparseVec<Rat> {
        let scale = self
            .terms
            .iter()
            .map(|(_, c)| c.denom().clone())
            .fold(BigInt::from(1), |acc, d| num_integer::Integer::lcm(&acc, &d));
        let scale = BigRational::from_integer(scale);
        let mut v = SparseVec::new();
        for (g, coeff) in &self.terms {
            let t = coeff * &scale;
            if !Scalar::is_zero(&t) {
                v.insert(layout.index_of(g), t);
            }
        }
        v
    }
}

/// The canonical generator for one 2-colouring and sheet.
///
/// Its homological degree is the odd writhe of the colouring, and it is a
/// cycle for its theory's differential.
pub fn canonical_generator(
    d: &ProjectiveDiagram,
    colouring: &TwoColouring,
    sheet: Sheet,
    theory: TheoryTag,
) -> Result<CanonicalChain, TheoryError> {
    if theory == TheoryTag::DoubledKhovanov {
        return Err(TheoryError::RingMismatch {
            theory,
            ring: crate::exactalg::RingTag::Integers,
        });
    }
    let idx = coloured_smoothing(d, colouring);
    let smoothing = resolve(d, idx);
    let m = smoothing.circle_count();
    let colours: Vec<Colour> = smoothing
        .circles
        .iter()
        .map(|c| {
            circle_colour(d, colouring, c)
                .expect("circles of a coloured smoothing are monochromatic")
        })
        .collect();

    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let one = BigRational::from_integer(BigInt::from(1));
    let minus_one = BigRational::from_integer(BigInt::from(-1));

    let mut terms = Vec::new();
    match theory {
        TheoryTag::DoubledLee => {
            // Product over circles of (v_+ +/- v_-)/2.
            for labels in 0..1u32 << m {
                let mut coeff = one.clone();
                for (pos, colour) in colours.iter().enumerate() {
                    let minus = labels >> pos & 1 == 1;
                    coeff *= match (colour, minus) {
                        (Colour::Orange, _) => half.clone(),
                        (Colour::Pink, false) => half.clone(),
                        (Colour::Pink, true) => -half.clone(),
                    };
                }
                terms.push((
                    DoubledGenerator {
                        vertex: idx,
                        labels,
                        sheet,
                    },
                    coeff,
                ));
            }
        }
        TheoryTag::DoubledBarNatan => {
            // Product of a = v_+ + v_- on orange and b = v_- on pink.
            let pink_mask: u32 = colours
                .iter()
                .enumerate()
                .filter(|(_, c)| **c == Colour::Pink)
                .map(|(pos, _)| 1u32 << pos)
                .sum();
            for labels in 0..1u32 << m {
                if labels & pink_mask != pink_mask {
                    continue;
                }
                terms.push((
                    DoubledGenerator {
                        vertex: idx,
                        labels,
                        sheet,
                    },
                    one.clone(),
                ));
            }
        }
        TheoryTag::DoubledKhovanov => unreachable!(),
    }
    let _ = minus_one;
    Ok(CanonicalChain {
        theory,
        sheet,
        degree: odd_writhe(d, colouring),
        terms,
    })
}

/// All canonical generators: one per (colouring, sheet) pair, colourings in
/// canonical order, upper sheet first.
pub fn canonical_generators(
    d: &ProjectiveDiagram,
    theory: TheoryTag,
) -> Result<Vec<CanonicalChain>, TheoryError> {
    let mut out = Vec::new();
    for colouring in crate::colouring::enumerate_two_colourings(d) {
        for sheet in [Sheet::Upper, Sheet::Lower] {
            out.push(canonical_generator(d, &colouring, sheet, theory)?);
        }
    }
    Ok(out)
}
