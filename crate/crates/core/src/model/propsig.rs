//! Per-element property signatures.
//!
//! Instead of encoding raw values, the baseline turns each IO pair into
//! boolean feature sequences: for every feature and list position, does the
//! relation hold at that position? A pair `([-4,3,1,2,1], [-4,3,3,3,3])`
//! under "input == output" yields `[true, true, false, false, false]`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropFeature {
    /// `O == I` at the position.
    InputEqualsOutput,
    /// `O == C + I` at the position.
    AddConst(i64),
    /// `O == C - I` at the position.
    SubConst(i64),
}

impl PropFeature {
    pub fn holds(&self, input: i64, output: i64) -> bool {
        match self {
            PropFeature::InputEqualsOutput => output == input,
            PropFeature::AddConst(c) => output == c + input,
            PropFeature::SubConst(c) => output == c - input,
        }
    }
}

/// The feature set used by the baseline: equality plus `O = C + I?` and
/// `O = C - I?` for every constant in the value range.
pub fn feature_set(vmin: i64, vmax: i64) -> Vec<PropFeature> {
    let mut fs = vec![PropFeature::InputEqualsOutput];
    fs.extend((vmin..=vmax).map(PropFeature::AddConst));
    fs.extend((vmin..=vmax).map(PropFeature::SubConst));
    fs
}

/// Evaluate one feature per element: `result[l] == feature holds at l`.
pub fn property_signature_encode(
    pair: (&[i64], &[i64]),
    feature: PropFeature,
) -> Vec<bool> {
    let (input, output) = pair;
    assert_eq!(input.len(), output.len(), "paired lists share a length");
    input.iter().zip(output.iter()).map(|(i, o)| feature.holds(*i, *o)).collect()
}

/// All features at one position, as a 0/1 vector (the per-position input of
/// the signature encoder).
pub fn position_feature_vector(features: &[PropFeature], input: i64, output: i64) -> Vec<f64> {
    features.iter().map(|f| if f.holds(input, output) { 1.0 } else { 0.0 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_signature_matches_the_reference_example() {
        let sig = property_signature_encode(
            (&[-4, 3, 1, 2, 1], &[-4, 3, 3, 3, 3]),
            PropFeature::InputEqualsOutput,
        );
        assert_eq!(sig, vec![true, true, false, false, false]);
    }

    #[test]
    fn zero_plus_input_on_identity_pair_is_all_true() {
        let sig = property_signature_encode((&[1, -2, 0, 4, 3], &[1, -2, 0, 4, 3]), PropFeature::AddConst(0));
        assert_eq!(sig, vec![true; 5]);
    }

    #[test]
    fn two_plus_input_holds_where_output_is_input_plus_two() {
        let sig = property_signature_encode((&[2, 0, 1, -1, -4], &[4, 0, 3, 1, 2]), PropFeature::AddConst(2));
        assert_eq!(sig, vec![true, false, true, true, false]);
    }

    #[test]
    fn default_feature_count() {
        assert_eq!(feature_set(-4, 4).len(), 19);
    }
}
