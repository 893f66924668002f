#pragma once

#include "neurobeat/types.hpp"

namespace neurobeat {

// Quantizes onset timestamps onto the sample grid: bit floor(t*sr + 0.5) is
// set for every onset t (round half up). Onsets that collide on one index
// collapse to a single 1. Throws invalid_annotation if the annotation is not
// strictly ascending/finite/nonnegative, out_of_range if an index would fall
// at or beyond `length`.
BinaryOnsetSequence timestamps_to_binary(const OnsetAnnotation& ann,
                                         double sample_rate_hz, long length);

// Inverse codec: set bits back to timestamps i / sr, ascending.
OnsetAnnotation binary_to_timestamps(const BinaryOnsetSequence& seq);

// Dilates each 1 to the closed index window [i-radius, i+radius], clipped at
// the sequence boundaries. radius 0 is the identity.
BinaryOnsetSequence widen_targets(const BinaryOnsetSequence& seq, int radius);

// Checks the recording invariants (declared shape matches the matrix, sample
// rate positive, all values finite). Collects violations instead of throwing.
ValidationReport validate_recording(const EegRecording& rec);

// Throws invalid_annotation unless strictly ascending with finite
// nonnegative entries.
void require_valid_annotation(const OnsetAnnotation& ann);

}  // namespace neurobeat
