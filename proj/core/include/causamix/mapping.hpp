#pragma once

#include <string>
#include <vector>

#include "causamix/model.hpp"

namespace causamix {

// One flag per non-root observed node of a SEM-UR, in ascending id order:
// true maps the node to a measured-with-error Z, false to an observed Y.
struct ObservabilityChoice {
  std::vector<bool> to_z;

  // Parses a string of '0'/'1' characters, '1' meaning Z.
  static ObservabilityChoice from_bitstring(const std::string& bits);
  std::string to_bitstring() const;
};

// The non-root observed node ids of `ur`, ascending: the slots an
// ObservabilityChoice refers to.
std::vector<int> choice_slots(const SemUrModel& ur);

// All 2^n_slots choices, in bitstring counting order.
std::vector<ObservabilityChoice> all_choices(int n_slots);

// Rewrites a SEM-UR as a canonical SEM-ME: latents become u-leaf Z nodes,
// observed roots become Y, the remaining observed nodes follow `choice`, and
// every edge is reversed with its weight kept. Underlying ids equal the
// source ids; names carry a kind prefix ("Z:H").
SemMeModel map_ur_to_me(const SemUrModel& ur, const ObservabilityChoice& choice);

// Inverse rewrite: u-leafs become latent roots, every other underlying node
// becomes observed, edges are reversed. Requires a canonical model.
SemUrModel map_me_to_ur(const SemMeModel& me);

struct TransposeMatch {
  // Column order of the ME mixing matrix: matched column j is
  // wme.values.col(permutation_me[j]).
  std::vector<int> permutation_me;
  // Column order of the UR mixing matrix, same convention.
  std::vector<int> permutation_ur;
};

// Finds column permutations of the two mixing matrices making the ME one the
// exact transpose of the UR one (entries within 1e-10). Columns are first
// matched by sorted-value fingerprint; ambiguous fingerprints are resolved by
// backtracking. Throws NoPermutationFound when no pairing works.
TransposeMatch verify_transpose(const SemUrModel& ur, const SemMeModel& me);

}  // namespace causamix
