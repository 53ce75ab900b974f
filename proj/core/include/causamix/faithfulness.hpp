#pragma once

#include <string>
#include <vector>

#include "causamix/constants.hpp"
#include "causamix/model.hpp"

namespace causamix {

struct Violation {
  // "a": zero total effect; "b1"/"b2": forbidden linear dependence;
  // "bottleneck": rank/vertex-cut mismatch.
  std::string part;
  int variable = -1;  // affected variable; -1 for bottleneck findings
  // "a": the ancestor with zero effect; "b2": the parent the effect vector
  // omits; otherwise -1.
  int partner = -1;
  // "b1"/"b2": the dependent subset's node ids. "bottleneck": the source set J.
  std::vector<int> witnesses;
  std::vector<int> witnesses2;  // "bottleneck": the target set K
  std::string detail;
};

struct FaithfulnessReport {
  bool passed = true;  // true exactly when `violations` is empty
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
};

FaithfulnessReport merge(const FaithfulnessReport& a,
                         const FaithfulnessReport& b);

// Part (a): every ancestor has a nonzero total effect on each of its proper
// descendants (|effect| > kExactZeroTol).
FaithfulnessReport check_faithfulness_a(const SemMeModel& me);
FaithfulnessReport check_faithfulness_a(const SemUrModel& ur);

// Parts (b1)/(b2): the designated total-effect vector of each variable is
// linearly independent of every small subset of possible-parent (possible-
// child) vectors, except the exempted parent-sized (child-sized) subsets
// whose u-leaf (latent) members are parent-contained (child-contained).
// Dependence means the least-squares residual drops below kDependenceTol
// times the vector norm. Subsets are scanned by increasing size with the
// smallest witness reported. Throws CombinatorialCap when a variable's
// subset-size bound exceeds `cap`.
FaithfulnessReport check_faithfulness_b(const SemMeModel& me,
                                        int cap = kSubsetCap);
FaithfulnessReport check_faithfulness_b(const SemUrModel& ur,
                                        int cap = kSubsetCap);

// Both parts combined.
FaithfulnessReport check_faithfulness(const SemMeModel& me,
                                      int cap = kSubsetCap);
FaithfulnessReport check_faithfulness(const SemUrModel& ur,
                                      int cap = kSubsetCap);

// For every J ⊆ H∪X and K ⊆ X, the rank of the noise-to-observation block
// W_K^J must equal the minimal vertex bottleneck from J to K, computed by
// unit-capacity max-flow on the node-split graph. Exhaustive; throws
// CapExceeded when the model has more than `cap` nodes.
FaithfulnessReport check_bottleneck_faithfulness(const SemUrModel& ur,
                                                 int cap = kBottleneckCap);

}  // namespace causamix
