#pragma once

#include <optional>
#include <vector>

#include "causamix/constants.hpp"
#include "causamix/mixing.hpp"
#include "causamix/model.hpp"

namespace causamix {

enum class GroupingKind { Aog, Dog };

// Whether group members are node ids (grouping computed from a model) or
// matrix indices (grouping recovered from a mixing-matrix support pattern).
enum class GroupingDomain { NodeIds, Positions };

struct Group {
  std::vector<int> members;  // sorted ascending
  // The nu-leaf (ME) / observed (UR) member when known. Groupings recovered
  // from a support pattern leave it empty for multi-member groups: the center
  // is exactly what the mixing matrix cannot reveal.
  std::optional<int> center;
  // Index removed from the working matrix together with this group:
  // ME, Positions: the center's noise column. UR, Positions: the center's
  // observed row (members are then noise-column indices). Absent for groups
  // swept up without their own column/row (leaf/latent singletons) and in the
  // NodeIds domain.
  std::optional<int> paired;
};

struct OrderedGrouping {
  std::vector<Group> groups;  // causal order, first group most upstream
  GroupingKind kind = GroupingKind::Aog;
  GroupingDomain domain = GroupingDomain::NodeIds;
  MixingKind source = MixingKind::Me;  // Me or Ur semantics
};

// Groups each u-leaf with the parent covering its other parents ancestrally
// (ME), or each latent with the child covering its other children (UR); the
// rest become singletons. Group order: topological over the condensed group
// graph, ties by smallest member id.
OrderedGrouping aog_from_structure(const SemMeModel& me);
OrderedGrouping aog_from_structure(const SemUrModel& ur);

// Recovers the AOG from a support pattern by repeatedly removing the rows
// that share the support of a single-nonzero row (sweeping the column along
// with them). Rows with the same original nonzero count as the picked row
// form one group, the rest of the swept rows become singletons. Ties go to
// the row with the fewest original nonzeros, then the lowest index. A UR
// support is processed transposed (members are then column indices) and the
// discovered order is reversed. Throws NoValidRow when rows remain but none
// has exactly one nonzero.
OrderedGrouping aog_from_mixing(const SupportPattern& supp);

// Edge-identifiability test for an edge nu-leaf -> u-leaf: true when the
// u-leaf has a parent outside Pa(src), or some other child of src misses one
// of the u-leaf's parents.
bool check_condition_me(const SemMeModel& me, int src, int dst);

// Dual test for an edge latent -> observed: true when the latent has a child
// outside Ch(dst), or some other parent of dst misses one of the latent's
// children.
bool check_condition_ur(const SemUrModel& ur, int src, int dst);

// Like the AOG, but a u-leaf (latent) only joins the neighbor whose edge
// fails the identifiability condition above.
OrderedGrouping dog_from_structure(const SemMeModel& me);
OrderedGrouping dog_from_structure(const SemUrModel& ur);

// All center assignments of a grouping: the Cartesian product of member
// choices of every column-carrying (row-carrying) group. Each assignment
// lists one chosen center per group, in group order; groups without a choice
// contribute their sole member. Throws ClassTooLarge past the cap.
std::vector<std::vector<int>> enumerate_class(const OrderedGrouping& grouping,
                                              long long cap = kClassCap);
long long class_size(const OrderedGrouping& grouping);

// Zeroes nonzero entries in increasing order of absolute value until
// aog_from_mixing accepts the support, never removing the last nonzero of a
// row (column, for UR). Returns the pruned matrix and the largest absolute
// value zeroed (0 when nothing was pruned).
std::pair<MixingMatrix, double> prune_until_valid(const MixingMatrix& mix);

}  // namespace causamix
