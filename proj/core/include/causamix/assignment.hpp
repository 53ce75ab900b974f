#pragma once

#include <Eigen/Dense>
#include <vector>

namespace causamix {

// Exact minimum-cost assignment (Hungarian method with potentials) for a
// rows x cols cost matrix with rows <= cols. Returns the matched column per
// row. Throws ShapeMismatch when rows exceed cols.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace causamix
