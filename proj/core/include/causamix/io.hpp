#pragma once

#include <string>
#include <vector>

#include "causamix/mixing.hpp"
#include "causamix/model.hpp"

namespace causamix {

// JSON model schema:
//   {"kind":"sem_me"|"sem_ur",
//    "nodes":[{"id":0,"name":"Z0","node_kind":"unobserved_underlying"},...],
//    "edges":[{"src":0,"dst":1,"w":0.7},...],
//    // sem_me only:
//    "measurements":{"0":5,...}, "canonical":true, "u_leaf_noise":[3,...]}
// Weights round-trip losslessly (shortest-representation decimal).
std::string model_to_json(const AnyModel& model);
AnyModel model_from_json(const std::string& text);

void save_model(const AnyModel& model, const std::string& path);
AnyModel load_model(const std::string& path);

// Matrix CSV: first row holds column labels ("c0..cN" when unlabeled) behind
// an empty leading cell; each following row starts with its row label.
std::string matrix_to_csv(const MixingMatrix& mix);
MixingMatrix matrix_from_csv(const std::string& text, MixingKind kind);

void save_matrix(const MixingMatrix& mix, const std::string& path);
MixingMatrix load_matrix(const std::string& path, MixingKind kind);

// Data CSV: header row of column labels, then one row per sample, no row
// labels.
std::string data_to_csv(const Eigen::MatrixXd& data, const std::vector<std::string>& col_labels);
Eigen::MatrixXd data_from_csv(const std::string& text);

void save_data(const Eigen::MatrixXd& data, const std::vector<std::string>& col_labels,
               const std::string& path);
Eigen::MatrixXd load_data(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace causamix
