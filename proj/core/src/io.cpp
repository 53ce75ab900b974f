#include "causamix/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace causamix {

using nlohmann::json;

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("failed to format double");
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

namespace {

json dag_to_json(const WeightedDag& dag) {
  json nodes = json::array();
  for (int id : dag.node_ids()) {
    const Node& n = dag.node(id);
    nodes.push_back({{"id", n.id}, {"name", n.name}, {"node_kind", to_string(n.kind)}});
  }
  json edges = json::array();
  for (const Edge& e : dag.edges()) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"w", e.weight}});
  }
  return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

WeightedDag dag_from_json(const json& j) {
  WeightedDag dag;
  for (const auto& n : j.at("nodes")) {
    dag.add_node(n.at("id").get<int>(), n.at("name").get<std::string>(),
                 node_kind_from_string(n.at("node_kind").get<std::string>()));
  }
  for (const auto& e : j.at("edges")) {
    dag.set_edge(e.at("src").get<int>(), e.at("dst").get<int>(), e.at("w").get<double>());
  }
  return dag;
}

}  // namespace

std::string model_to_json(const AnyModel& model) {
  json j;
  if (const auto* me = std::get_if<SemMeModel>(&model)) {
    j = dag_to_json(me->dag);
    j["kind"] = "sem_me";
    json measurements = json::object();
    for (const auto& [z, u] : me->measurement_of) measurements[std::to_string(z)] = u;
    j["measurements"] = std::move(measurements);
    j["canonical"] = me->canonical;
    j["u_leaf_noise"] = me->u_leaf_noise_ids;
  } else {
    const auto& ur = std::get<SemUrModel>(model);
    j = dag_to_json(ur.dag);
    j["kind"] = "sem_ur";
  }
  return j.dump(2) + "\n";
}

AnyModel model_from_json(const std::string& text) {
  json j;
  std::string kind;
  try {
    j = json::parse(text);
    kind = j.at("kind").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("invalid model JSON: ") + e.what());
  }
  try {
    if (kind == "sem_me") {
      SemMeModel me;
      me.dag = dag_from_json(j);
      if (j.contains("measurements")) {
        for (const auto& [z, u] : j.at("measurements").items()) {
          me.measurement_of[std::stoi(z)] = u.get<int>();
        }
      }
      me.canonical = j.value("canonical", false);
      if (j.contains("u_leaf_noise")) {
        for (int id : j.at("u_leaf_noise")) me.u_leaf_noise_ids.insert(id);
      }
      me.validate();
      return me;
    }
    if (kind == "sem_ur") {
      SemUrModel ur;
      ur.dag = dag_from_json(j);
      ur.validate();
      return ur;
    }
  } catch (const json::exception& e) {
    throw Error(std::string("invalid model JSON: ") + e.what());
  }
  throw Error("unknown model kind: " + kind);
}

void save_model(const AnyModel& model, const std::string& path) {
  write_file(path, model_to_json(model));
}

AnyModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

std::string matrix_to_csv(const MixingMatrix& mix) {
  std::ostringstream out;
  for (int j = 0; j < mix.cols(); ++j) {
    out << ',' << (mix.col_labels ? (*mix.col_labels)[j] : "c" + std::to_string(j));
  }
  out << '\n';
  for (int i = 0; i < mix.rows(); ++i) {
    out << (i < static_cast<int>(mix.row_labels.size()) ? mix.row_labels[i]
                                                        : "r" + std::to_string(i));
    for (int j = 0; j < mix.cols(); ++j) out << ',' << format_double(mix.values(i, j));
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("invalid number in CSV: '" + text + "'");
  }
  return value;
}

std::vector<std::string> non_empty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

MixingMatrix matrix_from_csv(const std::string& text, MixingKind kind) {
  std::vector<std::string> lines = non_empty_lines(text);
  if (lines.empty()) throw Error("empty CSV");
  std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.empty() || !header[0].empty()) {
    throw Error("matrix CSV must start with an empty cell before column labels");
  }
  int cols = static_cast<int>(header.size()) - 1;
  int rows = static_cast<int>(lines.size()) - 1;

  MixingMatrix mix;
  mix.kind = kind;
  mix.values.resize(rows, cols);
  bool default_labels = true;
  for (int j = 0; j < cols; ++j) {
    if (header[j + 1] != "c" + std::to_string(j)) default_labels = false;
  }
  if (!default_labels) {
    mix.col_labels = std::vector<std::string>(header.begin() + 1, header.end());
  }
  for (int i = 0; i < rows; ++i) {
    std::vector<std::string> cells = split_csv_line(lines[i + 1]);
    if (static_cast<int>(cells.size()) != cols + 1) {
      throw Error("CSV row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                  " cells, expected " + std::to_string(cols + 1));
    }
    mix.row_labels.push_back(cells[0]);
    for (int j = 0; j < cols; ++j) mix.values(i, j) = parse_double(cells[j + 1]);
  }
  return mix;
}

void save_matrix(const MixingMatrix& mix, const std::string& path) {
  write_file(path, matrix_to_csv(mix));
}

MixingMatrix load_matrix(const std::string& path, MixingKind kind) {
  return matrix_from_csv(read_file(path), kind);
}

std::string data_to_csv(const Eigen::MatrixXd& data, const std::vector<std::string>& col_labels) {
  std::ostringstream out;
  for (int j = 0; j < data.cols(); ++j) {
    if (j) out << ',';
    out << (j < static_cast<int>(col_labels.size()) ? col_labels[j] : "c" + std::to_string(j));
  }
  out << '\n';
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << format_double(data(i, j));
    }
    out << '\n';
  }
  return out.str();
}

Eigen::MatrixXd data_from_csv(const std::string& text) {
  std::vector<std::string> lines = non_empty_lines(text);
  if (lines.empty()) throw Error("empty CSV");
  int cols = static_cast<int>(split_csv_line(lines[0]).size());
  int rows = static_cast<int>(lines.size()) - 1;
  Eigen::MatrixXd data(rows, cols);
  for (int i = 0; i < rows; ++i) {
    std::vector<std::string> cells = split_csv_line(lines[i + 1]);
    if (static_cast<int>(cells.size()) != cols) {
      throw Error("CSV row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                  " cells, expected " + std::to_string(cols));
    }
    for (int j = 0; j < cols; ++j) data(i, j) = parse_double(cells[j]);
  }
  return data;
}

void save_data(const Eigen::MatrixXd& data, const std::vector<std::string>& col_labels,
               const std::string& path) {
  write_file(path, data_to_csv(data, col_labels));
}

Eigen::MatrixXd load_data(const std::string& path) { return data_from_csv(read_file(path)); }

}  // namespace causamix
