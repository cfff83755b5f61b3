#include "certq/problem_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "certq/errors.hpp"

namespace certq {

namespace {

using nlohmann::json;

Vec read_vector(const json& j, const std::string& field, std::size_t expected) {
  if (!j.contains(field)) throw InvalidProblem("problem file: missing field \"" + field + "\"");
  const json& arr = j.at(field);
  if (!arr.is_array()) throw InvalidProblem("problem file: \"" + field + "\" must be an array");
  if (expected != 0 && arr.size() != expected) {
    throw InvalidProblem("problem file: \"" + field + "\" has length " +
                         std::to_string(arr.size()) + ", expected " + std::to_string(expected));
  }
  Vec v;
  v.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number()) {
      throw InvalidProblem("problem file: \"" + field + "\" contains a non-numeric entry");
    }
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

BoxQP load_box_qp(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw InvalidProblem(std::string("problem file: ") + e.what());
  }
  if (!j.contains("Q")) throw InvalidProblem("problem file: missing field \"Q\"");
  const json& q = j.at("Q");
  if (!q.is_array() || q.empty()) {
    throw InvalidProblem("problem file: \"Q\" must be a non-empty array of arrays");
  }
  const std::size_t n = q.size();

  BoxQP p;
  p.Q = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = q.at(i);
    if (!row.is_array() || row.size() != n) {
      throw InvalidProblem("problem file: \"Q\" row " + std::to_string(i) +
                           " has wrong length (matrix must be square)");
    }
    for (std::size_t jj = 0; jj < n; ++jj) {
      if (!row.at(jj).is_number()) {
        throw InvalidProblem("problem file: \"Q\"[" + std::to_string(i) + "][" +
                             std::to_string(jj) + "] is not a number");
      }
      p.Q(i, jj) = row.at(jj).get<double>();
    }
  }
  p.d = read_vector(j, "d", n);
  p.l = read_vector(j, "l", n);
  p.u = read_vector(j, "u", n);
  validate(p);
  return p;
}

BoxQP load_box_qp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidProblem("problem file: cannot open \"" + path + "\"");
  return load_box_qp(in);
}

void save_box_qp(std::ostream& os, const BoxQP& p) {
  const std::size_t n = p.size();
  json q = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t jj = 0; jj < n; ++jj) row.push_back(p.Q(i, jj));
    q.push_back(std::move(row));
  }
  json j;
  j["Q"] = std::move(q);
  j["d"] = p.d;
  j["l"] = p.l;
  j["u"] = p.u;
  os << j.dump(2) << '\n';
}

}  // namespace certq
