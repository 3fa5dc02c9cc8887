#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slide/errors.hpp"

namespace slide {

// Symmetric, zero-diagonal interaction matrix. The nonzero pattern is the
// edge set of the underlying graph.
class CouplingMatrix {
 public:
  struct Edge {
    int i;
    int j;
    double value;
  };

  explicit CouplingMatrix(int p) : p_(p), a_(static_cast<std::size_t>(p) * p, 0.0) {
    if (p < 1) throw ValidationError("CouplingMatrix: node count must be >= 1");
  }

  int p() const { return p_; }

  double operator()(int i, int j) const { return a_[idx(i, j)]; }

  // Writes both (i,j) and (j,i); the diagonal stays zero.
  void set(int i, int j, double value) {
    if (i == j) throw ValidationError("CouplingMatrix: diagonal entries are fixed to zero");
    a_[idx(i, j)] = value;
    a_[idx(j, i)] = value;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < p_; ++i)
      for (int j = i + 1; j < p_; ++j)
        if (a_[idx(i, j)] != 0.0) out.push_back({i, j, a_[idx(i, j)]});
    return out;
  }

  std::size_t num_edges() const {
    std::size_t cnt = 0;
    for (int i = 0; i < p_; ++i)
      for (int j = i + 1; j < p_; ++j)
        if (a_[idx(i, j)] != 0.0) ++cnt;
    return cnt;
  }

  int degree(int i) const {
    int deg = 0;
    for (int j = 0; j < p_; ++j)
      if (j != i && a_[idx(i, j)] != 0.0) ++deg;
    return deg;
  }

  double row_abs_sum(int i) const {
    double s = 0.0;
    for (int j = 0; j < p_; ++j) s += std::abs(a_[idx(i, j)]);
    return s;
  }

  // Full column i (length p), used as a nodewise coefficient vector.
  std::vector<double> column(int i) const {
    std::vector<double> col(p_);
    for (int j = 0; j < p_; ++j) col[j] = a_[idx(i, j)];
    return col;
  }

  bool support_equals(const CouplingMatrix& other) const {
    if (other.p_ != p_) return false;
    for (std::size_t k = 0; k < a_.size(); ++k)
      if ((a_[k] != 0.0) != (other.a_[k] != 0.0)) return false;
    return true;
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * p_ + j; }

  int p_;
  std::vector<double> a_;
};

// Bounds a family of coupling matrices: minimum edge magnitude, maximum
// neighborhood weight (l1 row norm) and maximum degree.
struct FamilyParams {
  double lambda = 0.0;
  double gamma = 0.0;
  int d = 0;
};

// Effective family parameters read off a concrete matrix.
inline FamilyParams scan_family(const CouplingMatrix& coupling) {
  FamilyParams fam;
  fam.lambda = 0.0;
  bool any_edge = false;
  for (const auto& e : coupling.edges()) {
    const double mag = std::abs(e.value);
    if (!any_edge || mag < fam.lambda) fam.lambda = mag;
    any_edge = true;
  }
  for (int i = 0; i < coupling.p(); ++i) {
    fam.gamma = std::max(fam.gamma, coupling.row_abs_sum(i));
    fam.d = std::max(fam.d, coupling.degree(i));
  }
  return fam;
}

// Model file format: header "p <int>", then one "i j value" line per edge,
// 0-based indices with i < j, values with enough digits to round-trip.
inline void write_model(std::ostream& out, const CouplingMatrix& coupling) {
  out << "p " << coupling.p() << "\n";
  out << std::setprecision(17);
  for (const auto& e : coupling.edges()) out << e.i << " " << e.j << " " << e.value << "\n";
}

inline std::string model_to_string(const CouplingMatrix& coupling) {
  std::ostringstream os;
  write_model(os, coupling);
  return os.str();
}

inline CouplingMatrix read_model(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ValidationError("model file: empty input");
  ++line_no;
  std::istringstream header(line);
  std::string tag;
  int p = 0;
  if (!(header >> tag >> p) || tag != "p" || p < 1)
    throw ValidationError("model file line 1: expected header 'p <count>'");
  CouplingMatrix coupling(p);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int i = 0, j = 0;
    double value = 0.0;
    if (!(ls >> i >> j >> value))
      throw ValidationError("model file line " + std::to_string(line_no) +
                            ": expected 'i j value'");
    if (i < 0 || j < 0 || i >= p || j >= p || i >= j)
      throw ValidationError("model file line " + std::to_string(line_no) +
                            ": indices must satisfy 0 <= i < j < p");
    if (!std::isfinite(value))
      throw ValidationError("model file line " + std::to_string(line_no) +
                            ": non-finite value");
    coupling.set(i, j, value);
  }
  return coupling;
}

inline CouplingMatrix read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  return read_model(in);
}

inline void write_model_file(const std::string& path, const CouplingMatrix& coupling) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write model file: " + path);
  write_model(out, coupling);
}

}  // namespace slide
