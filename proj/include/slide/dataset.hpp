#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slide/errors.hpp"

namespace slide {

// n samples of p spins, each +1 or -1, row-major.
class Dataset {
 public:
  Dataset(int n, int p) : n_(n), p_(p), z_(static_cast<std::size_t>(n) * p, 1) {
    if (n < 0 || p < 1) throw ValidationError("Dataset: need n >= 0 and p >= 1");
  }

  int n() const { return n_; }
  int p() const { return p_; }

  std::int8_t operator()(int r, int j) const { return z_[idx(r, j)]; }
  void set(int r, int j, std::int8_t v) { z_[idx(r, j)] = v; }

  const std::int8_t* row(int r) const { return z_.data() + idx(r, 0); }
  std::int8_t* row(int r) { return z_.data() + idx(r, 0); }

  double mean(int j) const {
    double s = 0.0;
    for (int r = 0; r < n_; ++r) s += z_[idx(r, j)];
    return n_ > 0 ? s / n_ : 0.0;
  }

  // Empirical E[z_i z_j].
  double pair_moment(int i, int j) const {
    double s = 0.0;
    for (int r = 0; r < n_; ++r) s += static_cast<double>(z_[idx(r, i)]) * z_[idx(r, j)];
    return n_ > 0 ? s / n_ : 0.0;
  }

 private:
  std::size_t idx(int r, int j) const { return static_cast<std::size_t>(r) * p_ + j; }

  int n_;
  int p_;
  std::vector<std::int8_t> z_;
};

// Samples file: optional comment header "# n=<int> p=<int>", then one row per
// sample with whitespace-separated +1/-1 tokens.
inline void write_samples(std::ostream& out, const Dataset& data) {
  out << "# n=" << data.n() << " p=" << data.p() << "\n";
  for (int r = 0; r < data.n(); ++r) {
    for (int j = 0; j < data.p(); ++j) {
      if (j) out << " ";
      out << (data(r, j) > 0 ? "+1" : "-1");
    }
    out << "\n";
  }
}

inline Dataset read_samples(std::istream& in) {
  std::vector<std::vector<std::int8_t>> rows;
  std::string line;
  int line_no = 0;
  int p = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::int8_t> row;
    std::string tok;
    while (ls >> tok) {
      if (tok == "+1" || tok == "1")
        row.push_back(1);
      else if (tok == "-1")
        row.push_back(-1);
      else
        throw ValidationError("samples file line " + std::to_string(line_no) +
                              ": bad token '" + tok + "' (want +1 or -1)");
    }
    if (row.empty()) continue;
    if (p < 0)
      p = static_cast<int>(row.size());
    else if (static_cast<int>(row.size()) != p)
      throw ValidationError("samples file line " + std::to_string(line_no) + ": expected " +
                            std::to_string(p) + " entries, got " +
                            std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (p < 0) throw ValidationError("samples file: no sample rows found");
  Dataset data(static_cast<int>(rows.size()), p);
  for (int r = 0; r < data.n(); ++r)
    for (int j = 0; j < p; ++j) data.set(r, j, rows[r][j]);
  return data;
}

inline Dataset read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open samples file: " + path);
  return read_samples(in);
}

inline void write_samples_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write samples file: " + path);
  write_samples(out, data);
}

}  // namespace slide
