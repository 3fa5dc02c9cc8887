#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slide/dataset.hpp"
#include "slide/errors.hpp"

namespace slide {

// How each raw token maps into a spin. Missing entries default to -1 (absence
// reads as a "no"); both the token map and the missing value are configurable.
enum class VoteValue { Plus, Minus, Missing };

struct VoteSpec {
  char delimiter = ',';
  std::int8_t missing_value = -1;
  std::map<std::string, VoteValue> token_map;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Config file: one key=value per line, '#' comments. Keys:
//   delimiter=<char>        cell separator in the vote matrix (default ',')
//   missing=<+1|-1>         spin substituted for missing entries (default -1)
//   token.<TOK>=<+1|-1|missing>   mapping for raw token TOK
inline VoteSpec read_vote_spec(std::istream& in) {
  VoteSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("vote config line " + std::to_string(line_no) +
                            ": expected key=value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string value = detail::trim(t.substr(eq + 1));
    if (key == "delimiter") {
      if (value == "tab")
        spec.delimiter = '\t';
      else if (value.size() == 1)
        spec.delimiter = value[0];
      else
        throw ValidationError("vote config line " + std::to_string(line_no) +
                              ": delimiter must be a single character or 'tab'");
    } else if (key == "missing") {
      if (value == "+1" || value == "1")
        spec.missing_value = 1;
      else if (value == "-1")
        spec.missing_value = -1;
      else
        throw ValidationError("vote config line " + std::to_string(line_no) +
                              ": missing must be +1 or -1");
    } else if (key.rfind("token.", 0) == 0) {
      std::string tok = key.substr(6);
      if (tok.empty())
        throw ValidationError("vote config line " + std::to_string(line_no) +
                              ": empty token name");
      if (value == "+1" || value == "1")
        spec.token_map[tok] = VoteValue::Plus;
      else if (value == "-1")
        spec.token_map[tok] = VoteValue::Minus;
      else if (value == "missing")
        spec.token_map[tok] = VoteValue::Missing;
      else
        throw ValidationError("vote config line " + std::to_string(line_no) +
                              ": token value must be +1, -1 or missing");
    } else {
      throw ValidationError("vote config line " + std::to_string(line_no) +
                            ": unknown key '" + key + "'");
    }
  }
  if (spec.token_map.empty())
    throw ValidationError("vote config: no token.<TOK> mappings given");
  return spec;
}

inline VoteSpec read_vote_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vote config file: " + path);
  return read_vote_spec(in);
}

// Rows of the delimited matrix become samples, columns become variables.
// Unmapped tokens and ragged rows are hard errors naming row/column (1-based).
inline Dataset ingest_vote_matrix(std::istream& in, const VoteSpec& spec) {
  std::vector<std::vector<std::int8_t>> rows;
  std::string line;
  int line_no = 0;
  int p = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    std::vector<std::int8_t> row;
    std::size_t start = 0;
    int col = 0;
    while (true) {
      std::size_t end = line.find(spec.delimiter, start);
      std::string cell = detail::trim(end == std::string::npos
                                          ? line.substr(start)
                                          : line.substr(start, end - start));
      ++col;
      auto it = spec.token_map.find(cell);
      if (it == spec.token_map.end())
        throw ValidationError("vote matrix row " + std::to_string(line_no) + " column " +
                              std::to_string(col) + ": unknown token '" + cell + "'");
      switch (it->second) {
        case VoteValue::Plus: row.push_back(1); break;
        case VoteValue::Minus: row.push_back(-1); break;
        case VoteValue::Missing: row.push_back(spec.missing_value); break;
      }
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (p < 0)
      p = static_cast<int>(row.size());
    else if (static_cast<int>(row.size()) != p)
      throw ValidationError("vote matrix row " + std::to_string(line_no) + ": has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(p));
    rows.push_back(std::move(row));
  }
  if (p < 0) throw ValidationError("vote matrix: no data rows");
  Dataset data(static_cast<int>(rows.size()), p);
  for (int r = 0; r < data.n(); ++r)
    for (int j = 0; j < p; ++j) data.set(r, j, rows[r][j]);
  return data;
}

inline Dataset ingest_vote_matrix_file(const std::string& path, const VoteSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vote matrix file: " + path);
  return ingest_vote_matrix(in, spec);
}

}  // namespace slide
