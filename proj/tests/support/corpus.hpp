#pragma once
// The handcrafted SPARQL corpus: queries separated by `#@ <id>` lines, and a
// gold TSV of `id, entity, predicate, orientation`.

#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace corpus {

using GoldRow = std::tuple<std::string, std::string, std::string, std::string>;

inline std::vector<std::pair<std::string, std::string>> load_queries(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#@ ", 0) == 0) {
      out.emplace_back(line.substr(3), "");
    } else if (!out.empty()) {
      out.back().second += line + "\n";
    }
  }
  return out;
}

inline std::set<GoldRow> load_gold(const std::string& path) {
  std::ifstream in(path);
  std::set<GoldRow> out;
  std::string id, entity, predicate, orientation;
  while (std::getline(in, id, '\t') && std::getline(in, entity, '\t') &&
         std::getline(in, predicate, '\t') && std::getline(in, orientation))
    out.emplace(id, entity, predicate, orientation);
  return out;
}

}  // namespace corpus
