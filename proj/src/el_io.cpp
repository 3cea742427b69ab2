#include "ozsl/el_embed.hpp"
#include "ozsl/error.hpp"
#include "ozsl/io_util.hpp"

namespace ozsl {

std::string export_space(const EmbeddingSpace& s) {
  std::string out = "#dim\t" + std::to_string(s.dim()) + "\n";
  for (std::size_t i = 0; i < s.concept_count(); ++i) {
    auto c = s.center(i);
    out += "C\t" + s.concept_name(i) + "\t" + join_doubles(c.data(), c.size(), ',') + "\t" +
           format_double(s.radius(i)) + "\n";
  }
  for (std::size_t i = 0; i < s.relation_count(); ++i) {
    auto r = s.relation(i);
    out += "R\t" + s.relation_name(i) + "\t" + join_doubles(r.data(), r.size(), ',') + "\n";
  }
  return out;
}

EmbeddingSpace import_space(std::string_view text) {
  auto lines = lines_of(text);
  if (lines.empty()) throw DataError("embedding file line 1: missing '#dim' header");
  auto header = split(lines[0], '\t');
  if (header.size() != 2 || header[0] != "#dim") throw DataError("embedding file line 1: expected '#dim<TAB>n'");
  long long dim = parse_int(header[1], "embedding file line 1");
  if (dim <= 0) throw DataError("embedding file line 1: dimension must be positive");
  EmbeddingSpace s(static_cast<std::size_t>(dim));
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    std::string where = "embedding file line " + std::to_string(ln + 1);
    std::string_view line = lines[ln];
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f[0] == "C") {
      if (f.size() != 4) throw DataError(where + ": concept row needs 4 fields, found " + std::to_string(f.size()));
      auto v = parse_doubles(f[2], ',', where);
      if (v.size() != s.dim())
        throw DataError(where + ": dimension mismatch (" + std::to_string(v.size()) + " values, header says " +
                        std::to_string(s.dim()) + ")");
      try {
        s.add_concept(std::string(f[1]), v, parse_double(f[3], where));
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
    } else if (f[0] == "R") {
      if (f.size() != 3) throw DataError(where + ": relation row needs 3 fields, found " + std::to_string(f.size()));
      auto v = parse_doubles(f[2], ',', where);
      if (v.size() != s.dim())
        throw DataError(where + ": dimension mismatch (" + std::to_string(v.size()) + " values, header says " +
                        std::to_string(s.dim()) + ")");
      try {
        s.add_relation(std::string(f[1]), v);
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
    } else {
      throw DataError(where + ": unknown row kind '" + std::string(f[0]) + "'");
    }
  }
  return s;
}

}  // namespace ozsl
