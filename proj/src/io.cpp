#include "detline/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace detline {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "'" + path + "': " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Usage, "cannot write '" + path + "'");
  out << text;
}

ComplexPtr complex_from_json(const Json& j) {
  try {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "simplicial" && mode != "cw") throw Error(ErrorCode::ParseError, "mode must be simplicial or cw");
    std::vector<RawCell> raw;
    for (const auto& cell : j.at("cells")) {
      RawCell r;
      r.id = cell.at("id").get<std::string>();
      r.dim = cell.at("dim").get<int>();
      if (cell.contains("vertices")) r.vertices = cell.at("vertices").get<std::vector<std::string>>();
      if (cell.contains("faces"))
        for (const auto& f : cell.at("faces")) {
          if (!f.is_array() || f.size() != 2) throw Error(ErrorCode::ParseError, "faces are [face_id, coeff] pairs");
          r.faces.push_back({f[0].get<std::string>(), f[1].get<int>()});
        }
      raw.push_back(std::move(r));
    }
    return std::make_shared<const Complex>(build_complex(raw, mode == "cw" ? Mode::cw : Mode::simplicial));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Json complex_to_json(const Complex& c) {
  Json j;
  j["mode"] = c.mode() == Mode::cw ? "cw" : "simplicial";
  Json cells = Json::array();
  for (int q = 0; q <= c.top_dim(); ++q)
    for (std::size_t i = 0; i < c.count(q); ++i) {
      const Cell& cell = c.cell(q, int(i));
      Json x;
      x["id"] = cell.id;
      x["dim"] = q;
      if (c.mode() == Mode::simplicial) {
        Json v = Json::array();
        for (int k : cell.vertices) v.push_back(c.vertex_label(k));
        x["vertices"] = v;
      } else if (q > 0) {
        Json f = Json::array();
        for (const auto& e : c.faces(q, int(i))) f.push_back(Json::array({c.cell(q - 1, e.face).id, e.coeff}));
        x["faces"] = f;
      }
      cells.push_back(x);
    }
  j["cells"] = cells;
  return j;
}

std::string format_roundtrip(double x) {
  char buf[64];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

bool system_is_complex(const Json& j) {
  if (!j.contains("field")) return false;
  const std::string f = j.at("field").get<std::string>();
  if (f != "R" && f != "C") throw Error(ErrorCode::ParseError, "field must be R or C");
  return f == "C";
}

}  // namespace detline
