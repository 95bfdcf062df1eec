#include "gossip/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gossip {

WeightedGraph graph_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("graph: expected a JSON object");
  try {
    if (j.contains("generate")) {
      const auto family = parse_graph_family(j.at("generate").get<std::string>());
      const auto n = j.at("n").get<Eigen::Index>();
      return generate(family, n, j.value("weight", 1.0), j.value("seed", std::uint64_t{0}),
                      j.value("p", 0.5));
    }
    const auto n = j.at("n").get<Eigen::Index>();
    const auto& rows = j.at("weights");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
      throw StructuralError("graph: 'weights' must have n rows");
    }
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw StructuralError("graph: row " + std::to_string(i) + " must have n entries");
      }
      for (Eigen::Index k = 0; k < n; ++k) w(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return WeightedGraph(std::move(w), j.value("loops_allowed", false));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("graph: ") + e.what());
  }
}

Json to_json(const WeightedGraph& g) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < g.n(); ++k) row.push_back(g.weights()(i, k));
    rows.push_back(std::move(row));
  }
  Json j{{"n", g.n()}, {"weights", std::move(rows)}};
  if (g.loops_allowed()) j["loops_allowed"] = true;
  return j;
}

UpdateModel model_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("model: expected a JSON object");
  try {
    return UpdateModel(parse_model_kind(j.at("kind").get<std::string>()),
                       graph_from_json(j.at("graph")), j.at("q").get<double>(),
                       j.value("allow_degenerate", false));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

Json to_json(const UpdateModel& m) {
  Json j{{"kind", std::string(to_string(m.kind()))}, {"q", m.q()}, {"graph", to_json(m.graph())}};
  if (m.degenerate()) j["allow_degenerate"] = true;
  return j;
}

Json load_json_arg(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
      return Json::parse(text);
    }
    std::ifstream in(text);
    if (!in) throw ConfigError("cannot open '" + text + "'");
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

Vector parse_x0(std::string_view text, Eigen::Index n, std::uint64_t default_seed) {
  if (text == "alternating") {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = (i % 2 == 0) ? 1.0 : -1.0;
    return x;
  }
  if (text.substr(0, 11) == "iid_uniform") {
    std::uint64_t seed = default_seed;
    if (text.size() > 11) {
      if (text[11] != ':') throw ConfigError("x0: expected iid_uniform:SEED");
      const auto rest = text.substr(12);
      const auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), seed);
      if (ec != std::errc() || p != rest.data() + rest.size()) throw ConfigError("x0: bad seed");
    }
    // Stream id kept apart from the Monte Carlo trial streams.
    CounterRng rng(seed, 0xFFFFFFFFu, 0);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.uniform();
    return x;
  }
  std::vector<double> vals;
  if (!text.empty() && text.front() == '[') {
    try {
      vals = Json::parse(text).get<std::vector<double>>();
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("x0: ") + e.what());
    }
  } else {
    std::string item;
    std::istringstream ss{std::string(text)};
    ss.imbue(std::locale::classic());
    while (std::getline(ss, item, ',')) {
      std::istringstream cell(item);
      cell.imbue(std::locale::classic());
      double v;
      if (!(cell >> v)) throw ConfigError("x0: cannot parse '" + item + "'");
      vals.push_back(v);
    }
  }
  if (static_cast<Eigen::Index>(vals.size()) != n) {
    throw ConfigError("x0: expected " + std::to_string(n) + " entries, got " +
                      std::to_string(vals.size()));
  }
  return Eigen::Map<const Vector>(vals.data(), n);
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto put = [&](const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) {
      os << cell;
      return;
    }
    os << '"';
    for (char ch : cell) os << (ch == '"' ? "\"\"" : std::string(1, ch));
    os << '"';
  };
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      put(cells[i]);
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

}  // namespace gossip
