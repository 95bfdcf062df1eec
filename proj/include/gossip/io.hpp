#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gossip/update_model.hpp"

namespace gossip {

using Json = nlohmann::json;

/// {"n": int, "weights": [[...], ...], "loops_allowed": bool?}.
/// Also accepts a generator form {"generate": "cycle", "n": 8, "weight": 1.0,
/// "seed": 0, "p": 0.5}.
WeightedGraph graph_from_json(const Json& j);
Json to_json(const WeightedGraph& g);

/// {"kind": "BGA", "q": 0.5, "graph": {...}, "allow_degenerate": false}.
UpdateModel model_from_json(const Json& j);
Json to_json(const UpdateModel& m);

/// Inline JSON when the text starts with '{' or '[', otherwise a file path.
Json load_json_arg(const std::string& text_or_path);

/// x0 forms: "0,1,2", "[0,1,2]", "alternating", "iid_uniform" or
/// "iid_uniform:SEED". Lengths are checked against n.
Vector parse_x0(std::string_view text, Eigen::Index n, std::uint64_t default_seed = 0);

/// 17 significant digits, '.' decimal regardless of locale.
std::string format_double(double v);

/// Writes a header row and data rows; cells are pre-formatted strings and get
/// quoted only when they contain a comma, quote or line break.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace gossip
