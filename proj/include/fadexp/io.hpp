#pragma once

#include "fadexp/constellations.hpp"
#include "fadexp/expansions.hpp"
#include "fadexp/fading.hpp"
#include "fadexp/mellin.hpp"
#include "fadexp/powalloc.hpp"

#include <json.hpp>

#include <string>

namespace fadexp::io {

using json = nlohmann::json;

// A library name ("16qam") or {"label", "points": [{"re","im","prob"}]}.
Constellation parse_constellation(const json& j);
// Name, path to a JSON file, or inline JSON text.
Constellation constellation_from_arg(const std::string& arg);

// {"kind": "rayleigh", "sigma": s}, {"kind": "ricean", "mu_abs" | "mu": [re, im], "sigma"},
// {"kind": "nakagami", "mu", "w"}, {"kind": "vector", "k", "mu_abs", "sigma"},
// {"kind": "custom", "coeffs": [{"a","p","logpow"}], "q_zero"}.
// "two_sigma2" may replace "sigma". Custom models read from JSON carry no
// density, so only expansions are available for them.
FadingModel parse_fading(const json& j);
// "rayleigh:sigma=0.7071", "nakagami:mu=0.5,w=1", a JSON file path or JSON text.
FadingModel fading_from_arg(const std::string& arg);

// {"P": f, "subchannels": [{"fading": {...} | "kind:k=v", "input": "16qam" | {...}}]}
ChannelBank parse_bank(const json& j);
ChannelBank bank_from_file(const std::string& path);

json to_json(const Expansion& e);
Expansion expansion_from_json(const json& j);
json to_json(const PowerAllocation& a);
json to_json(const MellinValue& v);

// 17 significant digits
std::string fmt(double v);

}  // namespace fadexp::io
