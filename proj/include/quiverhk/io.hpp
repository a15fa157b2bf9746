#pragma once

#include <string>

#include <json.hpp>

#include "quiverhk/hypertoric.hpp"
#include "quiverhk/nilcone.hpp"
#include "quiverhk/sigma.hpp"
#include "quiverhk/strata.hpp"

namespace quiverhk::io {

using json = nlohmann::json;

// Complex scalars are [re, im]; matrices are {"rows", "cols", "data"} in row-major order.
json to_json(cplx z);
json to_json(const CMatrix& m);
json vector_to_json(const CVector& v);
json to_json(const Quiver& q);
json to_json(const HypertoricQuiver& hq);
json to_json(const SigmaSection& s);
json to_json(const StratumLabel& label);
json to_json(const Classification& c);
json to_json(const PhiResult& r);

cplx complex_from_json(const json& j);
CMatrix matrix_from_json(const json& j);
CVector vector_from_json(const json& j);
Quiver quiver_from_json(const json& j);
HypertoricQuiver hypertoric_from_json(const json& j);
SigmaSection section_from_json(const json& j);
StratumLabel label_from_json(const json& j);

// Parse failures and missing files become InputError.
json parse(const std::string& text);
json read_file(const std::string& path);
std::string dump(const json& j);

}  // namespace quiverhk::io
