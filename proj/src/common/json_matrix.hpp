// JSON <-> CMatrix conversion, private to the library and CLI.
#pragma once

#include <json.hpp>

#include "qhl/matrix.hpp"

namespace qhl::detail {

CMatrix matrix_from_json(const nlohmann::json& doc);
nlohmann::json matrix_to_json(const CMatrix& m);

}  // namespace qhl::detail
