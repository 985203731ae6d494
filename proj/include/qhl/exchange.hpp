// Matrix exchange format shared by every file the toolkit reads or writes:
//
//   { "dim": [rows, cols], "re": [[...], ...], "im": [[...], ...] }
//
// "im" may be omitted (all-zero imaginary part). NaN and Inf are rejected.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qhl/matrix.hpp"

namespace qhl {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

CMatrix parse_matrix(std::string_view text);
std::string format_matrix(const CMatrix& m);

CMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const CMatrix& m);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace qhl
