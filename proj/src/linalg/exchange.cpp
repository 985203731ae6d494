#include "qhl/exchange.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "common/json_matrix.hpp"

namespace qhl {

namespace detail {

namespace {

double finite_number(const nlohmann::json& v, const char* field) {
    if (!v.is_number()) {
        throw FormatError(std::string("matrix field '") + field + "' holds a non-number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw FormatError(std::string("matrix field '") + field + "' holds a non-finite value");
    }
    return x;
}

void check_grid(const nlohmann::json& grid, std::size_t rows, std::size_t cols,
                const char* field) {
    if (!grid.is_array() || grid.size() != rows) {
        throw FormatError(std::string("matrix field '") + field + "' must have " +
                          std::to_string(rows) + " rows");
    }
    for (const auto& row : grid) {
        if (!row.is_array() || row.size() != cols) {
            throw FormatError(std::string("matrix field '") + field + "' must have " +
                              std::to_string(cols) + " columns in every row");
        }
    }
}

}  // namespace

CMatrix matrix_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw FormatError("matrix document must be an object");
    }
    const auto dim = doc.find("dim");
    if (dim == doc.end() || !dim->is_array() || dim->size() != 2 ||
        !(*dim)[0].is_number_unsigned() || !(*dim)[1].is_number_unsigned()) {
        throw FormatError("matrix field 'dim' must be [rows, cols]");
    }
    const auto rows = (*dim)[0].get<std::size_t>();
    const auto cols = (*dim)[1].get<std::size_t>();
    if (rows == 0 || cols == 0) {
        throw FormatError("matrix dimensions must be positive");
    }
    const auto re = doc.find("re");
    if (re == doc.end()) {
        throw FormatError("matrix field 're' is missing");
    }
    check_grid(*re, rows, cols, "re");
    const auto im = doc.find("im");
    if (im != doc.end()) {
        check_grid(*im, rows, cols, "im");
    }

    std::vector<Complex> entries;
    entries.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double r = finite_number((*re)[i][j], "re");
            const double m = im == doc.end() ? 0.0 : finite_number((*im)[i][j], "im");
            entries.emplace_back(r, m);
        }
    }
    return CMatrix(rows, cols, std::move(entries));
}

nlohmann::json matrix_to_json(const CMatrix& m) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    bool any_imag = false;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json re_row = nlohmann::json::array();
        nlohmann::json im_row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
            any_imag = any_imag || m(i, j).imag() != 0.0;
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    nlohmann::json doc;
    doc["dim"] = {m.rows(), m.cols()};
    doc["re"] = std::move(re);
    if (any_imag) {
        doc["im"] = std::move(im);
    }
    return doc;
}

}  // namespace detail

CMatrix parse_matrix(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("malformed matrix document: ") + e.what());
    }
    return detail::matrix_from_json(doc);
}

std::string format_matrix(const CMatrix& m) {
    return detail::matrix_to_json(m).dump() + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CMatrix read_matrix_file(const std::filesystem::path& path) {
    try {
        return parse_matrix(read_text_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_matrix_file(const std::filesystem::path& path, const CMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << format_matrix(m);
}

}  // namespace qhl
