#include "lexdiv/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace lexdiv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
    return value;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
    throw InputError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ErrorMatrix parse_matrix_csv(std::string_view text, std::optional<LossKind> kind, std::string_view source_name) {
    std::vector<std::string> case_labels;
    std::vector<double> losses;
    std::vector<std::size_t> row_lines;
    std::size_t n_cases = 0;
    std::size_t line_no = 0;
    bool first_content_line = true;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (trim(line).empty()) continue;

        const auto cells = split_cells(line);
        if (first_content_line) {
            first_content_line = false;
            n_cases = cells.size();
            bool any_numeric = false;
            for (auto cell : cells) any_numeric = any_numeric || parse_number(cell).has_value();
            if (!any_numeric) {
                for (auto cell : cells) {
                    if (cell.empty()) fail(source_name, line_no, "empty column name in header");
                    case_labels.emplace_back(cell);
                }
                continue;
            }
        }
        if (cells.size() != n_cases) {
            fail(source_name, line_no,
                 "expected " + std::to_string(n_cases) + " cells, found " + std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const auto value = parse_number(cells[j]);
            if (!value) fail(source_name, line_no, "cell " + std::to_string(j + 1) + " is not a number: '" +
                                                       std::string(cells[j]) + "'");
            if (!std::isfinite(*value)) fail(source_name, line_no, "cell " + std::to_string(j + 1) + " is not finite");
            losses.push_back(*value);
        }
        row_lines.push_back(line_no);
    }
    if (row_lines.empty()) fail(source_name, line_no, "no data rows");

    if (!kind) {
        bool integral = true;
        for (double v : losses) integral = integral && v == std::trunc(v) && std::fabs(v) <= 9007199254740992.0;
        kind = integral ? LossKind::discrete : LossKind::real;
    } else if (*kind == LossKind::discrete) {
        for (std::size_t k = 0; k < losses.size(); ++k) {
            const double v = losses[k];
            if (v != std::trunc(v) || std::fabs(v) > 9007199254740992.0)
                fail(source_name, row_lines[k / n_cases],
                     "cell " + std::to_string(k % n_cases + 1) + " is not an integer but the matrix is discrete");
        }
    }
    return ErrorMatrix(row_lines.size(), n_cases, std::move(losses), *kind, {}, std::move(case_labels));
}

std::filesystem::path sidecar_descriptor_path(const std::filesystem::path& matrix_path) {
    auto p = matrix_path;
    p.replace_extension(".json");
    return p;
}

std::optional<LossKind> read_descriptor(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": invalid descriptor JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw InputError(path.string() + ": descriptor must be an object with a string \"kind\"");
    return parse_loss_kind(j["kind"].get<std::string>());
}

ErrorMatrix read_matrix_csv(const std::filesystem::path& path, std::optional<LossKind> kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (!kind) kind = read_descriptor(sidecar_descriptor_path(path));
    return parse_matrix_csv(buffer.str(), kind, path.string());
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value + 0.0);
    return std::string(buf, ptr);
}

std::string write_matrix_csv(const ErrorMatrix& matrix) {
    std::string out;
    for (std::size_t j = 0; j < matrix.n_cases(); ++j) {
        if (j) out += ',';
        out += matrix.case_labels().empty() ? "case_" + std::to_string(j) : matrix.case_labels()[j];
    }
    out += '\n';
    for (std::size_t i = 0; i < matrix.n_individuals(); ++i) {
        auto row = matrix.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            if (matrix.kind() == LossKind::discrete)
                out += std::to_string(static_cast<long long>(row[j]));
            else
                out += format_double(row[j]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace lexdiv
