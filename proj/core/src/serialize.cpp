#include "qsd/serialize.hpp"

#include "json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsd {

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_sig17(double value) {
    char buf[48];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

std::string coefficients_to_json(const RealVec& coeffs) {
    return detail::coeffs_json(coeffs).dump();
}

RealVec coefficients_from_json(const std::string& json_text) {
    return detail::coeffs_from(detail::json::parse(json_text));
}

std::string table_to_csv(const ProbabilityTable& table) {
    std::ostringstream out;
    out << "j\\k";
    for (int k = 0; k < table.n; ++k) out << ',' << k;
    out << '\n';
    for (int j = 0; j < table.n; ++j) {
        out << j;
        for (int k = 0; k < table.n; ++k) out << ',' << format_double(table.entries(k, j));
        out << '\n';
    }
    return out.str();
}

ProbabilityTable table_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("table_from_csv: empty input");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');  // row label
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    ProbabilityTable table{n, RealMatrix(n, n)};
    for (int j = 0; j < n; ++j) {
        if (static_cast<int>(rows[j].size()) != n)
            throw std::invalid_argument("table_from_csv: ragged rows");
        for (int k = 0; k < n; ++k) table.entries(k, j) = rows[j][k];
    }
    return table;
}

std::string pattern_to_csv(const IntensityPattern& pattern) {
    std::ostringstream out;
    out << "x_meters,intensity\n";
    for (std::size_t i = 0; i < pattern.positions.size(); ++i)
        out << format_double(pattern.positions[i]) << ','
            << format_double(pattern.intensities[i]) << '\n';
    return out.str();
}

IntensityPattern pattern_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("pattern_from_csv: empty input");
    IntensityPattern pattern;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("pattern_from_csv: malformed row");
        pattern.positions.push_back(std::stod(line.substr(0, comma)));
        pattern.intensities.push_back(std::stod(line.substr(comma + 1)));
    }
    return pattern;
}

std::string geometry_to_json(const OpticalGeometry& g) {
    return detail::geometry_json(g).dump(2);
}

OpticalGeometry geometry_from_json(const std::string& json_text) {
    return detail::geometry_from(detail::json::parse(json_text));
}

std::string noise_to_json(const NoiseModel& noise) { return detail::noise_json(noise).dump(2); }

NoiseModel noise_from_json(const std::string& json_text) {
    return detail::noise_from(detail::json::parse(json_text));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace qsd
