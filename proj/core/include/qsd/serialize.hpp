#pragma once

#include "qsd/measurement.hpp"
#include "qsd/optics.hpp"
#include "qsd/qudit.hpp"

#include <filesystem>
#include <string>

namespace qsd {

/// Shortest decimal string that round-trips to the same double. Used for
/// every numeric payload so that reruns are byte-identical.
std::string format_double(double value);

/// Fixed 17-significant-digit scientific form; cross-implementation stable
/// representation used for coefficient fixtures.
std::string format_sig17(double value);

/// Coefficient vectors serialize as JSON arrays of 17-digit decimal strings.
std::string coefficients_to_json(const RealVec& coeffs);
RealVec coefficients_from_json(const std::string& json_text);

/// CSV with header row "j\k,0..N-1"; row j lists P(outcome k | state j).
std::string table_to_csv(const ProbabilityTable& table);
ProbabilityTable table_from_csv(const std::string& csv);

/// Two-column CSV "x_meters,intensity".
std::string pattern_to_csv(const IntensityPattern& pattern);
IntensityPattern pattern_from_csv(const std::string& csv);

std::string geometry_to_json(const OpticalGeometry& g);
OpticalGeometry geometry_from_json(const std::string& json_text);

std::string noise_to_json(const NoiseModel& noise);
NoiseModel noise_from_json(const std::string& json_text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace qsd
