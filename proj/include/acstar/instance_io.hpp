#pragma once

// JSON instance and solution files. See docs/format.md for the schema.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "acstar/power_model.hpp"

namespace acstar {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses an instance document and validates the resulting network.
/// Unknown keys, missing keys and invariant violations raise FormatError.
NetworkInstance parse_instance(const std::string& text);
std::string serialize_instance(const NetworkInstance& net);

/// Parses {"angles_rad": {...}}. Coverage of a network's buses is checked by
/// the consumer.
PhaseSolution parse_solution(const std::string& text);
std::string serialize_solution(const PhaseSolution& sol);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Angle literal: decimal radians or a pi fraction such as "pi", "-pi/4",
/// "2pi/3" or "2*pi/3". Throws FormatError.
double parse_angle(const std::string& text);

}  // namespace acstar
