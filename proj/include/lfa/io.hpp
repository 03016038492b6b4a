#pragma once

#include "lfa/estimators.hpp"

#include <string>

namespace lfa {

// Line-based instance grammar; see README for the format.
ProblemInstance parse_instance(const std::string& text);
std::string render_instance(const ProblemInstance& instance);

ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& instance, const std::string& path);

std::string render_dataset(const Dataset& dataset);
Dataset parse_dataset(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace lfa
