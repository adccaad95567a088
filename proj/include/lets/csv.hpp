#pragma once

#include <iosfwd>
#include <string>

#include "lets/core.hpp"

namespace lets {

// Dataset files are plain CSV: header "f1,...,fd,z", one row per point, labels
// in the final column. Loading validates dimensions, finiteness and labels.
struct Dataset {
    std::vector<FeatureVector> features;
    std::vector<Label> labels;
};

Dataset read_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& data);
void save_dataset_csv(const std::string& path, const Dataset& data);

// Shortest round-trip decimal form, locale independent.
std::string format_double(double x);

} // namespace lets
