#pragma once

// Delimited edge files: `user,object[,timestamp[,rating[,prior]]]`, comma or
// tab separated (detected from the first line), optional header whose first
// field is `user`. Every data line must have the same number of fields.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "holoscope/graph.hpp"

namespace holoscope::io {

std::vector<EdgeRecord> read_edges(std::istream& in, const std::string& source = "<input>");
std::vector<EdgeRecord> read_edges(const std::filesystem::path& path);

void write_edges(std::ostream& out, const std::vector<EdgeRecord>& records);
void write_edges(const std::filesystem::path& path, const std::vector<EdgeRecord>& records);

/// Labels file: `id,side` rows with side in {user, object}.
struct Labels {
  std::vector<std::string> users;
  std::vector<std::string> objects;
};
void write_labels(const std::filesystem::path& path, const Labels& labels);
Labels read_labels(const std::filesystem::path& path);

}  // namespace holoscope::io
