#include "holoscope/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "holoscope/error.hpp"

namespace holoscope::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '"')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '"' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::vector<EdgeRecord> read_edges(std::istream& in, const std::string& source) {
  std::vector<EdgeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  char delim = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (delim == 0) delim = line.find('\t') != std::string::npos ? '\t' : ',';
    auto fields = split(line, delim);
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (records.empty() && arity == 0) {
      std::string first(fields[0]);
      std::transform(first.begin(), first.end(), first.begin(), ::tolower);
      if (first == "user") {
        arity = fields.size();
        continue;
      }
    }
    if (fields.size() < 2 || fields.size() > 5)
      throw DataError(where + "expected 2 to 5 fields, got " + std::to_string(fields.size()));
    if (arity == 0) arity = fields.size();
    if (fields.size() != arity)
      throw DataError(where + "expected " + std::to_string(arity) + " fields, got " + std::to_string(fields.size()));

    EdgeRecord r;
    r.user = std::string(fields[0]);
    r.object = std::string(fields[1]);
    if (r.user.empty() || r.object.empty()) throw DataError(where + "empty user or object id");
    if (fields.size() >= 3) {
      Timestamp t{};
      if (!parse_number(fields[2], t)) throw DataError(where + "non-numeric timestamp '" + std::string(fields[2]) + "'");
      if (t < 0) throw DataError(where + "negative timestamp");
      r.timestamp = t;
    }
    if (fields.size() >= 4) {
      double v{};
      if (!parse_number(fields[3], v)) throw DataError(where + "non-numeric rating '" + std::string(fields[3]) + "'");
      r.rating = v;
    }
    if (fields.size() == 5) {
      double v{};
      if (!parse_number(fields[4], v) || !(v > 0)) throw DataError(where + "invalid prior '" + std::string(fields[4]) + "'");
      r.prior = v;
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError(source + ": empty input");
  return records;
}

std::vector<EdgeRecord> read_edges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_edges(in, path.string());
}

void write_edges(std::ostream& out, const std::vector<EdgeRecord>& records) {
  out << std::setprecision(10);
  for (const auto& r : records) {
    out << r.user << ',' << r.object;
    if (r.timestamp) out << ',' << *r.timestamp;
    if (r.rating) out << ',' << *r.rating;
    if (r.prior) out << ',' << *r.prior;
    out << '\n';
  }
}

void write_edges(const std::filesystem::path& path, const std::vector<EdgeRecord>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_edges(out, records);
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "id,side\n";
  for (const auto& u : labels.users) out << u << ",user\n";
  for (const auto& v : labels.objects) out << v << ",object\n";
}

Labels read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Labels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line_no == 1 && line.rfind("id,", 0) == 0)) continue;
    auto fields = split(line, ',');
    if (fields.size() != 2) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected id,side");
    if (fields[1] == "user") labels.users.emplace_back(fields[0]);
    else if (fields[1] == "object") labels.objects.emplace_back(fields[0]);
    else throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown side '" + std::string(fields[1]) + "'");
  }
  return labels;
}

}  // namespace holoscope::io
