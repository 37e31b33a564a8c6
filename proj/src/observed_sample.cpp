#include "causalboot/observed_sample.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>

namespace causalboot {

ObservedSample::ObservedSample(std::vector<double> y_in,
                               std::vector<std::uint8_t> w_in)
    : y(std::move(y_in)), w(std::move(w_in)) {
  if (y.size() != w.size()) {
    throw std::invalid_argument("outcome and treatment vectors differ in length");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) throw std::invalid_argument("non-finite outcome");
    if (w[i] > 1) throw std::invalid_argument("treatment indicator must be 0 or 1");
    if (w[i]) ++n1; else ++n0;
  }
  if (n0 < 2 || n1 < 2) {
    throw std::invalid_argument("each stratum needs at least two units");
  }
}

std::vector<double> ObservedSample::stratum(int treated) const {
  std::vector<double> out;
  out.reserve(treated ? n1 : n0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (w[i] == (treated ? 1 : 0)) out.push_back(y[i]);
  }
  return out;
}

namespace {

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

ObservedSample load_observed_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw CsvError(1, "missing header");
  ++lineno;
  strip_cr(line);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
  if (trimmed(line) != "y,w") {
    throw CsvError(lineno, "expected header \"y,w\"");
  }

  std::vector<double> y;
  std::vector<std::uint8_t> w;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (trimmed(line).empty()) {
      // allow a trailing blank line, nothing else
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw CsvError(lineno, "blank line inside data");
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw CsvError(lineno, "expected two fields");
    const std::string y_field = trimmed(line.substr(0, comma));
    const std::string w_field = trimmed(line.substr(comma + 1));
    if (w_field.find(',') != std::string::npos) {
      throw CsvError(lineno, "expected two fields");
    }

    if (y_field.empty()) throw CsvError(lineno, "empty outcome field");
    const char* begin = y_field.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + y_field.size()) {
      throw CsvError(lineno, "unparseable outcome \"" + y_field + "\"");
    }
    if (!std::isfinite(value)) throw CsvError(lineno, "non-finite outcome");

    if (w_field == "0") {
      w.push_back(0);
    } else if (w_field == "1") {
      w.push_back(1);
    } else {
      throw CsvError(lineno, "treatment indicator must be 0 or 1, got \"" +
                                 w_field + "\"");
    }
    y.push_back(value);
  }
  if (y.empty()) throw CsvError(lineno, "no data rows");
  return ObservedSample(std::move(y), std::move(w));
}

ObservedSample load_observed_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(0, "cannot open \"" + path + "\"");
  return load_observed_csv(in);
}

}  // namespace causalboot
