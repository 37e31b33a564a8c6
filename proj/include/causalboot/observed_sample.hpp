#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace causalboot {

// Outcomes and binary treatment indicators for one experiment.  Both
// strata must contain at least two units and every outcome must be finite;
// the constructor enforces this so downstream variance formulas never see
// a degenerate stratum.
struct ObservedSample {
  ObservedSample(std::vector<double> y_in, std::vector<std::uint8_t> w_in);

  int n() const { return static_cast<int>(y.size()); }

  // Outcomes of one stratum, in original order.
  std::vector<double> stratum(int treated) const;

  std::vector<double> y;
  std::vector<std::uint8_t> w;
  int n0 = 0;
  int n1 = 0;
};

// Raised on unparseable experiment data; `line` is 1-based and counts the
// header.  Line 0 marks file-level failures (e.g. the file cannot be opened),
// which carry no line prefix in the message.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error(
            line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Reads experiment data in the two-column format
//
//   y,w
//   1.25,0
//   0.75,1
//
// where w is 0 (control) or 1 (treated).  LF and CRLF line endings and a
// UTF-8 byte-order mark are accepted.  Throws CsvError on malformed input
// and std::invalid_argument if a stratum ends up smaller than two.
ObservedSample load_observed_csv(std::istream& in);
ObservedSample load_observed_csv_file(const std::string& path);

}  // namespace causalboot
