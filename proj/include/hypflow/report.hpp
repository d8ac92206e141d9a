#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hypflow/branching.hpp"
#include "hypflow/pde_sim.hpp"

namespace hypflow {

// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string fmt_num(double v);
std::string csv_escape(const std::string& field);

// RFC-4180 table preceded by `# ` comment lines (tool version, canonical config).
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& columns, const std::string& config_json = "");
  CsvWriter& cell(double v);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(const char* s) { return cell(std::string(s)); }
  CsvWriter& cell(bool b) { return cell(std::string(b ? "1" : "0")); }
  CsvWriter& cell(int v) { return cell(static_cast<double>(v)); }
  void end_row();
  std::size_t rows() const { return rows_; }

 private:
  std::ostream& os_;
  std::size_t ncols_, col_ = 0, rows_ = 0;
};

struct RateReport {
  double gamma_minus = 0, gamma_plus = 0, c0 = 0;
  bool fitted = false;  // rates outside the proved regimes are fitted, not derived
};

std::string classification_json(const Classification& c, const BranchData* branch = nullptr,
                                 const RateReport* rates = nullptr, const std::string& config_json = "");
std::string hadamard_json(const HadamardReport& r, const HadamardParams& p, const std::string& config_json = "",
                          unsigned long long seed = 0);
void write_hadamard_csv(std::ostream& os, const HadamardReport& r, const std::string& config_json = "");

}  // namespace hypflow
