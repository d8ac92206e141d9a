#include "hypflow/report.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

namespace hypflow {

using nlohmann::ordered_json;

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& columns, const std::string& config_json)
    : os_(os), ncols_(columns.size()) {
  os_ << "# hypflow " << kVersion << "\r\n";
  if (!config_json.empty()) os_ << "# config: " << config_json << "\r\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << csv_escape(columns[i]);
  os_ << "\r\n";
}

CsvWriter& CsvWriter::cell(double v) { return cell(fmt_num(v)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (col_ >= ncols_) throw DomainError("csv: too many cells in row");
  os_ << (col_ ? "," : "") << csv_escape(s);
  ++col_;
  return *this;
}

void CsvWriter::end_row() {
  if (col_ != ncols_) throw DomainError("csv: row has " + std::to_string(col_) + " cells, expected " +
                                        std::to_string(ncols_));
  os_ << "\r\n";
  col_ = 0;
  ++rows_;
}

namespace {

ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt_num(v);
}

ordered_json cnum(cplx z) { return ordered_json::array({num(z.real()), num(z.imag())}); }

ordered_json vec(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string method(JetMethod m) { return m == JetMethod::AnalyticCoefficients ? "analytic" : "finite_difference"; }

ordered_json parse_config(const std::string& s) {
  if (s.empty()) return nullptr;
  return ordered_json::parse(s);
}

}  // namespace

std::string classification_json(const Classification& c, const BranchData* branch, const RateReport* rates,
                                const std::string& config_json) {
  ordered_json j;
  j["tool"] = std::string("hypflow ") + kVersion;
  j["regime"] = to_string(c.regime);
  j["ell"] = num(c.ell);
  j["h"] = num(c.h);
  j["zeta"] = num(c.zeta);
  j["note"] = c.note;
  j["tolerances"] = {{"eq", c.tol.eq}, {"margin", c.tol.margin}};
  if (c.has_witness) {
    j["witness"] = {{"x", vec(c.witness.x)}, {"xi", vec(c.witness.xi)}, {"lambda", cnum(c.witness.lambda)}};
    const CharPolyJet& q = c.jet;
    j["jet"] = {{"t", num(q.t)},
                {"P", cnum(q.P)},
                {"P_lambda", cnum(q.Pl)},
                {"P_lambda_lambda", cnum(q.Pll)},
                {"P_t", cnum(q.Pt)},
                {"P_tt", cnum(q.Ptt)},
                {"P_t_lambda", cnum(q.Ptl)},
                {"lambda_method", method(q.lambda_method)},
                {"time_method", method(q.time_method)},
                {"time_step", num(q.time_step)},
                {"noise_warning", q.noise_warning}};
    j["residuals"] = {{"P", num(std::abs(q.P))}, {"P_lambda", num(std::abs(q.Pl))}};
  } else {
    j["witness"] = nullptr;
  }
  if (branch) {
    j["branch"] = {{"mu", num(branch->mu)},
                   {"tau_star", num(branch->tau_star)},
                   {"e0", num(branch->e0)},
                   {"f0", num(branch->f0)},
                   {"negative_root", branch->negative_root},
                   {"mu_newton", {{"iterations", branch->mu_diag.iterations}, {"residual", num(branch->mu_diag.residual)}}},
                   {"tau_newton",
                    {{"iterations", branch->tau_diag.iterations}, {"residual", num(branch->tau_diag.residual)}}}};
  }
  if (rates) {
    j["rates"] = {{"gamma_minus", num(rates->gamma_minus)},
                  {"gamma_plus", num(rates->gamma_plus)},
                  {"c0", num(rates->c0)},
                  {"source", rates->fitted ? "fitted" : "derived"}};
  }
  j["config"] = parse_config(config_json);
  return j.dump(2);
}

std::string hadamard_json(const HadamardReport& r, const HadamardParams& p, const std::string& config_json,
                          unsigned long long seed) {
  ordered_json j;
  j["tool"] = std::string("hypflow ") + kVersion;
  j["verdict"] = r.verdict;
  j["log_slope"] = num(r.log_slope);
  j["growth_factor"] = num(r.growth_factor);
  j["any_breakdown"] = r.any_breakdown;
  j["filter"] = {{"strength", num(r.filter_strength)}, {"order", r.filter_order}};
  j["params"] = {{"K", num(p.K)},         {"alpha", num(p.alpha)}, {"m", num(p.m)},     {"delta", num(p.delta)},
                 {"T_star", num(p.T_star)}, {"h", num(p.h)},       {"ell", num(p.ell)}, {"d", p.d},
                 {"gamma_minus", num(p.gamma_minus)}, {"xi0", num(p.xi0)}};
  j["seed"] = seed;
  ordered_json rows = ordered_json::array();
  for (const HadamardRow& w : r.rows) {
    rows.push_back({{"eps", num(w.eps)},
                    {"T", num(w.T)},
                    {"numerator", num(w.numerator)},
                    {"denominator", num(w.denominator)},
                    {"ratio", num(w.ratio)},
                    {"growth_exponent", num(w.growth_exponent)},
                    {"predicted_exponent", num(w.predicted_exponent)},
                    {"breakdown", w.breakdown},
                    {"breakdown_time", num(w.breakdown_time)},
                    {"breakdown_reason", w.breakdown_reason},
                    {"n", w.n},
                    {"L", num(w.L)},
                    {"dt", num(w.dt)}});
  }
  j["rows"] = rows;
  j["config"] = parse_config(config_json);
  return j.dump(2);
}

void write_hadamard_csv(std::ostream& os, const HadamardReport& r, const std::string& config_json) {
  CsvWriter w(os,
              {"eps", "T", "numerator", "denominator", "ratio", "growth_exponent", "predicted_exponent", "breakdown",
               "breakdown_time", "breakdown_reason", "n", "L", "dt", "filter_strength"},
              config_json);
  for (const HadamardRow& row : r.rows) {
    w.cell(row.eps).cell(row.T).cell(row.numerator).cell(row.denominator).cell(row.ratio);
    w.cell(row.growth_exponent).cell(row.predicted_exponent).cell(row.breakdown).cell(row.breakdown_time);
    w.cell(row.breakdown_reason).cell(row.n).cell(row.L).cell(row.dt).cell(r.filter_strength);
    w.end_row();
  }
}

}  // namespace hypflow
