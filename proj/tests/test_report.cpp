#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hypflow/report.hpp"

using namespace hypflow;

TEST_CASE("number formatting round-trips") {
  CHECK(fmt_num(0.1) == "0.1");
  CHECK(fmt_num(1e-4) == "1e-04");
  CHECK(fmt_num(-2.5) == "-2.5");
  CHECK(fmt_num(3) == "3");
  CHECK(fmt_num(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(fmt_num(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(fmt_num(-std::numeric_limits<double>::infinity()) == "-inf");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-300, 300);
  for (int k = 0; k < 100; ++k) {
    const double v = std::pow(10.0, U(rng)) * (k % 2 ? -1 : 1);
    CHECK(std::stod(fmt_num(v)) == v);
  }
}

TEST_CASE("CSV escaping") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(csv_escape("") == "");
}

TEST_CASE("CSV writer layout and row checks") {
  std::ostringstream os;
  CsvWriter w(os, {"a", "b,c"}, "{\"k\":1}");
  w.cell(1.5).cell("x").end_row();
  w.cell(true).cell(7).end_row();
  CHECK(w.rows() == 2);
  CHECK(os.str() == "# hypflow " + std::string(kVersion) + "\r\n# config: {\"k\":1}\r\na,\"b,c\"\r\n1.5,x\r\n1,7\r\n");
  w.cell(1.0);
  CHECK_THROWS_AS(w.end_row(), DomainError);
  w.cell(2.0);
  CHECK_THROWS_AS(w.cell(3.0), DomainError);

  std::ostringstream bare;
  CsvWriter v(bare, {"only"});
  CHECK(bare.str() == "# hypflow " + std::string(kVersion) + "\r\nonly\r\n");
}

TEST_CASE("classification JSON") {
  Classification c = Classification::with_regime(Regime::NonSemisimpleTransition);
  c.has_witness = true;
  c.witness = {vec1(0), vec1(1), cplx(0.5, 0)};
  c.jet.Pt = 1;
  c.jet.Pll = 2;
  BranchData b;
  b.mu = 0.5;
  b.tau_star = 0;
  b.e0 = 1;
  b.f0 = 1;
  RateReport r{2.0 / 3, 2.0 / 3, 0, false};
  const auto j = nlohmann::json::parse(classification_json(c, &b, &r, "{\"seed\":3}"));
  CHECK(j["regime"] == "NonSemisimpleTransition");
  CHECK(j["ell"] == 0.5);
  CHECK(j["zeta"].get<double>() == doctest::Approx(1.0 / 3));
  CHECK(j["witness"]["lambda"][0] == 0.5);
  CHECK(j["jet"]["P_t"][0] == 1.0);
  CHECK(j["jet"]["P_lambda_lambda"][0] == 2.0);
  CHECK(j["branch"]["mu"] == 0.5);
  CHECK(j["rates"]["source"] == "derived");
  CHECK(j["config"]["seed"] == 3);
  for (const char* k : {"tool", "h", "note", "tolerances", "residuals"}) CHECK(j.contains(k));

  const auto e = nlohmann::json::parse(classification_json(Classification::with_regime(Regime::Indeterminate)));
  CHECK(e["witness"].is_null());
  CHECK_FALSE(e.contains("branch"));
  CHECK(e["config"].is_null());
}

TEST_CASE("Hadamard JSON and CSV") {
  HadamardReport r;
  r.verdict = "unstable";
  r.filter_strength = 36;
  HadamardRow row;
  row.eps = 1e-2;
  row.ratio = std::numeric_limits<double>::infinity();
  row.breakdown = true;
  row.breakdown_reason = "CFL bound exceeded";
  r.rows.push_back(row);
  HadamardParams p;
  p.K = 3;
  const auto j = nlohmann::json::parse(hadamard_json(r, p, "", 9));
  CHECK(j["verdict"] == "unstable");
  CHECK(j["seed"] == 9);
  CHECK(j["params"]["K"] == 3.0);
  CHECK(j["rows"][0]["ratio"] == "inf");
  CHECK(j["rows"][0]["breakdown"] == true);

  std::ostringstream os;
  write_hadamard_csv(os, r);
  const std::string s = os.str();
  CHECK(s.find("eps,T,numerator,denominator,ratio,growth_exponent,predicted_exponent,breakdown,breakdown_time,"
               "breakdown_reason,n,L,dt,filter_strength\r\n") != std::string::npos);
  CHECK(s.find("0.01,0,0,0,inf,0,0,1,0,CFL bound exceeded,0,0,0,36\r\n") != std::string::npos);
}
